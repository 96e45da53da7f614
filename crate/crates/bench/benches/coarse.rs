use std::hint::black_box;

use coarse_core::axioms::{check_all, CheckConfig};
use coarse_core::builders::rationals::{groupoid_to_coarse, rationals_groupoid, Rational};
use coarse_core::coarse_of_group;
use coarse_core::filters::filter_group;
use coarse_core::groups::catalog;
use coarse_core::iso::struct_iso;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn groups() -> Vec<coarse_core::PermGroup> {
    vec![
        catalog::cyclic(4),
        catalog::symmetric(3),
        catalog::dihedral(4),
        catalog::quaternion(),
        catalog::alternating(4),
    ]
}

fn build(c: &mut Criterion) {
    let mut group = c.benchmark_group("coarse_of_group");
    for g in groups().into_iter().chain([catalog::symmetric(4)]) {
        group.bench_with_input(BenchmarkId::from_parameter(g.name()), &g, |b, g| {
            b.iter(|| coarse_of_group(black_box(g)).unwrap())
        });
    }
    group.finish();
}

fn checks(c: &mut Criterion) {
    let mut group = c.benchmark_group("check_all");
    group.sample_size(20);
    for g in groups() {
        let m = coarse_of_group(&g).unwrap().structure;
        group.bench_with_input(BenchmarkId::from_parameter(g.name()), &m, |b, m| {
            b.iter(|| check_all(black_box(m), &CheckConfig::default()))
        });
    }
    group.finish();
}

fn filters(c: &mut Criterion) {
    let mut group = c.benchmark_group("filter_group");
    for g in groups() {
        let m = coarse_of_group(&g).unwrap().structure;
        group.bench_with_input(BenchmarkId::from_parameter(g.name()), &m, |b, m| {
            b.iter(|| filter_group(black_box(m)).unwrap())
        });
    }
    group.finish();
}

fn isomorphism(c: &mut Criterion) {
    let mut group = c.benchmark_group("struct_iso");
    for g in groups() {
        let m = coarse_of_group(&g).unwrap().structure;
        let p: Vec<usize> = (0..m.size()).rev().collect();
        let n = m.permuted(&p).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(g.name()), &(m, n), |b, (m, n)| {
            b.iter(|| struct_iso(black_box(m), black_box(n)).unwrap())
        });
    }
    group.finish();
}

fn groupoid(c: &mut Criterion) {
    let mut group = c.benchmark_group("groupoid_to_coarse");
    for size in 2..=5i64 {
        let support: Vec<Rational> = (0..size).map(Rational::from_integer).collect();
        group.bench_with_input(BenchmarkId::from_parameter(size), &support, |b, s| {
            b.iter(|| groupoid_to_coarse(&rationals_groupoid(black_box(s)).unwrap()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, build, checks, filters, isomorphism, groupoid);
criterion_main!(benches);
