use std::collections::BTreeSet;

use coarse_core::axioms::{self, CheckConfig, Checker, Formulas};
use coarse_core::builders::rationals::{groupoid_to_coarse, rationals_groupoid, PartialOrderMap, Rational};
use coarse_core::builders::{canonical_structure, coarse_of_group};
use coarse_core::coarse::CoarseStructure;
use coarse_core::filters::{filter_group, full_filters, gamma_action};
use coarse_core::groups::catalog;
use coarse_core::iso::{ef_fingerprint, is_struct_iso, orbit_structure, struct_iso};
use coarse_core::stone::{ba_to_tree, clopen_algebra, random_tree, stone_roundtrip};
use coarse_core::{Perm, PermGroup, Side};
use fixedbitset::FixedBitSet;
use itertools::Itertools;
use proptest::prelude::*;
use rand::SeedableRng;

fn arb_perm(n: usize) -> impl Strategy<Value = Perm> {
    Just((0..n).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|v| Perm::from_images(v).unwrap())
}

fn arb_group(max_degree: usize) -> impl Strategy<Value = PermGroup> {
    (1..=max_degree)
        .prop_flat_map(|n| (Just(n), prop::collection::vec(arb_perm(n), 0..=2)))
        .prop_map(|(n, gens)| PermGroup::generate("G", n, gens).unwrap())
}

/// Groups of order at most 12 on at most 4 points.
fn arb_small_group() -> impl Strategy<Value = PermGroup> {
    arb_group(4).prop_filter("order <= 12", |g| g.order() <= 12)
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

fn singleton(n: usize, x: usize) -> FixedBitSet {
    let mut b = FixedBitSet::with_capacity(n);
    b.insert(x);
    b
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lagrange_in_the_symmetric_group(g in arb_group(6)) {
        prop_assert_eq!(factorial(g.degree()) % g.order(), 0);
    }

    #[test]
    fn coset_cells_partition_the_group(g in arb_group(5)) {
        for u in g.all_subgroups(120).unwrap() {
            for side in [Side::Left, Side::Right] {
                let cells = g.cosets(&u, side);
                prop_assert!(cells.iter().all(|c| c.len() == u.order()));
                let all: BTreeSet<usize> = cells.iter().flatten().copied().collect();
                prop_assert_eq!(all.len(), g.order());
                prop_assert_eq!(cells.len() * u.order(), g.order());
            }
        }
    }

    #[test]
    fn stabilizer_of_union_is_intersection(
        g in arb_group(6),
        p in prop::collection::btree_set(0usize..6, 0..3),
        q in prop::collection::btree_set(0usize..6, 0..3),
    ) {
        let n = g.degree();
        let p: Vec<usize> = p.into_iter().filter(|&x| x < n).collect();
        let q: Vec<usize> = q.into_iter().filter(|&x| x < n).collect();
        let both: Vec<usize> = p.iter().chain(&q).copied().collect();
        let lhs = g.pointwise_stabilizer(&both).unwrap();
        let rhs = g.pointwise_stabilizer(&p).unwrap().intersection(&g.pointwise_stabilizer(&q).unwrap());
        prop_assert_eq!(lhs.member_list(), rhs.member_list());
    }

    #[test]
    fn orbit_counts_are_conjugation_invariant(g in arb_group(5), seed in any::<u64>()) {
        let n = g.degree();
        let mut images: Vec<usize> = (0..n).collect();
        use rand::seq::SliceRandom;
        images.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let alpha = Perm::from_images(images).unwrap();
        let h = catalog::relabeled(&g, &alpha);
        prop_assert_eq!(
            orbit_structure(&g, 3).unwrap().orbit_counts(),
            orbit_structure(&h, 3).unwrap().orbit_counts()
        );
    }

    #[test]
    fn canonical_structure_is_preserved_by_generators(g in arb_group(4)) {
        let s = canonical_structure(&g, 3).unwrap();
        for p in g.generators() {
            prop_assert!(s.preserved_by(p));
        }
    }
}

fn brute_coset_count(g: &PermGroup) -> usize {
    let mut sets = BTreeSet::new();
    for u in g.all_subgroups(48).unwrap() {
        for a in 0..g.order() {
            let cell: BTreeSet<usize> = u.members().map(|x| g.mul(a, x)).collect();
            sets.insert(cell);
        }
    }
    sets.len()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn coarse_order_and_diamond(g in arb_small_group()) {
        let m = coarse_of_group(&g).unwrap().structure;
        let n = m.size();
        prop_assert_eq!(n, brute_coset_count(&g));
        let leq = |a, b| m.leq(a, b).unwrap();
        for a in 0..n {
            prop_assert!(leq(a, a));
            prop_assert!(m.relation(a, m.lc_of(a).unwrap(), a));
            prop_assert!(m.relation(m.rc_of(a).unwrap(), a, a));
            let d = m.diamond(a).unwrap();
            prop_assert_eq!(m.diamond(d).unwrap(), a);
            prop_assert_eq!(m.lc_of(d).unwrap(), m.rc_of(a).unwrap());
            for b in 0..n {
                if a != b {
                    prop_assert!(!(leq(a, b) && leq(b, a)));
                }
                prop_assert_eq!(leq(a, b), leq(d, m.diamond(b).unwrap()));
                for c in 0..n {
                    if leq(a, b) && leq(b, c) {
                        prop_assert!(leq(a, c));
                    }
                }
            }
        }
        let images: BTreeSet<usize> = (0..n).map(|a| m.diamond(a).unwrap()).collect();
        prop_assert_eq!(images.len(), n);
    }

    #[test]
    fn cosets_of_a_subgroup_are_disjoint(g in arb_small_group()) {
        let m = coarse_of_group(&g).unwrap().structure;
        for u in m.subgroups() {
            for (a, b) in m.lc_list(u).into_iter().tuple_combinations() {
                prop_assert!(m.disjoint(a, b));
            }
        }
    }

    #[test]
    fn dot_on_matching_subgroups(g in arb_small_group()) {
        let m = coarse_of_group(&g).unwrap().structure;
        for a in 0..m.size() {
            for b in 0..m.size() {
                if m.lc_of(a).unwrap() != m.rc_of(b).unwrap() {
                    continue;
                }
                let c = m.dot(a, b).unwrap();
                prop_assert!(c.is_some(), "dot({a},{b}) undefined");
                let c = c.unwrap();
                prop_assert_eq!(m.lc_of(c).unwrap(), m.lc_of(b).unwrap());
                prop_assert_eq!(m.rc_of(c).unwrap(), m.rc_of(a).unwrap());
            }
        }
    }

    #[test]
    fn quotients_are_groups(g in arb_small_group()) {
        let m = coarse_of_group(&g).unwrap().structure;
        for u in m.subgroups() {
            if m.is_normal(u).unwrap() {
                let q = m.quotient_group(u).unwrap();
                prop_assert!(q.verify().is_ok());
                let points = m.lc_list(m.minimum_subgroup().unwrap());
                let inside = points.iter().filter(|&&x| m.leq(x, u).unwrap()).count();
                prop_assert_eq!(q.order() * inside, g.order());
            }
        }
    }

    #[test]
    fn every_checker_holds_on_group_structures(g in arb_small_group()) {
        let m = coarse_of_group(&g).unwrap().structure;
        for r in axioms::check_all(&m, &CheckConfig::default()) {
            prop_assert!(r.holds, "{} fails on {:?}: {:?}", r.axiom_id, g.generators(), r);
        }
    }

    #[test]
    fn filter_group_invariants(g in arb_small_group()) {
        let m = coarse_of_group(&g).unwrap().structure;
        prop_assert_eq!(full_filters(&m).unwrap().len(), g.order());
        let fg = filter_group(&m).unwrap();
        let order = fg.order();
        let n = m.size();
        let hats: BTreeSet<Vec<usize>> = (0..n).map(|a| fg.hat(a).ones().collect()).collect();
        prop_assert_eq!(hats.len(), n);
        for a in 0..n {
            let d = m.diamond(a).unwrap();
            prop_assert_eq!(fg.hat(d), &fg.set_inverse(fg.hat(a)));
            let lc = m.lc_of(a).unwrap();
            let x = fg.hat(a).ones().next().unwrap();
            prop_assert_eq!(&fg.set_product(&singleton(order, x), fg.hat(lc)), fg.hat(a));
            for b in 0..n {
                prop_assert_eq!(m.leq(a, b).unwrap(), fg.hat(a).is_subset(fg.hat(b)));
            }
        }
        for v in m.subgroups() {
            prop_assert!(fg.is_subgroup(fg.hat(v)));
            let lcv = m.lc_list(v);
            let hat_cosets: BTreeSet<Vec<usize>> = lcv.iter().map(|&a| fg.hat(a).ones().collect()).collect();
            for (x, filter) in fg.filters.iter().enumerate() {
                let coset: Vec<usize> = fg.set_product(&singleton(order, x), fg.hat(v)).ones().collect();
                prop_assert!(hat_cosets.contains(&coset));
                for &c in &lcv {
                    let moved = gamma_action(&m, v, filter, c).unwrap();
                    prop_assert_eq!(&fg.set_product(&singleton(order, x), fg.hat(c)), fg.hat(moved));
                }
            }
        }
    }

    #[test]
    fn theta_detected_subgroups_are_star_subgroups(g in arb_small_group()) {
        let m = coarse_of_group(&g).unwrap().structure;
        let fg = filter_group(&m).unwrap();
        let f = Formulas::new(&m).unwrap();
        let subgroup_hats: BTreeSet<Vec<usize>> = m.subgroups().into_iter().map(|u| fg.hat(u).ones().collect()).collect();
        for v in m.subgroups() {
            let lcv = m.lc_list(v);
            for k in 1..=lcv.len().min(3) {
                for a in lcv.iter().copied().combinations(k) {
                    if f.theta(&a, v).unwrap() {
                        let union: Vec<usize> = fg.double_coset_union(v, &a).ones().collect();
                        prop_assert!(subgroup_hats.contains(&union), "V={v}, A={a:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn fingerprints_and_iso_survive_relabeling(g in arb_small_group(), seed in any::<u64>()) {
        let m = coarse_of_group(&g).unwrap().structure;
        let mut p: Vec<usize> = (0..m.size()).collect();
        use rand::seq::SliceRandom;
        p.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let n = m.permuted(&p).unwrap();
        let f = struct_iso(&m, &n);
        prop_assert!(f.is_some());
        prop_assert!(is_struct_iso(&m, &n, f.as_ref().unwrap()));
        for d in 0..=3 {
            prop_assert_eq!(ef_fingerprint(&m, d).unwrap(), ef_fingerprint(&n, d).unwrap());
        }
    }
}

fn naive_iso(m: &CoarseStructure, n: &CoarseStructure) -> bool {
    if m.size() != n.size() || m.num_triples() != n.num_triples() {
        return false;
    }
    let target: BTreeSet<(usize, usize, usize)> = n.triples().collect();
    (0..m.size())
        .permutations(m.size())
        .any(|f| m.triples().all(|(a, b, c)| target.contains(&(f[a], f[b], f[c]))))
}

fn arb_structure() -> impl Strategy<Value = CoarseStructure> {
    (1usize..=5).prop_flat_map(|n| {
        prop::collection::btree_set((0..n, 0..n, 0..n), 0..=2 * n * n)
            .prop_map(move |t| CoarseStructure::from_triples(n, t).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn struct_iso_agrees_with_naive_search(m in arb_structure(), n in arb_structure()) {
        let found = struct_iso(&m, &n);
        prop_assert_eq!(found.is_some(), naive_iso(&m, &n));
        if let Some(f) = found {
            prop_assert!(is_struct_iso(&m, &n, &f));
            prop_assert_eq!(ef_fingerprint(&m, 2).unwrap(), ef_fingerprint(&n, 2).unwrap());
        }
    }

    #[test]
    fn witnesses_replay_on_mutated_structures(
        which in prop::sample::select(vec!["z2", "z3", "v4", "s3"]),
        a in any::<prop::sample::Index>(),
        b in any::<prop::sample::Index>(),
        c in any::<prop::sample::Index>(),
        add in any::<bool>(),
    ) {
        let g = match which {
            "z2" => catalog::cyclic(2),
            "z3" => catalog::cyclic(3),
            "v4" => catalog::klein_four(),
            _ => catalog::symmetric(3),
        };
        let m = coarse_of_group(&g).unwrap().structure;
        let s = m.size();
        let (a, b, c) = (a.index(s), b.index(s), c.index(s));
        let mutated = if add { m.with_triple_added(a, b, c) } else { m.with_triple_removed(a, b, c) };
        let cfg = CheckConfig::default();
        for checker in Checker::ALL {
            let r = axioms::check(&mutated, checker, &cfg);
            if !r.holds {
                prop_assert!(r.witness.is_some());
                prop_assert!(axioms::replay(&mutated, &r, &cfg).unwrap(), "{:?} does not replay", r);
            }
        }
    }

    #[test]
    fn stone_algebra_sizes_and_round_trips(depth in 1usize..=5, seed in any::<u64>()) {
        let t = random_tree(depth, &mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        for d in 0..=depth {
            let b = clopen_algebra(&t, d).unwrap();
            prop_assert_eq!(b.num_elements(), 1u128 << t.level(d).len());
            let back = ba_to_tree(&b, &b.level_generators(d));
            for node in &back.nodes {
                if !node.is_empty() {
                    prop_assert!(back.nodes.contains(&node[..node.len() - 1]));
                }
                if node.len() < d {
                    let (zero, one) = (format!("{node}0"), format!("{node}1"));
                    prop_assert!(back.nodes.contains(&zero) || back.nodes.contains(&one));
                }
            }
            let r = stone_roundtrip(&t, d).unwrap();
            prop_assert!(r.holds, "{:?}", r.counterexample);
        }
    }
}

// The groupoid relation against its meaning: R(f, h, k) iff every g1 ⊇ f and
// g2 ⊇ h have g1 ∘ g2 ⊇ k. Extensions range over a pool with room for three
// new points in every gap, which is enough for maps with at most three pairs.

fn pool(support: &[Rational]) -> Vec<Rational> {
    let mut out: Vec<Rational> = support.to_vec();
    let four = Rational::from_integer(4);
    let (lo, hi) = match (support.first(), support.last()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => (Rational::from_integer(0), Rational::from_integer(0)),
    };
    for i in 1..=3 {
        out.push(lo - Rational::from_integer(i));
        out.push(hi + Rational::from_integer(i));
    }
    for (x, y) in support.iter().tuple_windows() {
        for i in 1..=3 {
            out.push(*x + (*y - *x) * Rational::from_integer(i) / four);
        }
    }
    out.sort();
    out.dedup();
    out
}

fn apply(pairs: &[(Rational, Rational)], x: Rational) -> Option<Rational> {
    pairs.iter().find(|p| p.0 == x).map(|p| p.1)
}

/// Every order-preserving injection extending `base` onto the points `need`, images in `pool`.
fn extensions(base: &[(Rational, Rational)], need: &[Rational], pool: &[Rational]) -> Vec<Vec<(Rational, Rational)>> {
    let fresh: Vec<Rational> = need
        .iter()
        .copied()
        .filter(|&x| apply(base, x).is_none())
        .sorted()
        .dedup()
        .collect();
    let mut out = Vec::new();
    for images in pool.iter().copied().combinations(fresh.len()) {
        let mut pairs: Vec<(Rational, Rational)> = base.to_vec();
        pairs.extend(fresh.iter().copied().zip(images));
        pairs.sort();
        if pairs.iter().tuple_windows().all(|(p, q)| p.1 < q.1) {
            out.push(pairs);
        }
    }
    out
}

fn forall_relation(f: &PartialOrderMap, h: &PartialOrderMap, k: &PartialOrderMap, pool: &[Rational]) -> bool {
    let dom_k = k.domain();
    extensions(h.pairs(), &dom_k, pool).into_iter().all(|g2| {
        let mid: Vec<Rational> = dom_k.iter().map(|&x| apply(&g2, x).unwrap()).collect();
        extensions(f.pairs(), &mid, pool).into_iter().all(|g1| {
            k.pairs()
                .iter()
                .all(|&(x, y)| apply(&g1, apply(&g2, x).unwrap()) == Some(y))
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn groupoid_relation_matches_extension_semantics(
        support in prop::collection::btree_set((-6i64..6, 1i64..4), 0..=3)
    ) {
        let support: Vec<Rational> = support.into_iter().map(|(p, q)| Rational::new(p, q)).collect();
        let gd = rationals_groupoid(&support).unwrap();
        let m = groupoid_to_coarse(&gd).unwrap().structure;
        let pool = pool(gd.support());
        let maps = gd.elements();
        for f in 0..gd.len() {
            prop_assert_eq!(m.is_star_subgroup(f), maps[f].is_identity());
            for h in 0..gd.len() {
                prop_assert_eq!(m.leq(f, h).unwrap(), maps[f].extends(&maps[h]));
                for k in 0..gd.len() {
                    prop_assert_eq!(
                        m.relation(f, h, k),
                        forall_relation(&maps[f], &maps[h], &maps[k], &pool),
                        "R({}, {}, {})", maps[f], maps[h], maps[k]
                    );
                }
            }
        }
    }
}
