use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use coarse_core::axioms::{self, AxiomReport, CheckConfig, Checker};
use coarse_core::builders::rationals::{parse_rational, rationals_groupoid_bounded, Rational};
use coarse_core::builders::{coarse_of_group_bounded, coarse_of_tower_bounded, groupoid_to_coarse};
use coarse_core::filters::{filter_group, inverse_limit_reconstruct, reconstruct_check_bounded};
use coarse_core::formats::{read_input, CoarseFile, InputFile};
use coarse_core::iso::{self, conjugacy_check, ef_fingerprint, kns_check_bounded, struct_iso};
use coarse_core::stone::{self, stone_roundtrip, BinaryTree};
use coarse_core::{Bounds, CoarseStructure, Error, PermGroup, ProfiniteTower, Result};
use itertools::Itertools;
use serde_json::{json, Value};

use crate::{Command, GlobalOpts, Outcome};

/// Structures above this size get the structural identities only, not every axiom.
const OLIGO_AXIOM_LIMIT: usize = 300;
const DEFAULT_STONE_DEPTH: usize = 3;

fn bounds(opts: &GlobalOpts) -> Bounds {
    Bounds {
        max_subgroup_order: opts.max_group_order,
        ..Bounds::default()
    }
}

fn validate(opts: &GlobalOpts) -> Result<()> {
    let positive = [
        ("--max-group-order", Some(opts.max_group_order)),
        ("--arity", Some(opts.arity)),
        ("--roelcke-n", opts.roelcke_n),
        ("--depth", opts.depth),
    ];
    for (flag, v) in positive {
        if v == Some(0) {
            return Err(Error::Invalid(format!("{flag} must be positive")));
        }
    }
    Ok(())
}

fn to_value<T: serde::Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn load_group(path: &Path) -> Result<PermGroup> {
    match read_input(path)? {
        InputFile::Group(f) => f.build(Bounds::DEFAULT_MAX_GROUP_ORDER),
        InputFile::Tower(f) => Ok(load_tower_file(&f)?.top().clone()),
        other => Err(Error::Invalid(format!(
            "{}: expected a group file, found a {} file",
            path.display(),
            other.kind()
        ))),
    }
}

fn load_tower_file(f: &coarse_core::formats::TowerFile) -> Result<ProfiniteTower> {
    f.build(Bounds::DEFAULT_MAX_GROUP_ORDER)
}

/// Any group, tower or coarse file as a coarse structure.
fn load_structure(path: &Path, opts: &GlobalOpts) -> Result<CoarseStructure> {
    let b = bounds(opts);
    match read_input(path)? {
        InputFile::Group(f) => Ok(coarse_of_group_bounded(&f.build(b.max_group_order)?, &b)?.structure),
        InputFile::Tower(f) => Ok(coarse_of_tower_bounded(&load_tower_file(&f)?, &b)?.coarse.structure),
        InputFile::Coarse(f) => f.build(),
        InputFile::Tree(_) => Err(Error::Invalid(format!(
            "{}: a tree file has no coarse structure",
            path.display()
        ))),
    }
}

pub fn run(cmd: &Command, opts: &GlobalOpts) -> Result<Outcome> {
    validate(opts)?;
    match cmd {
        Command::Build { input } => build(input, opts),
        Command::Check {
            input,
            checkers,
            subgroup,
            k_max,
        } => check(input, checkers, *subgroup, *k_max, opts),
        Command::Reconstruct { input } => reconstruct(input, opts),
        Command::Iso { left, right } => iso_cmd(left, right, opts),
        Command::Kns { left, right } => kns(left, right, opts),
        Command::Conjugacy { left, right } => conjugacy(left, right, opts),
        Command::Stone { input, random } => stone_cmd(input.as_deref(), *random, opts),
        Command::Oligo { support, k_max } => oligo(support, *k_max, opts),
    }
}

fn build(input: &Path, opts: &GlobalOpts) -> Result<Outcome> {
    let m = match read_input(input)? {
        InputFile::Group(_) | InputFile::Tower(_) => load_structure(input, opts)?,
        other => {
            return Err(Error::Invalid(format!(
                "{}: build takes a group or tower file, found a {} file",
                input.display(),
                other.kind()
            )))
        }
    };
    let file = CoarseFile::from_structure(&m);
    let subgroups = m.subgroups();
    Ok(Outcome {
        json: to_value(&file)?,
        text: format!(
            "size: {}\ntriples: {}\n*subgroups: {}\n",
            m.size(),
            m.num_triples(),
            subgroups.len()
        ),
        dot: Some(m.hasse_dot()?),
        passed: true,
        bare: true,
    })
}

fn report_lines(reports: &[AxiomReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let _ = write!(out, "{:<24} {}", r.axiom_id, if r.holds { "holds" } else { "FAILS" });
        if let Some(c) = &r.clause {
            let _ = write!(out, "  clause {c}");
        }
        if let Some(w) = &r.witness {
            let _ = write!(out, "  witness {w:?}");
        }
        if let Some(d) = &r.detail {
            let _ = write!(out, "  ({d})");
        }
        out.push('\n');
    }
    out
}

fn check(input: &Path, names: &[String], subgroup: Option<usize>, k_max: usize, opts: &GlobalOpts) -> Result<Outcome> {
    let m = load_structure(input, opts)?;
    let selected: Vec<Checker> = if names.is_empty() {
        Checker::ALL.to_vec()
    } else {
        names.iter().map(|s| Checker::parse(s)).collect::<Result<_>>()?
    };
    if let Some(v) = subgroup {
        if v >= m.size() {
            return Err(Error::Invalid(format!(
                "--subgroup {v} is not an element of a size-{} structure",
                m.size()
            )));
        }
    }
    let cfg = CheckConfig {
        roelcke_n: opts.roelcke_n,
        k_max,
        subgroup,
    };
    let reports: Vec<AxiomReport> = selected.iter().map(|&c| axioms::check(&m, c, &cfg)).collect();
    Ok(Outcome {
        json: to_value(&reports)?,
        text: report_lines(&reports),
        dot: None,
        passed: reports.iter().all(|r| r.holds),
        bare: false,
    })
}

fn reconstruct(input: &Path, opts: &GlobalOpts) -> Result<Outcome> {
    let b = bounds(opts);
    match read_input(input)? {
        InputFile::Group(f) => {
            let g = f.build(b.max_group_order)?;
            let report = reconstruct_check_bounded(&g, &b)?;
            let m = coarse_of_group_bounded(&g, &b)?.structure;
            let fg = filter_group(&m)?;
            let text = format!(
                "group {} of order {}\nfilters: {}\nbijective: {}\nhomomorphism: {}\n",
                report.group, report.group_order, report.filters, report.bijective, report.homomorphism
            );
            Ok(Outcome {
                passed: report.holds,
                json: json!({
                    "kind": "group",
                    "report": report,
                    "filter_group": {
                        "filters": fg.filters,
                        "identity": fg.identity,
                        "inverse": fg.inverse,
                        "table": fg.table,
                    },
                }),
                text,
                dot: None,
                bare: false,
            })
        }
        InputFile::Tower(f) => {
            let t = load_tower_file(&f)?;
            let tc = coarse_of_tower_bounded(&t, &b)?;
            let limit = inverse_limit_reconstruct(&tc)?;
            let levels: Vec<usize> = limit.quotients.iter().map(|q| q.elements.len()).collect();
            let level_orders: Vec<usize> = t.levels().iter().map(PermGroup::order).collect();
            let levels_match = levels == level_orders;
            let text = format!(
                "tower of height {}\nquotient orders: {levels:?}\nlevel orders: {level_orders:?}\ninverse limit order: {}\nfilter group order: {}\n",
                t.height(),
                limit.order(),
                limit.filter_group_order
            );
            Ok(Outcome {
                passed: limit.holds && levels_match,
                json: json!({
                    "kind": "tower",
                    "level_orders": level_orders,
                    "quotient_orders": levels,
                    "report": limit,
                }),
                text,
                dot: None,
                bare: false,
            })
        }
        other => Err(Error::Invalid(format!(
            "{}: reconstruct takes a group or tower file, found a {} file",
            input.display(),
            other.kind()
        ))),
    }
}

fn iso_cmd(left: &Path, right: &Path, opts: &GlobalOpts) -> Result<Outcome> {
    let m = load_structure(left, opts)?;
    let n = load_structure(right, opts)?;
    let depth = opts.depth.unwrap_or(2);
    let fingerprints = [ef_fingerprint(&m, depth)?, ef_fingerprint(&n, depth)?];
    let witness = if m.size() == n.size() { struct_iso(&m, &n) } else { None };
    if let Some(f) = &witness {
        if !iso::is_struct_iso(&m, &n, f) {
            return Err(Error::Structural(format!("witness {f:?} fails verification")));
        }
    }
    if witness.is_some() && fingerprints[0] != fingerprints[1] {
        return Err(Error::Structural(
            "isomorphic structures with different fingerprints".into(),
        ));
    }
    let text = format!(
        "sizes: {} {}\nisomorphic: {}\n{}",
        m.size(),
        n.size(),
        witness.is_some(),
        witness
            .as_ref()
            .map(|w| format!("witness: {w:?}\n"))
            .unwrap_or_default()
    );
    Ok(Outcome {
        json: json!({
            "fingerprints": fingerprints,
            "isomorphic": witness.is_some(),
            "sizes": [m.size(), n.size()],
            "witness": witness,
        }),
        text,
        dot: None,
        passed: true,
        bare: false,
    })
}

fn kns(left: &Path, right: &Path, opts: &GlobalOpts) -> Result<Outcome> {
    let g = load_group(left)?;
    let h = load_group(right)?;
    let report = kns_check_bounded(&g, &h, &bounds(opts))?;
    let text = format!(
        "{} vs {}\ngroups isomorphic: {}\nstructures isomorphic: {}\n",
        report.left, report.right, report.groups_isomorphic, report.structures_isomorphic
    );
    Ok(Outcome {
        json: to_value(&report)?,
        text,
        dot: None,
        passed: true,
        bare: false,
    })
}

fn conjugacy(left: &Path, right: &Path, opts: &GlobalOpts) -> Result<Outcome> {
    let g = load_group(left)?;
    let h = load_group(right)?;
    let report = conjugacy_check(&g, &h, opts.arity)?;
    let e = [
        iso::orbit_structure(&g, opts.arity)?,
        iso::orbit_structure(&h, opts.arity)?,
    ];
    let text = format!(
        "degree {}, arity {}\nconjugate: {}\n{}checked {} permutations\n",
        report.degree,
        report.arity,
        report.conjugate,
        report
            .witness
            .as_ref()
            .map(|w| format!("witness: {w}\n"))
            .unwrap_or_default(),
        report.checked
    );
    Ok(Outcome {
        json: json!({ "orbit_structures": e, "report": report }),
        text,
        dot: None,
        passed: true,
        bare: false,
    })
}

fn stone_cmd(input: Option<&Path>, random: usize, opts: &GlobalOpts) -> Result<Outcome> {
    let trees: Vec<BinaryTree> = match input {
        Some(path) => match read_input(path)? {
            InputFile::Tree(t) => vec![t],
            other => {
                return Err(Error::Invalid(format!(
                    "{}: stone takes a tree file, found a {} file",
                    path.display(),
                    other.kind()
                )))
            }
        },
        None => {
            let depth = opts.depth.unwrap_or(DEFAULT_STONE_DEPTH);
            if depth > stone::MAX_DEPTH {
                return Err(Error::BoundExceeded {
                    what: "tree depth",
                    value: depth,
                    bound: stone::MAX_DEPTH,
                });
            }
            stone::seeded_trees(depth, random, opts.seed)
        }
    };
    let mut results = Vec::new();
    let mut text = String::new();
    let mut passed = true;
    for t in &trees {
        let depth = opts.depth.unwrap_or(t.depth_bound);
        if depth > t.depth_bound {
            return Err(Error::Invalid(format!(
                "--depth {depth} exceeds the tree's depth bound {}",
                t.depth_bound
            )));
        }
        let report = stone_roundtrip(t, depth)?;
        let ba = stone::clopen_algebra(t, depth)?;
        let generators: Vec<String> = ba.level_generators(depth).iter().map(|&x| ba.element_bits(x)).collect();
        passed &= report.holds;
        let _ = writeln!(
            text,
            "depth {}: {} nodes, {} atoms, {} elements, round trip {}",
            depth,
            report.nodes,
            report.atoms,
            report.elements,
            if report.holds { "holds" } else { "FAILS" }
        );
        results.push(json!({
            "algebra": { "atoms": ba.atoms, "generators": generators },
            "report": report,
            "tree": t,
        }));
    }
    Ok(Outcome {
        json: Value::Array(results),
        text,
        dot: None,
        passed,
        bare: false,
    })
}

fn parse_support(s: &str) -> Result<Vec<Rational>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(parse_rational)
        .collect()
}

/// Order types of `k`-tuples of `q`-subsets of an `m`-element chain.
fn order_types(m: usize, q: usize, k: usize) -> usize {
    let subsets: Vec<Vec<usize>> = (0..m).combinations(q).collect();
    let mut types = BTreeSet::new();
    for tuple in (0..k).map(|_| subsets.iter()).multi_cartesian_product() {
        let union: Vec<usize> = tuple.iter().flat_map(|s| s.iter().copied()).sorted().dedup().collect();
        let pattern: Vec<Vec<usize>> = tuple
            .iter()
            .map(|s| s.iter().map(|x| union.binary_search(x).expect("in union")).collect())
            .collect();
        types.insert(pattern);
    }
    types.len().max(usize::from(k == 0))
}

fn oligo(support: &str, k_max: usize, opts: &GlobalOpts) -> Result<Outcome> {
    let points = parse_support(support)?;
    let gd = rationals_groupoid_bounded(&points, &bounds(opts))?;
    let built = groupoid_to_coarse(&gd)?;
    let s = &built.structure;
    let maps = gd.elements();
    let n = gd.len();

    let mut failures: Vec<String> = Vec::new();
    for f in 0..n {
        if s.is_star_subgroup(f) != maps[f].is_identity() {
            failures.push(format!("*subgroup mismatch at {}", maps[f]));
        }
        if maps[s.diamond(f)?] != maps[f].inverse() {
            failures.push(format!("diamond of {} is not its inverse", maps[f]));
        }
        for h in 0..n {
            if s.leq(f, h)? != gd.below(f, h) {
                failures.push(format!("order mismatch on {} and {}", maps[f], maps[h]));
            }
            let composable = maps[f].domain() == maps[h].range();
            let expected = composable.then(|| gd.compose(f, h));
            if s.dot(f, h)? != expected {
                failures.push(format!("product of {} and {} is not composition", maps[f], maps[h]));
            }
        }
    }
    let subgroups = s.subgroups();
    let axiom_reports = (n <= OLIGO_AXIOM_LIMIT).then(|| {
        let cfg = CheckConfig {
            roelcke_n: opts.roelcke_n,
            k_max,
            subgroup: None,
        };
        axioms::check_all(s, &cfg)
    });

    let mut per_subgroup = Vec::new();
    for &v in &subgroups {
        let q = maps[v].len();
        let delta = axioms::check_delta(s, v);
        let mut oligo_counts = Vec::new();
        for k in 1..=k_max {
            let greedy = axioms::oligomorphic_family(s, v, k)?;
            let types = order_types(gd.support().len(), q, k);
            if greedy.as_ref().ok() != Some(&types) {
                failures.push(format!(
                    "V = {}, k = {k}: family {greedy:?}, {types} order types",
                    maps[v]
                ));
            }
            oligo_counts.push(json!({
                "k": k,
                "family": greedy.as_ref().ok(),
                "unreached": greedy.as_ref().err(),
                "order_types": types,
            }));
        }
        per_subgroup.push(json!({
            "delta": delta,
            "oligomorphic": oligo_counts,
            "subgroup": v,
            "map": maps[v],
        }));
    }

    failures.truncate(20);
    let mut text = format!(
        "support: {{{}}}\nelements: {n}\n*subgroups: {}\nidentities: {}\n",
        gd.support().iter().join(","),
        subgroups.len(),
        if failures.is_empty() { "hold" } else { "FAIL" }
    );
    match &axiom_reports {
        Some(r) => text.push_str(&report_lines(r)),
        None => {
            let _ = writeln!(text, "axiom checks skipped above {OLIGO_AXIOM_LIMIT} elements");
        }
    }
    for entry in &per_subgroup {
        let _ = writeln!(text, "V = {}: delta {}", entry["map"], entry["delta"]["holds"]);
    }

    Ok(Outcome {
        passed: failures.is_empty(),
        json: json!({
            "axioms": axiom_reports,
            "elements": n,
            "identity_failures": failures,
            "subgroups": per_subgroup,
            "support": gd.support().iter().map(ToString::to_string).collect::<Vec<_>>(),
            "triples": s.num_triples(),
        }),
        text,
        dot: None,
        bare: false,
    })
}
