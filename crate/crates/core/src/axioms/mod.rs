//! Exhaustive decision procedures for the coarse-group axioms and the
//! first-order conditions built on them.
//!
//! Every checker scans its quantifier domain in ascending index order and stops
//! at the first violation, so witnesses are lexicographically least. A witness
//! can be re-evaluated against the bare relation with [`replay`].

use std::fmt;
use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;
use itertools::Itertools;
use serde::Serialize;

use crate::coarse::{CoarseStructure, CosetId, Order};
use crate::error::{Error, Result};

pub mod formulas;

pub use formulas::Formulas;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Checker {
    Basic,
    CosetPartition,
    Monotone,
    CosetRestriction,
    Inverses,
    Products,
    NegativeSubset,
    Roelcke,
    AssocFirstorder,
    Profinite,
    Delta,
    FormallyOligomorphic,
    StrongContinuity,
    OrderSides,
}

impl Checker {
    pub const ALL: [Checker; 14] = [
        Checker::Basic,
        Checker::CosetPartition,
        Checker::Monotone,
        Checker::CosetRestriction,
        Checker::Inverses,
        Checker::Products,
        Checker::NegativeSubset,
        Checker::Roelcke,
        Checker::AssocFirstorder,
        Checker::Profinite,
        Checker::Delta,
        Checker::FormallyOligomorphic,
        Checker::StrongContinuity,
        Checker::OrderSides,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Checker::Basic => "basic",
            Checker::CosetPartition => "coset_partition",
            Checker::Monotone => "monotone",
            Checker::CosetRestriction => "coset_restriction",
            Checker::Inverses => "inverses",
            Checker::Products => "products",
            Checker::NegativeSubset => "negative_subset",
            Checker::Roelcke => "roelcke",
            Checker::AssocFirstorder => "assoc_firstorder",
            Checker::Profinite => "profinite",
            Checker::Delta => "delta",
            Checker::FormallyOligomorphic => "formally_oligomorphic",
            Checker::StrongContinuity => "strong_continuity",
            Checker::OrderSides => "order_sides",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Checker::ALL
            .into_iter()
            .find(|c| c.id() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown checker {s:?}")))
    }

    /// Checkers that take a *subgroup parameter.
    pub fn is_parametrized(self) -> bool {
        matches!(
            self,
            Checker::Delta | Checker::FormallyOligomorphic | Checker::StrongContinuity
        )
    }
}

impl fmt::Display for Checker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Parameters for the checkers that need them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CheckConfig {
    /// Longest tuple tried by the Roelcke checker; `None` means the largest `|LC(V)|`.
    pub roelcke_n: Option<usize>,
    /// Largest tuple length for the formally-oligomorphic search.
    pub k_max: usize,
    /// The *subgroup for parametrized checkers; `None` means the minimum *subgroup.
    pub subgroup: Option<CosetId>,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            roelcke_n: None,
            k_max: 2,
            subgroup: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub axiom_id: String,
    pub holds: bool,
    /// The clause that failed.
    pub clause: Option<String>,
    pub witness: Option<Vec<usize>>,
    pub detail: Option<String>,
    #[serde(skip)]
    pub elapsed: Duration,
}

enum Outcome {
    Holds(Option<String>),
    Fails {
        clause: &'static str,
        witness: Vec<usize>,
        detail: Option<String>,
    },
}

fn fail(clause: &'static str, witness: Vec<usize>) -> Outcome {
    Outcome::Fails {
        clause,
        witness,
        detail: None,
    }
}

/// A structural error met mid-check, as a failure of the clause it names.
fn error_outcome(e: Error) -> Outcome {
    let (clause, witness) = match e {
        Error::NoMaximum { element, .. } => ("0(b)", vec![element]),
        Error::NoInverse(a) | Error::NonUniqueInverse(a) => ("4(a)", vec![a]),
        _ => ("0(b)", vec![]),
    };
    Outcome::Fails {
        clause,
        witness,
        detail: Some(format!("precondition: {e}")),
    }
}

fn timed(id: &str, f: impl FnOnce() -> Outcome) -> AxiomReport {
    let start = Instant::now();
    let outcome = f();
    let elapsed = start.elapsed();
    match outcome {
        Outcome::Holds(detail) => AxiomReport {
            axiom_id: id.to_string(),
            holds: true,
            clause: None,
            witness: None,
            detail,
            elapsed,
        },
        Outcome::Fails {
            clause,
            witness,
            detail,
        } => AxiomReport {
            axiom_id: id.to_string(),
            holds: false,
            clause: Some(clause.to_string()),
            witness: Some(witness),
            detail,
            elapsed,
        },
    }
}

/// Cached lookups shared by the checkers; requires Axiom 0(b).
struct Ctx<'a> {
    m: &'a CoarseStructure,
    order: &'a Order,
    subs: Vec<CosetId>,
    lc: Vec<CosetId>,
    rc: Vec<CosetId>,
    lc_lists: Vec<Vec<CosetId>>,
    rc_lists: Vec<Vec<CosetId>>,
}

impl<'a> Ctx<'a> {
    fn new(m: &'a CoarseStructure) -> std::result::Result<Self, Outcome> {
        let precondition = error_outcome;
        let n = m.size();
        let mut lc = Vec::with_capacity(n);
        let mut rc = Vec::with_capacity(n);
        for a in 0..n {
            lc.push(m.lc_of(a).map_err(precondition)?);
            rc.push(m.rc_of(a).map_err(precondition)?);
        }
        let order = m.order().map_err(precondition)?;
        let mut lc_lists = vec![Vec::new(); n];
        let mut rc_lists = vec![Vec::new(); n];
        for a in 0..n {
            lc_lists[lc[a]].push(a);
            rc_lists[rc[a]].push(a);
        }
        Ok(Ctx {
            m,
            order,
            subs: m.subgroups(),
            lc,
            rc,
            lc_lists,
            rc_lists,
        })
    }

    fn n(&self) -> usize {
        self.m.size()
    }

    fn leq(&self, a: CosetId, b: CosetId) -> bool {
        self.order.leq(a, b)
    }

    fn lists(&self, right: bool) -> &[Vec<CosetId>] {
        if right {
            &self.rc_lists
        } else {
            &self.lc_lists
        }
    }
}

fn with_ctx(m: &CoarseStructure, f: impl FnOnce(&Ctx) -> Outcome) -> Outcome {
    match Ctx::new(m) {
        Ok(ctx) => f(&ctx),
        Err(outcome) => outcome,
    }
}

/// Runs one checker.
pub fn check(m: &CoarseStructure, checker: Checker, cfg: &CheckConfig) -> AxiomReport {
    match checker {
        Checker::Basic => check_basic(m),
        Checker::CosetPartition => check_coset_partition(m),
        Checker::Monotone => check_monotone(m),
        Checker::CosetRestriction => check_coset_restriction(m),
        Checker::Inverses => check_inverses(m),
        Checker::Products => check_products(m),
        Checker::NegativeSubset => check_negative_subset(m),
        Checker::Roelcke => check_roelcke(m, cfg.roelcke_n),
        Checker::AssocFirstorder => check_assoc_firstorder(m),
        Checker::Profinite => check_profinite_condition(m),
        Checker::Delta => with_default_subgroup(m, checker, cfg, check_delta),
        Checker::FormallyOligomorphic => {
            with_default_subgroup(m, checker, cfg, |m, v| check_formally_oligomorphic(m, v, cfg.k_max))
        }
        Checker::StrongContinuity => with_default_subgroup(m, checker, cfg, check_strong_continuity),
        Checker::OrderSides => check_order_sides(m),
    }
}

fn with_default_subgroup(
    m: &CoarseStructure,
    checker: Checker,
    cfg: &CheckConfig,
    f: impl FnOnce(&CoarseStructure, CosetId) -> AxiomReport,
) -> AxiomReport {
    match cfg.subgroup.map(Ok).unwrap_or_else(|| m.minimum_subgroup()) {
        Ok(v) => f(m, v),
        Err(Error::NoMinimumSubgroup) => timed(checker.id(), || {
            let subs = m.subgroups();
            let minimal = subs
                .iter()
                .copied()
                .filter(|&x| subs.iter().all(|&u| u == x || !m.sub_order(u, x)))
                .collect();
            Outcome::Fails {
                clause: "minimum *subgroup",
                witness: minimal,
                detail: Some("no *subgroup lies below all others; witness lists the minimal ones".into()),
            }
        }),
        Err(e) => timed(checker.id(), || error_outcome(e)),
    }
}

/// Runs every checker in [`Checker::ALL`] order.
pub fn check_all(m: &CoarseStructure, cfg: &CheckConfig) -> Vec<AxiomReport> {
    Checker::ALL.iter().map(|&c| check(m, c, cfg)).collect()
}

/// Axiom 0: the *subgroup order is a partial order with meets (a), every element
/// has a left and a right *subgroup (b), and `⊑` is a partial order extending
/// the *subgroup order (c).
pub fn check_basic(m: &CoarseStructure) -> AxiomReport {
    timed("basic", || {
        let subs = m.subgroups();
        for &u in &subs {
            for &v in &subs {
                if u != v && m.sub_order(u, v) && m.sub_order(v, u) {
                    return fail("0(a) antisymmetry", vec![u, v]);
                }
            }
        }
        for &u in &subs {
            for &v in &subs {
                if !m.sub_order(u, v) {
                    continue;
                }
                for &w in &subs {
                    if m.sub_order(v, w) && !m.sub_order(u, w) {
                        return fail("0(a) transitivity", vec![u, v, w]);
                    }
                }
            }
        }
        for &u in &subs {
            for &v in &subs {
                if m.meet(u, v).is_err() {
                    return fail("0(a) meet", vec![u, v]);
                }
            }
        }
        let ctx = match Ctx::new(m) {
            Ok(ctx) => ctx,
            Err(Outcome::Fails { witness, .. }) => return fail("0(b)", witness),
            Err(other) => return other,
        };
        let n = ctx.n();
        for a in 0..n {
            if !ctx.leq(a, a) {
                return fail("0(c) reflexivity", vec![a]);
            }
        }
        for a in 0..n {
            for b in ctx.order.up(a).ones() {
                if a != b && ctx.leq(b, a) {
                    return fail("0(c) antisymmetry", vec![a, b]);
                }
            }
        }
        for a in 0..n {
            for b in ctx.order.up(a).ones() {
                if !ctx.order.up(b).is_subset(ctx.order.up(a)) {
                    let c = ctx.order.up(b).difference(ctx.order.up(a)).next().expect("non-empty");
                    return fail("0(c) transitivity", vec![a, b, c]);
                }
            }
        }
        for &u in &subs {
            for &v in &subs {
                if ctx.leq(u, v) != m.sub_order(u, v) {
                    return fail("0(c) extension", vec![u, v]);
                }
            }
        }
        Outcome::Holds(None)
    })
}

/// Axiom 1: for `U' ⊑ U` and `A' ∈ LC(U')`, some `A ∈ LC(U)` lies above `A'` (a),
/// and every `A ∈ LC(U)` is above `A'` or disjoint from it (b); then the same
/// for right *cosets, with `⊑` as defined from left *cosets.
pub fn check_coset_partition(m: &CoarseStructure) -> AxiomReport {
    timed("coset_partition", || {
        with_ctx(m, |ctx| {
            for (right, clause_a, clause_b) in [(false, "1(a) left", "1(b) left"), (true, "1(a) right", "1(b) right")] {
                let lists = ctx.lists(right);
                for &u1 in &ctx.subs {
                    for &u in &ctx.subs {
                        if !m.sub_order(u1, u) {
                            continue;
                        }
                        for &a1 in &lists[u1] {
                            if !lists[u].iter().any(|&a| ctx.leq(a1, a)) {
                                return fail(clause_a, vec![u1, u, a1]);
                            }
                            for &a in &lists[u] {
                                if !ctx.leq(a1, a) && !m.disjoint(a1, a) {
                                    return fail(clause_b, vec![u1, u, a1, a]);
                                }
                            }
                        }
                    }
                }
            }
            Outcome::Holds(None)
        })
    })
}

/// Axiom 2: `B0 B1 ⊑ C` and `A_i ⊑ B_i` imply `A0 A1 ⊑ C`.
/// Witness order: `(A0, A1, B0, B1, C)`.
pub fn check_monotone(m: &CoarseStructure) -> AxiomReport {
    timed("monotone", || {
        with_ctx(m, |ctx| {
            let n = ctx.n();
            for a0 in 0..n {
                for a1 in 0..n {
                    let have = m.tops(a0, a1);
                    for b0 in ctx.order.up(a0).ones() {
                        for b1 in ctx.order.up(a1).ones() {
                            if let Some(c) = m.tops(b0, b1).difference(have).next() {
                                return fail("2", vec![a0, a1, b0, b1, c]);
                            }
                        }
                    }
                }
            }
            Outcome::Holds(None)
        })
    })
}

/// Axiom 3: for `B ∈ LC(V)`, `U ⊑ V` iff some `A ∈ LC(U)` has `A ⊑ B`; also for right *cosets.
/// Witness order: `(U, V, B)`.
pub fn check_coset_restriction(m: &CoarseStructure) -> AxiomReport {
    timed("coset_restriction", || {
        with_ctx(m, |ctx| {
            for (right, clause) in [(false, "3 left"), (true, "3 right")] {
                let lists = ctx.lists(right);
                for &u in &ctx.subs {
                    for &v in &ctx.subs {
                        for &b in &lists[v] {
                            let below = lists[u].iter().any(|&a| ctx.leq(a, b));
                            if m.sub_order(u, v) != below {
                                return fail(clause, vec![u, v, b]);
                            }
                        }
                    }
                }
            }
            Outcome::Holds(None)
        })
    })
}

fn inverse_candidates(ctx: &Ctx, a: CosetId) -> Vec<CosetId> {
    let v = ctx.rc[a];
    ctx.lc_lists[v]
        .iter()
        .copied()
        .filter(|&b| ctx.m.relation(a, b, v))
        .collect()
}

fn s_rel(ctx: &Ctx, a: CosetId, b: CosetId) -> bool {
    ctx.rc[a] == ctx.lc[b] && ctx.m.relation(a, b, ctx.rc[a])
}

/// Axiom 4: a unique `B` with `S(A, B)` (a), `S` symmetric (b), and `⋄` an
/// order isomorphism (c).
pub fn check_inverses(m: &CoarseStructure) -> AxiomReport {
    timed("inverses", || {
        with_ctx(m, |ctx| {
            let n = ctx.n();
            let mut dia = Vec::with_capacity(n);
            for a in 0..n {
                match inverse_candidates(ctx, a).as_slice() {
                    [b] => dia.push(*b),
                    _ => return fail("4(a)", vec![a]),
                }
            }
            for a in 0..n {
                for b in 0..n {
                    if s_rel(ctx, a, b) != s_rel(ctx, b, a) {
                        return fail("4(b)", vec![a, b]);
                    }
                }
            }
            for a in 0..n {
                for b in 0..n {
                    if ctx.leq(a, b) != ctx.leq(dia[a], dia[b]) {
                        return fail("4(c)", vec![a, b]);
                    }
                }
            }
            Outcome::Holds(None)
        })
    })
}

/// The least element of `tops(A, B)` under `⊑`, if any.
fn least_top(ctx: &Ctx, a: CosetId, b: CosetId) -> Option<CosetId> {
    let tops = ctx.m.tops(a, b);
    tops.ones().find(|&c| tops.is_subset(ctx.order.up(c)))
}

fn product_ok(ctx: &Ctx, a: CosetId, b: CosetId) -> bool {
    match least_top(ctx, a, b) {
        Some(c) => ctx.rc[c] == ctx.rc[a] && ctx.lc[c] == ctx.lc[b],
        None => false,
    }
}

/// Axiom 5: for `A ∈ RC(U) ∩ LC(V)` and `B ∈ RC(V) ∩ LC(W)` the least `C` with
/// `AB ⊑ C` exists and lies in `RC(U) ∩ LC(W)`.
pub fn check_products(m: &CoarseStructure) -> AxiomReport {
    timed("products", || {
        with_ctx(m, |ctx| {
            let n = ctx.n();
            let mut composable = 0usize;
            for a in 0..n {
                for b in 0..n {
                    if ctx.lc[a] != ctx.rc[b] {
                        continue;
                    }
                    composable += 1;
                    if !product_ok(ctx, a, b) {
                        return fail("5", vec![a, b]);
                    }
                }
            }
            Outcome::Holds(Some(format!("{composable} composable pairs")))
        })
    })
}

/// Axiom 7: `AB ⊑ C` iff no `D ⊑ A`, `E ⊑ B`, `F` with `DE ⊑ F` and `C`, `F`
/// disjoint (a); `A ⊑ B` iff no `C ⊑ A` is disjoint from `B` (b).
pub fn check_negative_subset(m: &CoarseStructure) -> AxiomReport {
    timed("negative_subset", || {
        with_ctx(m, |ctx| {
            let f = match Formulas::new(m) {
                Ok(f) => f,
                Err(e) => return error_outcome(e),
            };
            let n = ctx.n();
            for a in 0..n {
                for b in 0..n {
                    let dt = f.down_tops(a, b);
                    for c in 0..n {
                        if m.relation(a, b, c) != dt.is_subset(m.overlapping(c)) {
                            return fail("7(a)", vec![a, b, c]);
                        }
                    }
                }
            }
            for a in 0..n {
                for b in 0..n {
                    if ctx.leq(a, b) != ctx.order.down(a).is_subset(m.overlapping(b)) {
                        return fail("7(b)", vec![a, b]);
                    }
                }
            }
            Outcome::Holds(None)
        })
    })
}

/// Default tuple bound for the Roelcke checker: the largest `|LC(V)|`.
pub fn default_roelcke_n(m: &CoarseStructure) -> usize {
    m.subgroups().into_iter().map(|v| m.lc_list(v).len()).max().unwrap_or(1)
}

/// The Roelcke axiom: whenever `θ_n(A_0..A_{n-1}, V)` holds for left *cosets
/// of `V`, some *subgroup `U` has `V A_i ⊑ U` for all `i` and `ψ_n(A_0..A_{n-1}, U, V)`.
///
/// Tuples are taken as sets (repetition and order do not change either formula),
/// of size `1..=n_max`. Witness: `V` followed by the tuple.
pub fn check_roelcke(m: &CoarseStructure, n_max: Option<usize>) -> AxiomReport {
    timed("roelcke", || {
        with_ctx(m, |ctx| {
            let f = match Formulas::new(m) {
                Ok(f) => f,
                Err(e) => return error_outcome(e),
            };
            let n_max = n_max.unwrap_or_else(|| default_roelcke_n(m)).max(1);
            let mut instances = 0usize;
            for &v in &ctx.subs {
                let lc = &ctx.lc_lists[v];
                for k in 1..=n_max.min(lc.len()) {
                    for tuple in lc.iter().copied().combinations(k) {
                        match f.theta(&tuple, v) {
                            Ok(false) => continue,
                            Ok(true) => {}
                            Err(e) => return error_outcome(e),
                        }
                        instances += 1;
                        let found = ctx
                            .subs
                            .iter()
                            .any(|&u| tuple.iter().all(|&a| m.relation(v, a, u)) && f.psi(&tuple, u, v));
                        if !found {
                            let mut w = vec![v];
                            w.extend(tuple);
                            return fail("roelcke", w);
                        }
                    }
                }
            }
            Outcome::Holds(Some(format!("n_max={n_max}, {instances} instances of theta")))
        })
    })
}

/// `(A·B)·C = A·(B·C)` whenever `lc(A) = rc(B)` and `lc(B) = rc(C)`.
pub fn check_assoc_firstorder(m: &CoarseStructure) -> AxiomReport {
    timed("assoc_firstorder", || {
        with_ctx(m, |ctx| {
            let n = ctx.n();
            let dot = |a: CosetId, b: CosetId| -> Option<CosetId> {
                if ctx.lc[a] != ctx.rc[b] {
                    return None;
                }
                least_top(ctx, a, b)
            };
            for a in 0..n {
                for b in 0..n {
                    if ctx.lc[a] != ctx.rc[b] {
                        continue;
                    }
                    for c in 0..n {
                        if ctx.lc[b] != ctx.rc[c] {
                            continue;
                        }
                        let left = dot(a, b).and_then(|ab| dot(ab, c));
                        let right = dot(b, c).and_then(|bc| dot(a, bc));
                        if left.is_none() || left != right {
                            return fail("assoc", vec![a, b, c]);
                        }
                    }
                }
            }
            Outcome::Holds(None)
        })
    })
}

/// Every *subgroup contains a normal one (and every `LC(U)` is finite, which is automatic here).
pub fn check_profinite_condition(m: &CoarseStructure) -> AxiomReport {
    timed("profinite", || {
        with_ctx(m, |ctx| {
            let normal: Vec<bool> = (0..ctx.n())
                .map(|u| m.is_star_subgroup(u) && ctx.lc_lists[u] == ctx.rc_lists[u])
                .collect();
            for &u in &ctx.subs {
                if !ctx.subs.iter().any(|&v| normal[v] && m.sub_order(v, u)) {
                    return fail("profinite", vec![u]);
                }
            }
            let count = normal.iter().filter(|&&x| x).count();
            Outcome::Holds(Some(format!("{count} normal *subgroups")))
        })
    })
}

fn require_subgroup(m: &CoarseStructure, w: CosetId) -> Option<Outcome> {
    if w >= m.size() || !m.is_star_subgroup(w) {
        return Some(Outcome::Fails {
            clause: "precondition",
            witness: vec![w],
            detail: Some(format!("{w} is not a *subgroup")),
        });
    }
    None
}

/// Elements `A'` that move some left *coset of `W`: `A'C ⊑ D` with `C ≠ D` in `LC(W)`.
fn movers(ctx: &Ctx, w: CosetId) -> FixedBitSet {
    let lcw = &ctx.lc_lists[w];
    let mut mask = FixedBitSet::with_capacity(ctx.n());
    mask.extend(lcw.iter().copied());
    let mut out = FixedBitSet::with_capacity(ctx.n());
    for a in 0..ctx.n() {
        let moves = lcw.iter().any(|&c| {
            let mut t = ctx.m.tops(a, c).clone();
            t.intersect_with(&mask);
            t.set(c, false);
            t.count_ones(..) > 0
        });
        out.set(a, moves);
    }
    out
}

/// `δ(W)`: for all `U` and `A ∈ LC(U) \ {U}` there is `U' ⊑ U` such that every
/// `A' ⊑ A` in `LC(U')` moves some left *coset of `W`. Witness: `(U, A)`.
pub fn check_delta(m: &CoarseStructure, w: CosetId) -> AxiomReport {
    timed("delta", || {
        if let Some(o) = require_subgroup(m, w) {
            return o;
        }
        with_ctx(m, |ctx| {
            let mv = movers(ctx, w);
            for &u in &ctx.subs {
                for &a in ctx.lc_lists[u].iter().filter(|&&a| a != u) {
                    let ok = ctx.subs.iter().any(|&u1| {
                        m.sub_order(u1, u)
                            && ctx.lc_lists[u1]
                                .iter()
                                .filter(|&&a1| ctx.leq(a1, a))
                                .all(|&a1| mv.contains(a1))
                    });
                    if !ok {
                        return fail("delta", vec![u, a]);
                    }
                }
            }
            Outcome::Holds(Some(format!("W={w}")))
        })
    })
}

/// For `k`-tuples of `LC(V)`: which tuples `B` reach which tuples `C`, i.e.
/// some `S` has `S B_j ⊑ C_j` for every `j`. Tuples are numbered in base `|LC(V)|`.
fn reach_sets(ctx: &Ctx, v: CosetId, k: usize) -> Vec<FixedBitSet> {
    let lcv = &ctx.lc_lists[v];
    let l = lcv.len();
    let total = l.pow(k as u32);
    let mut reach = vec![FixedBitSet::with_capacity(total); total];
    let pos = |c: CosetId| lcv.binary_search(&c).ok();
    let mut digits = vec![0usize; k];
    for (t, row) in reach.iter_mut().enumerate() {
        let mut x = t;
        for d in digits.iter_mut().rev() {
            *d = x % l;
            x /= l;
        }
        for s in 0..ctx.n() {
            let targets: Vec<Vec<usize>> = digits
                .iter()
                .map(|&d| ctx.m.tops(s, lcv[d]).ones().filter_map(pos).collect())
                .collect();
            if targets.iter().any(Vec::is_empty) {
                continue;
            }
            for combo in targets.iter().map(|v| v.iter().copied()).multi_cartesian_product() {
                row.insert(combo.iter().fold(0, |acc, &d| acc * l + d));
            }
        }
    }
    reach
}

/// Size of a greedily chosen family of `k`-tuples of `LC(V)` that every
/// `k`-tuple reaches, or the first tuple that reaches nothing.
pub fn oligomorphic_family(
    m: &CoarseStructure,
    v: CosetId,
    k: usize,
) -> Result<std::result::Result<usize, Vec<CosetId>>> {
    let ctx = Ctx::new(m).map_err(|_| m.first_coset_failure().unwrap_or(Error::NoMinimumSubgroup))?;
    if !m.is_star_subgroup(v) {
        return Err(Error::NotSubgroup(v));
    }
    Ok(greedy_family(&ctx, v, k))
}

fn greedy_family(ctx: &Ctx, v: CosetId, k: usize) -> std::result::Result<usize, Vec<CosetId>> {
    let lcv = &ctx.lc_lists[v];
    let l = lcv.len();
    let reach = reach_sets(ctx, v, k);
    let total = reach.len();
    let decode = |mut t: usize| {
        let mut out = vec![0; k];
        for d in out.iter_mut().rev() {
            *d = lcv[t % l];
            t /= l;
        }
        out
    };
    if let Some(t) = (0..total).find(|&t| reach[t].count_ones(..) == 0) {
        return Err(decode(t));
    }
    // covers[c] = tuples that reach c
    let mut covers = vec![FixedBitSet::with_capacity(total); total];
    for (b, row) in reach.iter().enumerate() {
        for c in row.ones() {
            covers[c].insert(b);
        }
    }
    let mut uncovered = FixedBitSet::with_capacity(total);
    uncovered.insert_range(..);
    let mut chosen = 0;
    while uncovered.count_ones(..) > 0 {
        let best = (0..total)
            .max_by_key(|&c| (covers[c].intersection(&uncovered).count(), std::cmp::Reverse(c)))
            .expect("non-empty");
        uncovered.difference_with(&covers[best]);
        chosen += 1;
    }
    Ok(chosen)
}

/// Formal oligomorphicity of `γ_V` up to tuple length `k_max`: for each `k`, a
/// finite family of `k`-tuples such that every `k`-tuple is moved into it by a
/// single `S`. The reported `n` is the size of a greedily chosen family.
pub fn check_formally_oligomorphic(m: &CoarseStructure, v: CosetId, k_max: usize) -> AxiomReport {
    timed("formally_oligomorphic", || {
        if let Some(o) = require_subgroup(m, v) {
            return o;
        }
        with_ctx(m, |ctx| {
            let mut parts = vec![format!("V={v}")];
            for k in 1..=k_max.max(1) {
                match greedy_family(ctx, v, k) {
                    Ok(n) => parts.push(format!("k={k}: n={n}")),
                    Err(tuple) => {
                        return Outcome::Fails {
                            clause: "formally_oligomorphic",
                            witness: tuple,
                            detail: Some(format!("k={k}: tuple reaches no tuple")),
                        }
                    }
                }
            }
            Outcome::Holds(Some(parts.join(", ")))
        })
    })
}

/// Smallest set `B ⊆ LC(V)` such that every `S` with `S B_i ⊑ B_i` for all `i`
/// satisfies `S ⊑ U`. The empty set qualifies when every element is below `U`.
pub fn continuity_witness(m: &CoarseStructure, v: CosetId, u: CosetId) -> Result<Option<Vec<CosetId>>> {
    let ctx = Ctx::new(m).map_err(|_| m.first_coset_failure().unwrap_or(Error::NoMinimumSubgroup))?;
    for x in [v, u] {
        if !m.is_star_subgroup(x) {
            return Err(Error::NotSubgroup(x));
        }
    }
    Ok(min_continuity_set(&ctx, v, u))
}

fn fixers(ctx: &Ctx, v: CosetId) -> Vec<FixedBitSet> {
    let lcv = &ctx.lc_lists[v];
    (0..ctx.n())
        .map(|s| {
            let mut fixed = FixedBitSet::with_capacity(lcv.len());
            for (i, &b) in lcv.iter().enumerate() {
                fixed.set(i, ctx.m.relation(s, b, b));
            }
            fixed
        })
        .collect()
}

fn set_works(ctx: &Ctx, fix: &[FixedBitSet], u: CosetId, chosen: &FixedBitSet) -> bool {
    (0..ctx.n()).all(|s| !chosen.is_subset(&fix[s]) || ctx.leq(s, u))
}

fn min_continuity_set(ctx: &Ctx, v: CosetId, u: CosetId) -> Option<Vec<CosetId>> {
    let lcv = &ctx.lc_lists[v];
    let fix = fixers(ctx, v);
    let mut all = FixedBitSet::with_capacity(lcv.len());
    all.insert_range(..);
    // Larger sets constrain more, so if the whole of LC(V) fails nothing works.
    if !set_works(ctx, &fix, u, &all) {
        return None;
    }
    for k in 0..=lcv.len() {
        for combo in (0..lcv.len()).combinations(k) {
            let mut chosen = FixedBitSet::with_capacity(lcv.len());
            chosen.extend(combo.iter().copied());
            if set_works(ctx, &fix, u, &chosen) {
                return Some(combo.into_iter().map(|i| lcv[i]).collect());
            }
        }
    }
    unreachable!("the full set works")
}

/// Strong continuity of `γ_V`: every *subgroup `U` has a finite `B ⊆ LC(V)` with
/// `⋀_i [S B_i ⊑ B_i] → S ⊑ U` for all `S`. Witness: the first `U` without one.
pub fn check_strong_continuity(m: &CoarseStructure, v: CosetId) -> AxiomReport {
    timed("strong_continuity", || {
        if let Some(o) = require_subgroup(m, v) {
            return o;
        }
        with_ctx(m, |ctx| {
            let mut sizes = Vec::new();
            for &u in &ctx.subs {
                match min_continuity_set(ctx, v, u) {
                    Some(set) => sizes.push(format!("{u}:{}", set.len())),
                    None => {
                        return Outcome::Fails {
                            clause: "strong_continuity",
                            witness: vec![u],
                            detail: Some(format!("V={v}")),
                        }
                    }
                }
            }
            Outcome::Holds(Some(format!("V={v}, minimal tuple length per U: {}", sizes.join(" "))))
        })
    })
}

/// Compares `A·lc(A) ⊑ B` with the right-handed `rc(A)·A ⊑ B`.
pub fn check_order_sides(m: &CoarseStructure) -> AxiomReport {
    timed("order_sides", || {
        with_ctx(m, |ctx| {
            let n = ctx.n();
            for a in 0..n {
                for b in 0..n {
                    if ctx.leq(a, b) != m.relation(ctx.rc[a], a, b) {
                        return fail("order_sides", vec![a, b]);
                    }
                }
            }
            Outcome::Holds(None)
        })
    })
}

/// Re-evaluates a failing report's clause on its witness directly from the
/// relation. Returns `true` if the violation is reproduced.
pub fn replay(m: &CoarseStructure, report: &AxiomReport, cfg: &CheckConfig) -> Result<bool> {
    let (Some(clause), Some(w)) = (report.clause.as_deref(), report.witness.as_deref()) else {
        return Ok(false);
    };
    let r = |a, b, c| m.relation(a, b, c);
    let star = |a| m.is_star_subgroup(a);
    let sub = |u, v| r(u, v, v);
    // Literal definitions, recomputed here rather than read from caches.
    let left_max = |a: usize| -> Option<usize> {
        let cands: Vec<usize> = (0..m.size()).filter(|&u| star(u) && r(a, u, a)).collect();
        cands.iter().copied().find(|&x| cands.iter().all(|&u| sub(u, x)))
    };
    let right_max = |a: usize| -> Option<usize> {
        let cands: Vec<usize> = (0..m.size()).filter(|&u| star(u) && r(u, a, a)).collect();
        cands.iter().copied().find(|&x| cands.iter().all(|&u| sub(u, x)))
    };
    let leq = |a: usize, b: usize| left_max(a).is_some_and(|u| r(a, u, b));
    let lc_list = |u: usize| (0..m.size()).filter(move |&a| left_max(a) == Some(u));
    let rc_list = |u: usize| (0..m.size()).filter(move |&a| right_max(a) == Some(u));
    let n = m.size();
    let disjoint = |a: usize, b: usize| !(0..n).any(|c| (0..n).any(|d| r(c, d, a) && r(c, d, b)));
    let s_rel = |a: usize, b: usize| match (right_max(a), left_max(b)) {
        (Some(v), Some(v2)) => v == v2 && r(a, b, v),
        _ => false,
    };
    let least = |a: usize, b: usize| -> Option<usize> {
        let tops: Vec<usize> = (0..n).filter(|&c| r(a, b, c)).collect();
        tops.iter().copied().find(|&c| tops.iter().all(|&d| leq(c, d)))
    };
    let dot = |a: usize, b: usize| -> Option<usize> {
        if left_max(a).is_some() && left_max(a) == right_max(b) {
            least(a, b)
        } else {
            None
        }
    };
    let diamond = |a: usize| -> Vec<usize> { (0..n).filter(|&b| s_rel(a, b)).collect() };
    let out = match (clause, w) {
        ("0(a) antisymmetry", &[u, v]) => u != v && sub(u, v) && sub(v, u),
        ("0(a) transitivity", &[u, v, x]) => sub(u, v) && sub(v, x) && !sub(u, x),
        ("0(a) meet", &[u, v]) => {
            let lower: Vec<usize> = (0..n).filter(|&x| star(x) && sub(x, u) && sub(x, v)).collect();
            !lower.iter().any(|&x| lower.iter().all(|&y| sub(y, x)))
        }
        ("0(b)", &[a]) => left_max(a).is_none() || right_max(a).is_none(),
        ("0(c) reflexivity", &[a]) => !leq(a, a),
        ("0(c) antisymmetry", &[a, b]) => a != b && leq(a, b) && leq(b, a),
        ("0(c) transitivity", &[a, b, c]) => leq(a, b) && leq(b, c) && !leq(a, c),
        ("0(c) extension", &[u, v]) => leq(u, v) != sub(u, v),
        ("1(a) left", &[u1, u, a1]) => sub(u1, u) && left_max(a1) == Some(u1) && !lc_list(u).any(|a| leq(a1, a)),
        ("1(a) right", &[u1, u, a1]) => sub(u1, u) && right_max(a1) == Some(u1) && !rc_list(u).any(|a| leq(a1, a)),
        ("1(b) left", &[u1, u, a1, a]) => {
            sub(u1, u) && left_max(a1) == Some(u1) && left_max(a) == Some(u) && !leq(a1, a) && !disjoint(a1, a)
        }
        ("1(b) right", &[u1, u, a1, a]) => {
            sub(u1, u) && right_max(a1) == Some(u1) && right_max(a) == Some(u) && !leq(a1, a) && !disjoint(a1, a)
        }
        ("2", &[a0, a1, b0, b1, c]) => r(b0, b1, c) && leq(a0, b0) && leq(a1, b1) && !r(a0, a1, c),
        ("3 left", &[u, v, b]) => left_max(b) == Some(v) && sub(u, v) != lc_list(u).any(|a| leq(a, b)),
        ("3 right", &[u, v, b]) => right_max(b) == Some(v) && sub(u, v) != rc_list(u).any(|a| leq(a, b)),
        ("4(a)", &[a]) => diamond(a).len() != 1,
        ("4(b)", &[a, b]) => s_rel(a, b) != s_rel(b, a),
        ("4(c)", &[a, b]) => match (diamond(a).as_slice(), diamond(b).as_slice()) {
            ([da], [db]) => leq(a, b) != leq(*da, *db),
            _ => true,
        },
        ("5", &[a, b]) => match least(a, b) {
            Some(c) => right_max(c) != right_max(a) || left_max(c) != left_max(b),
            None => true,
        },
        ("7(a)", &[a, b, c]) => {
            let rhs =
                !(0..n).any(|d| leq(d, a) && (0..n).any(|e| leq(e, b) && (0..n).any(|f| r(d, e, f) && disjoint(c, f))));
            r(a, b, c) != rhs
        }
        ("7(b)", &[a, b]) => leq(a, b) != !(0..n).any(|c| leq(c, a) && disjoint(b, c)),
        ("assoc", &[a, b, c]) => {
            let l = dot(a, b).and_then(|ab| dot(ab, c));
            let rr = dot(b, c).and_then(|bc| dot(a, bc));
            l.is_none() || l != rr
        }
        ("profinite", &[u]) => {
            !(0..n).any(|v| star(v) && sub(v, u) && lc_list(v).collect::<Vec<_>>() == rc_list(v).collect::<Vec<_>>())
        }
        ("order_sides", &[a, b]) => match right_max(a) {
            Some(ra) => leq(a, b) != r(ra, a, b),
            None => true,
        },
        ("delta", &[u, a]) => {
            let wv = cfg.subgroup.map(Ok).unwrap_or_else(|| m.minimum_subgroup())?;
            let lcw: Vec<usize> = lc_list(wv).collect();
            let moves = |a1: usize| lcw.iter().any(|&c| lcw.iter().any(|&d| d != c && r(a1, c, d)));
            left_max(a) == Some(u)
                && a != u
                && !(0..n).any(|u1| star(u1) && sub(u1, u) && lc_list(u1).filter(|&a1| leq(a1, a)).all(moves))
        }
        ("roelcke", [v, tuple @ ..]) => {
            let f = Formulas::new(m)?;
            f.theta(tuple, *v)? && !(0..n).any(|u| star(u) && tuple.iter().all(|&a| r(*v, a, u)) && f.psi(tuple, u, *v))
        }
        ("strong_continuity", &[u]) => {
            let v = cfg.subgroup.map(Ok).unwrap_or_else(|| m.minimum_subgroup())?;
            let lcv: Vec<usize> = lc_list(v).collect();
            (0..n).any(|s| lcv.iter().all(|&b| r(s, b, b)) && !leq(s, u))
        }
        ("formally_oligomorphic", tuple) => {
            let v = cfg.subgroup.map(Ok).unwrap_or_else(|| m.minimum_subgroup())?;
            let lcv: Vec<usize> = lc_list(v).collect();
            !(0..n).any(|s| tuple.iter().all(|&b| lcv.iter().any(|&c| r(s, b, c))))
        }
        ("minimum *subgroup", minimal) => {
            let subs: Vec<usize> = (0..n).filter(|&x| star(x)).collect();
            let literal: Vec<usize> = subs
                .iter()
                .copied()
                .filter(|&x| subs.iter().all(|&u| u == x || !sub(u, x)))
                .collect();
            literal == minimal && !subs.iter().any(|&x| subs.iter().all(|&u| sub(x, u)))
        }
        _ => {
            return Err(Error::Invalid(format!(
                "cannot replay clause {clause:?} with witness {w:?}"
            )))
        }
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::coarse_of_group;
    use crate::groups::catalog;

    fn all_hold(m: &CoarseStructure) {
        for r in check_all(m, &CheckConfig::default()) {
            assert!(r.holds, "{r:?}");
        }
    }

    #[test]
    fn small_groups_satisfy_everything() {
        for g in [
            catalog::cyclic(2),
            catalog::cyclic(3),
            catalog::cyclic(4),
            catalog::symmetric(3),
        ] {
            all_hold(&coarse_of_group(&g).unwrap().structure);
        }
    }

    #[test]
    fn stripping_a_coset_triple_fails_0b() {
        let m = coarse_of_group(&catalog::cyclic(2)).unwrap();
        let g = m.find_coset(&[1]).unwrap();
        let s = &m.structure;
        let broken = s.with_triple_removed(g, s.lc_of(g).unwrap(), g);
        let r = check_basic(&broken);
        assert!(!r.holds);
        assert_eq!(r.clause.as_deref(), Some("0(b)"));
        assert_eq!(r.witness, Some(vec![g]));
        assert!(replay(&broken, &r, &CheckConfig::default()).unwrap());
        // Every other checker reports the missing precondition.
        let r = check_monotone(&broken);
        assert_eq!(r.clause.as_deref(), Some("0(b)"));
    }

    #[test]
    fn mutated_structures_fail_with_replayable_witnesses() {
        let m = coarse_of_group(&catalog::cyclic(4)).unwrap();
        let s = &m.structure;
        let odd = m.find_coset(&[1, 3]).unwrap();
        let one = m.find_coset(&[1]).unwrap();
        let even = m.find_coset(&[0, 2]).unwrap();
        // {1}{1} ⊆ {0,2} follows from {1,3}{1,3} ⊆ {0,2}; dropping it breaks monotonicity.
        let broken = s.with_triple_removed(one, one, even);
        let r = check_monotone(&broken);
        assert!(!r.holds);
        assert!(replay(&broken, &r, &CheckConfig::default()).unwrap());
        // {1,3}{1,3} ⊆ {1,3} makes {1,3} a *subgroup.
        let broken = s.with_triple_added(odd, odd, odd);
        let reports = check_all(&broken, &CheckConfig::default());
        let failed: Vec<_> = reports.iter().filter(|r| !r.holds).collect();
        assert!(!failed.is_empty());
        for r in failed {
            if r.clause.as_deref() != Some("precondition") {
                assert!(replay(&broken, r, &CheckConfig::default()).unwrap(), "{r:?}");
            }
        }
    }

    #[test]
    fn delta_on_the_center_of_d4_fails() {
        let d4 = catalog::dihedral(4);
        let m = coarse_of_group(&d4).unwrap();
        let center: Vec<usize> = (0..d4.order())
            .filter(|&z| (0..d4.order()).all(|g| d4.mul(z, g) == d4.mul(g, z)))
            .collect();
        let w = m.find_coset(&center).unwrap();
        let r = check_delta(&m.structure, w);
        assert!(!r.holds);
        let cfg = CheckConfig {
            subgroup: Some(w),
            ..CheckConfig::default()
        };
        assert!(replay(&m.structure, &r, &cfg).unwrap());
        let r = check_strong_continuity(&m.structure, w);
        assert!(!r.holds);
        assert!(replay(&m.structure, &r, &cfg).unwrap());
    }

    #[test]
    fn formally_oligomorphic_counts_orbits() {
        let s3 = catalog::symmetric(3);
        let m = coarse_of_group(&s3).unwrap();
        let stab = s3.pointwise_stabilizer(&[0]).unwrap();
        let v = m.find_coset(&stab.member_list()).unwrap();
        assert_eq!(oligomorphic_family(&m.structure, v, 1).unwrap(), Ok(1));
        assert_eq!(oligomorphic_family(&m.structure, v, 2).unwrap(), Ok(2));
    }

    #[test]
    fn top_subgroup_is_witnessed_by_the_empty_tuple() {
        let m = coarse_of_group(&catalog::symmetric(3)).unwrap().structure;
        let top = m.maximum_subgroup().unwrap();
        let v = m.minimum_subgroup().unwrap();
        assert_eq!(continuity_witness(&m, v, top).unwrap(), Some(vec![]));
    }

    #[test]
    fn checker_ids_round_trip() {
        for c in Checker::ALL {
            assert_eq!(Checker::parse(c.id()).unwrap(), c);
        }
        assert!(Checker::parse("nope").is_err());
    }
}
