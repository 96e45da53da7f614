//! Finite structures with one ternary relation `R(A, B, C)`, read as `AB ⊑ C`,
//! and everything definable from it: *subgroups, left and right *cosets, the
//! order `⊑`, meets, disjointness, inverses and products.

use std::fmt::Write as _;
use std::sync::OnceLock;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result, Side};

mod quotient;

pub use quotient::QuotientGroup;

/// Index of an element of a [`CoarseStructure`].
pub type CosetId = usize;

/// The order `⊑` on the whole domain, as up-sets and down-sets.
#[derive(Debug, Clone)]
pub struct Order {
    up: Vec<FixedBitSet>,
    down: Vec<FixedBitSet>,
}

impl Order {
    pub fn leq(&self, a: CosetId, b: CosetId) -> bool {
        self.up[a].contains(b)
    }

    /// All `B` with `a ⊑ B`.
    pub fn up(&self, a: CosetId) -> &FixedBitSet {
        &self.up[a]
    }

    /// All `B` with `B ⊑ a`.
    pub fn down(&self, a: CosetId) -> &FixedBitSet {
        &self.down[a]
    }
}

#[derive(Debug, Clone)]
pub struct CoarseStructure {
    size: usize,
    // tops[a * size + b] = { c : R(a, b, c) }
    tops: Vec<FixedBitSet>,
    labels: Option<Vec<String>>,
    star: OnceLock<FixedBitSet>,
    lc: OnceLock<Vec<Result<CosetId>>>,
    rc: OnceLock<Vec<Result<CosetId>>>,
    order: OnceLock<Result<Order>>,
    overlap: OnceLock<Vec<FixedBitSet>>,
    diamond: OnceLock<Vec<Result<CosetId>>>,
}

impl CoarseStructure {
    pub fn from_triples(size: usize, triples: impl IntoIterator<Item = (usize, usize, usize)>) -> Result<Self> {
        if size == 0 {
            return Err(Error::Invalid("a coarse structure needs at least one element".into()));
        }
        let mut tops = vec![FixedBitSet::with_capacity(size); size * size];
        for (a, b, c) in triples {
            if a >= size || b >= size || c >= size {
                return Err(Error::Invalid(format!(
                    "triple ({a}, {b}, {c}) out of range for size {size}"
                )));
            }
            tops[a * size + b].insert(c);
        }
        Ok(Self::from_tops(size, tops))
    }

    fn from_tops(size: usize, tops: Vec<FixedBitSet>) -> Self {
        CoarseStructure {
            size,
            tops,
            labels: None,
            star: OnceLock::new(),
            lc: OnceLock::new(),
            rc: OnceLock::new(),
            order: OnceLock::new(),
            overlap: OnceLock::new(),
            diamond: OnceLock::new(),
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.size {
            return Err(Error::Invalid(format!(
                "{} labels for {} elements",
                labels.len(),
                self.size
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, a: CosetId) -> String {
        match &self.labels {
            Some(l) => l[a].clone(),
            None => a.to_string(),
        }
    }

    #[inline]
    pub fn relation(&self, a: CosetId, b: CosetId, c: CosetId) -> bool {
        self.tops[a * self.size + b].contains(c)
    }

    /// `{ C : AB ⊑ C }`.
    #[inline]
    pub fn tops(&self, a: CosetId, b: CosetId) -> &FixedBitSet {
        &self.tops[a * self.size + b]
    }

    pub fn num_triples(&self) -> usize {
        self.tops.iter().map(|t| t.count_ones(..)).sum()
    }

    /// All triples in lexicographic order.
    pub fn triples(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let n = self.size;
        (0..n * n).flat_map(move |ab| self.tops[ab].ones().map(move |c| (ab / n, ab % n, c)))
    }

    /// Copy with element `i` renamed to `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.size;
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::Invalid("relabelling is not a bijection".into()));
        }
        let out = Self::from_triples(n, self.triples().map(|(a, b, c)| (perm[a], perm[b], perm[c])))?;
        match &self.labels {
            Some(labels) => {
                let mut moved = vec![String::new(); n];
                for (i, l) in labels.iter().enumerate() {
                    moved[perm[i]] = l.clone();
                }
                out.with_labels(moved)
            }
            None => Ok(out),
        }
    }

    pub fn with_triple_removed(&self, a: usize, b: usize, c: usize) -> Self {
        let mut tops = self.tops.clone();
        tops[a * self.size + b].set(c, false);
        let mut out = Self::from_tops(self.size, tops);
        out.labels = self.labels.clone();
        out
    }

    pub fn with_triple_added(&self, a: usize, b: usize, c: usize) -> Self {
        let mut tops = self.tops.clone();
        tops[a * self.size + b].insert(c);
        let mut out = Self::from_tops(self.size, tops);
        out.labels = self.labels.clone();
        out
    }

    fn star_set(&self) -> &FixedBitSet {
        self.star.get_or_init(|| {
            let mut s = FixedBitSet::with_capacity(self.size);
            for a in 0..self.size {
                if self.relation(a, a, a) {
                    s.insert(a);
                }
            }
            s
        })
    }

    /// `AA ⊑ A`.
    pub fn is_star_subgroup(&self, a: CosetId) -> bool {
        self.star_set().contains(a)
    }

    /// All *subgroups in ascending index order.
    pub fn subgroups(&self) -> Vec<CosetId> {
        self.star_set().ones().collect()
    }

    /// The *subgroup below every other *subgroup.
    pub fn minimum_subgroup(&self) -> Result<CosetId> {
        let subs = self.subgroups();
        subs.iter()
            .copied()
            .find(|&m| subs.iter().all(|&u| self.sub_order(m, u)))
            .ok_or(Error::NoMinimumSubgroup)
    }

    /// The *subgroup above every other *subgroup.
    pub fn maximum_subgroup(&self) -> Option<CosetId> {
        let subs = self.subgroups();
        subs.iter()
            .copied()
            .find(|&m| subs.iter().all(|&u| self.sub_order(u, m)))
    }

    /// `U ⊑ V` on *subgroups, i.e. `UV ⊑ V`.
    pub fn sub_order(&self, u: CosetId, v: CosetId) -> bool {
        self.relation(u, v, v)
    }

    /// Mirror image of [`Self::sub_order`]: `VU ⊑ V`.
    pub fn sub_order_right(&self, u: CosetId, v: CosetId) -> bool {
        self.relation(v, u, v)
    }

    fn maxima(&self, side: Side) -> Vec<Result<CosetId>> {
        let subs = self.subgroups();
        (0..self.size)
            .map(|a| {
                let candidates: Vec<CosetId> = subs
                    .iter()
                    .copied()
                    .filter(|&u| match side {
                        Side::Left => self.relation(a, u, a),
                        Side::Right => self.relation(u, a, a),
                    })
                    .collect();
                candidates
                    .iter()
                    .copied()
                    .find(|&m| candidates.iter().all(|&u| self.sub_order(u, m)))
                    .ok_or(Error::NoMaximum { element: a, side })
            })
            .collect()
    }

    /// The *subgroup `U` with `A ∈ LC(U)`: the `⊑`-maximum *subgroup with `AU ⊑ A`.
    pub fn lc_of(&self, a: CosetId) -> Result<CosetId> {
        self.lc.get_or_init(|| self.maxima(Side::Left))[a].clone()
    }

    /// The *subgroup `U` with `A ∈ RC(U)`: the `⊑`-maximum *subgroup with `UA ⊑ A`.
    pub fn rc_of(&self, a: CosetId) -> Result<CosetId> {
        self.rc.get_or_init(|| self.maxima(Side::Right))[a].clone()
    }

    pub fn coset_of(&self, a: CosetId, side: Side) -> Result<CosetId> {
        match side {
            Side::Left => self.lc_of(a),
            Side::Right => self.rc_of(a),
        }
    }

    /// First element with no left or right maximum, if any.
    pub fn first_coset_failure(&self) -> Option<Error> {
        (0..self.size).find_map(|a| self.lc_of(a).err().or_else(|| self.rc_of(a).err()))
    }

    /// `LC(U)` in ascending index order.
    pub fn lc_list(&self, u: CosetId) -> Vec<CosetId> {
        (0..self.size).filter(|&a| self.lc_of(a).ok() == Some(u)).collect()
    }

    /// `RC(U)` in ascending index order.
    pub fn rc_list(&self, u: CosetId) -> Vec<CosetId> {
        (0..self.size).filter(|&a| self.rc_of(a).ok() == Some(u)).collect()
    }

    pub fn coset_list(&self, u: CosetId, side: Side) -> Vec<CosetId> {
        match side {
            Side::Left => self.lc_list(u),
            Side::Right => self.rc_list(u),
        }
    }

    /// The order `A ⊑ B :⟺ A·lc(A) ⊑ B`; fails if some element has no left *subgroup.
    pub fn order(&self) -> Result<&Order> {
        self.order
            .get_or_init(|| {
                let n = self.size;
                let mut up = Vec::with_capacity(n);
                for a in 0..n {
                    let u = self.lc_of(a)?;
                    up.push(self.tops(a, u).clone());
                }
                let mut down = vec![FixedBitSet::with_capacity(n); n];
                for (a, row) in up.iter().enumerate() {
                    for b in row.ones() {
                        down[b].insert(a);
                    }
                }
                Ok(Order { up, down })
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn leq(&self, a: CosetId, b: CosetId) -> Result<bool> {
        Ok(self.order()?.leq(a, b))
    }

    /// The right-handed reading `rc(A)·A ⊑ B`.
    pub fn leq_right(&self, a: CosetId, b: CosetId) -> Result<bool> {
        Ok(self.relation(self.rc_of(a)?, a, b))
    }

    /// Greatest *subgroup below both `u` and `v` in the *subgroup order.
    pub fn meet(&self, u: CosetId, v: CosetId) -> Result<CosetId> {
        for x in [u, v] {
            if !self.is_star_subgroup(x) {
                return Err(Error::NotSubgroup(x));
            }
        }
        let lower: Vec<CosetId> = self
            .subgroups()
            .into_iter()
            .filter(|&w| self.sub_order(w, u) && self.sub_order(w, v))
            .collect();
        lower
            .iter()
            .copied()
            .find(|&m| lower.iter().all(|&w| self.sub_order(w, m)))
            .ok_or(Error::NoMeet(u, v))
    }

    fn overlaps(&self) -> &[FixedBitSet] {
        self.overlap.get_or_init(|| {
            let n = self.size;
            let mut rows = vec![FixedBitSet::with_capacity(n); n];
            for t in &self.tops {
                for a in t.ones() {
                    rows[a].union_with(t);
                }
            }
            rows
        })
    }

    /// No `C, D` with both `CD ⊑ A` and `CD ⊑ B`.
    pub fn disjoint(&self, a: CosetId, b: CosetId) -> bool {
        !self.overlaps()[a].contains(b)
    }

    /// Elements not disjoint from `a`.
    pub fn overlapping(&self, a: CosetId) -> &FixedBitSet {
        &self.overlaps()[a]
    }

    /// `S(A, B)`: `A ∈ RC(V)`, `B ∈ LC(V)` and `AB ⊑ V` for some *subgroup `V`.
    pub fn s_relation(&self, a: CosetId, b: CosetId) -> bool {
        match (self.rc_of(a), self.lc_of(b)) {
            (Ok(v), Ok(w)) => v == w && self.relation(a, b, v),
            _ => false,
        }
    }

    /// The unique `B` with `S(A, B)`.
    pub fn diamond(&self, a: CosetId) -> Result<CosetId> {
        self.diamond.get_or_init(|| {
            (0..self.size)
                .map(|a| {
                    let v = self.rc_of(a)?;
                    let found: Vec<CosetId> = self
                        .lc_list(v)
                        .into_iter()
                        .filter(|&b| self.relation(a, b, v))
                        .collect();
                    match found.as_slice() {
                        [] => Err(Error::NoInverse(a)),
                        [b] => Ok(*b),
                        _ => Err(Error::NonUniqueInverse(a)),
                    }
                })
                .collect()
        })[a]
            .clone()
    }

    /// `A · B`, defined when `lc(A) = rc(B)`: the least `C` with `AB ⊑ C`.
    pub fn dot(&self, a: CosetId, b: CosetId) -> Result<Option<CosetId>> {
        if self.lc_of(a)? != self.rc_of(b)? {
            return Ok(None);
        }
        let order = self.order()?;
        let tops = self.tops(a, b);
        tops.ones()
            .find(|&c| tops.is_subset(order.up(c)))
            .map(Some)
            .ok_or(Error::NoLeastProduct(a, b))
    }

    /// `LC(U) = RC(U)`.
    pub fn is_normal(&self, u: CosetId) -> Result<bool> {
        if !self.is_star_subgroup(u) {
            return Err(Error::NotSubgroup(u));
        }
        Ok(self.lc_list(u) == self.rc_list(u))
    }

    /// The group `(LC(U), ·, ⋄)` for a normal *subgroup `U`.
    pub fn quotient_group(&self, u: CosetId) -> Result<QuotientGroup> {
        QuotientGroup::new(self, u)
    }

    /// Hasse diagram of `⊑` in Graphviz DOT syntax, edges pointing upwards.
    pub fn hasse_dot(&self) -> Result<String> {
        let order = self.order()?;
        let mut out = String::from("digraph coarse {\n  rankdir=BT;\n");
        for a in 0..self.size {
            let shape = if self.is_star_subgroup(a) { "box" } else { "ellipse" };
            let _ = writeln!(
                out,
                "  n{a} [label=\"{}\", shape={shape}];",
                self.label(a).replace('"', "\\\"")
            );
        }
        for a in 0..self.size {
            for b in order.up(a).ones().filter(|&b| b != a) {
                let covered = order.up(a).ones().any(|c| c != a && c != b && order.leq(c, b));
                if !covered {
                    let _ = writeln!(out, "  n{a} -> n{b};");
                }
            }
        }
        out.push_str("}\n");
        Ok(out)
    }
}
