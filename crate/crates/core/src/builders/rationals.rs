//! Finite order-preserving partial maps on the rationals, ordered by reverse
//! extension, and the coarse structure they induce.
//!
//! A map `f` stands for the coset `{g ∈ Aut(ℚ,<) : g ⊇ f}`. For such cosets
//! `AB ⊆ C` holds exactly when the map for `C` is contained in `f ∘ h`, which is
//! the relation used here.

use std::collections::HashMap;
use std::fmt;

use itertools::Itertools;
use num_rational::Ratio;
use serde::{Serialize, Serializer};

use super::{ElementMeaning, LabeledCoarse};
use crate::bounds::Bounds;
use crate::coarse::CoarseStructure;
use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

/// An order-preserving injection between finite sets of rationals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialOrderMap {
    pairs: Vec<(Rational, Rational)>,
}

impl PartialOrderMap {
    pub fn empty() -> Self {
        PartialOrderMap { pairs: Vec::new() }
    }

    /// Sorts by argument and checks that both coordinates strictly increase.
    pub fn new(mut pairs: Vec<(Rational, Rational)>) -> Result<Self> {
        pairs.sort();
        for w in pairs.windows(2) {
            if w[0].0 >= w[1].0 || w[0].1 >= w[1].1 {
                return Err(Error::Invalid(format!(
                    "{}↦{} and {}↦{} are not strictly increasing",
                    w[0].0, w[0].1, w[1].0, w[1].1
                )));
            }
        }
        Ok(PartialOrderMap { pairs })
    }

    pub fn identity(points: &[Rational]) -> Self {
        let mut pairs: Vec<_> = points.iter().map(|&q| (q, q)).collect();
        pairs.sort();
        pairs.dedup();
        PartialOrderMap { pairs }
    }

    pub fn pairs(&self) -> &[(Rational, Rational)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn domain(&self) -> Vec<Rational> {
        self.pairs.iter().map(|p| p.0).collect()
    }

    pub fn range(&self) -> Vec<Rational> {
        self.pairs.iter().map(|p| p.1).collect()
    }

    pub fn apply(&self, q: Rational) -> Option<Rational> {
        self.pairs
            .binary_search_by(|p| p.0.cmp(&q))
            .ok()
            .map(|i| self.pairs[i].1)
    }

    /// `self ∘ other`: apply `other` first, defined where the result lands in the domain of `self`.
    pub fn compose(&self, other: &PartialOrderMap) -> PartialOrderMap {
        let pairs = other
            .pairs
            .iter()
            .filter_map(|&(x, y)| self.apply(y).map(|z| (x, z)))
            .collect();
        PartialOrderMap { pairs }
    }

    pub fn inverse(&self) -> PartialOrderMap {
        let mut pairs: Vec<_> = self.pairs.iter().map(|&(x, y)| (y, x)).collect();
        pairs.sort();
        PartialOrderMap { pairs }
    }

    /// Every pair of `other` is a pair of `self`.
    pub fn extends(&self, other: &PartialOrderMap) -> bool {
        other.pairs.iter().all(|&(x, y)| self.apply(x) == Some(y))
    }

    pub fn is_identity(&self) -> bool {
        self.pairs.iter().all(|(x, y)| x == y)
    }
}

impl fmt::Display for PartialOrderMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{{{}}}",
            self.pairs.iter().map(|(x, y)| format!("{x}↦{y}")).join(",")
        )
    }
}

impl Serialize for PartialOrderMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[String; 2]> = self.pairs.iter().map(|(x, y)| [x.to_string(), y.to_string()]).collect();
        pairs.serialize(s)
    }
}

/// All order-preserving partial maps with domain and range inside a finite support.
#[derive(Debug, Clone)]
pub struct RationalGroupoid {
    support: Vec<Rational>,
    elements: Vec<PartialOrderMap>,
    index: HashMap<PartialOrderMap, usize>,
}

impl RationalGroupoid {
    pub fn support(&self) -> &[Rational] {
        &self.support
    }

    pub fn elements(&self) -> &[PartialOrderMap] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, f: &PartialOrderMap) -> Option<usize> {
        self.index.get(f).copied()
    }

    /// Composition where it stays inside the groupoid (it always does).
    pub fn compose(&self, f: usize, h: usize) -> usize {
        self.index[&self.elements[f].compose(&self.elements[h])]
    }

    pub fn inverse(&self, f: usize) -> usize {
        self.index[&self.elements[f].inverse()]
    }

    /// Reverse extension: `f ≤ h` iff `f` extends `h`.
    pub fn below(&self, f: usize, h: usize) -> bool {
        self.elements[f].extends(&self.elements[h])
    }
}

/// Enumerates maps by size, then by domain, then by range (subsets in lexicographic order).
pub fn rationals_groupoid(support: &[Rational]) -> Result<RationalGroupoid> {
    rationals_groupoid_bounded(support, &Bounds::default())
}

pub fn rationals_groupoid_bounded(support: &[Rational], bounds: &Bounds) -> Result<RationalGroupoid> {
    let mut support = support.to_vec();
    support.sort();
    support.dedup();
    if support.len() > bounds.max_support {
        return Err(Error::bound("rational support", support.len(), bounds.max_support));
    }
    let mut elements = Vec::new();
    for k in 0..=support.len() {
        for dom in support.iter().copied().combinations(k) {
            for ran in support.iter().copied().combinations(k) {
                elements.push(PartialOrderMap {
                    pairs: dom.iter().copied().zip(ran).collect(),
                });
            }
        }
    }
    let index = elements.iter().cloned().enumerate().map(|(i, f)| (f, i)).collect();
    Ok(RationalGroupoid {
        support,
        elements,
        index,
    })
}

/// `R(f, h, k)` iff `k ⊆ f ∘ h`.
pub fn groupoid_to_coarse(gd: &RationalGroupoid) -> Result<LabeledCoarse> {
    let n = gd.len();
    let mut triples = Vec::new();
    for f in 0..n {
        for h in 0..n {
            let fh = gd.elements[f].compose(&gd.elements[h]);
            for sub in fh.pairs.iter().copied().powerset() {
                let k = gd.index[&PartialOrderMap { pairs: sub }];
                triples.push((f, h, k));
            }
        }
    }
    triples.sort_unstable();
    let labels = gd.elements.iter().map(|f| format!("map:{f}")).collect();
    let structure = CoarseStructure::from_triples(n, triples)?.with_labels(labels)?;
    let support = gd.support.iter().map(ToString::to_string).join(",");
    Ok(LabeledCoarse {
        structure,
        meanings: gd
            .elements
            .iter()
            .map(|f| ElementMeaning::Map { map: f.clone() })
            .collect(),
        provenance: format!("order-preserving maps on {{{support}}}"),
    })
}

/// Parses `3`, `-2`, or `1/2`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            Ok(Ratio::new(p, q))
        }
        None => Ok(Ratio::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Ratio::from_integer(n)
    }

    fn support(m: i64) -> Vec<Rational> {
        (0..m).map(q).collect()
    }

    #[test]
    fn element_counts_are_central_binomials() {
        for (m, count) in [(0, 1), (1, 2), (2, 6), (3, 20), (4, 70)] {
            assert_eq!(rationals_groupoid(&support(m)).unwrap().len(), count);
        }
        assert!(rationals_groupoid(&support(7)).is_err());
    }

    #[test]
    fn composition_where_range_meets_domain() {
        let f = PartialOrderMap::new(vec![(q(0), q(1))]).unwrap();
        let g = PartialOrderMap::new(vec![(q(1), q(0))]).unwrap();
        assert_eq!(f.compose(&g), PartialOrderMap::new(vec![(q(1), q(1))]).unwrap());
        assert_eq!(g.compose(&f), PartialOrderMap::identity(&[q(0)]));
    }

    #[test]
    fn rejects_order_reversing_pairs() {
        assert!(PartialOrderMap::new(vec![(q(0), q(1)), (q(1), q(0))]).is_err());
        assert!(PartialOrderMap::new(vec![(q(0), q(1)), (q(0), q(2))]).is_err());
    }

    #[test]
    fn single_point_support() {
        let gd = rationals_groupoid(&[Ratio::new(1, 2)]).unwrap();
        assert_eq!(gd.len(), 2);
        let m = groupoid_to_coarse(&gd).unwrap();
        assert_eq!(m.structure.subgroups(), vec![0, 1]);
        assert_eq!(m.structure.label(1), "map:{1/2↦1/2}");
    }

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("3").unwrap(), q(3));
        assert_eq!(parse_rational("-1/2").unwrap(), Ratio::new(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
