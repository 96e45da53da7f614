//! The formulas `φ`, `ψ_n` and `θ_n`, which express statements about double
//! cosets in the filter group inside the coarse structure itself.
//!
//! [`Formulas`] precomputes unions of `tops` over down-sets so each formula is a
//! few bitset operations. The free functions evaluate the quantifiers literally
//! and exist as a cross-check.

use fixedbitset::FixedBitSet;

use crate::coarse::{CoarseStructure, CosetId, Order};
use crate::error::Result;

pub struct Formulas<'a> {
    m: &'a CoarseStructure,
    order: &'a Order,
    // right_down[d * n + b] = ⋃ { tops(d, e) : e ⊑ b }
    right_down: Vec<FixedBitSet>,
    // down_tops[a * n + b] = ⋃ { tops(d, e) : d ⊑ a, e ⊑ b }
    down_tops: Vec<FixedBitSet>,
}

impl<'a> Formulas<'a> {
    pub fn new(m: &'a CoarseStructure) -> Result<Self> {
        let order = m.order()?;
        let n = m.size();
        let mut right_down = vec![FixedBitSet::with_capacity(n); n * n];
        for d in 0..n {
            for b in 0..n {
                let row = &mut right_down[d * n + b];
                for e in order.down(b).ones() {
                    row.union_with(m.tops(d, e));
                }
            }
        }
        let mut down_tops = vec![FixedBitSet::with_capacity(n); n * n];
        for a in 0..n {
            for b in 0..n {
                let mut row = FixedBitSet::with_capacity(n);
                for d in order.down(a).ones() {
                    row.union_with(&right_down[d * n + b]);
                }
                down_tops[a * n + b] = row;
            }
        }
        Ok(Formulas {
            m,
            order,
            right_down,
            down_tops,
        })
    }

    pub fn structure(&self) -> &CoarseStructure {
        self.m
    }

    /// Every `F` with `DE ⊑ F` for some `D ⊑ a`, `E ⊑ b`.
    pub fn down_tops(&self, a: CosetId, b: CosetId) -> &FixedBitSet {
        &self.down_tops[a * self.m.size() + b]
    }

    /// `φ(A, B, C)`: no `D ⊑ A`, `E ⊑ B` with `DE ⊑ C`.
    pub fn phi(&self, a: CosetId, b: CosetId, c: CosetId) -> bool {
        !self.down_tops(a, b).contains(c)
    }

    /// All `F` with `φ(V, A_i, F)` for every `i`.
    pub fn outside(&self, v: CosetId, a: &[CosetId]) -> FixedBitSet {
        let n = self.m.size();
        let mut out = FixedBitSet::with_capacity(n);
        out.insert_range(..);
        for &ai in a {
            out.difference_with(self.down_tops(v, ai));
        }
        out
    }

    /// `ψ_n(A_0..A_{n-1}, B, V)`: no `C ⊑ B` with `φ(V, A_i, C)` for all `i`.
    pub fn psi(&self, a: &[CosetId], b: CosetId, v: CosetId) -> bool {
        self.order.down(b).is_disjoint(&self.outside(v, a))
    }

    /// `θ_n(A_0..A_{n-1}, V)`: the union of the double cosets is closed under
    /// products (no instance of `ρ`) and under inverses.
    pub fn theta(&self, a: &[CosetId], v: CosetId) -> Result<bool> {
        let n = self.m.size();
        let out = self.outside(v, a);
        for &aj in a {
            let es = self.down_tops(v, aj);
            for &al in a {
                let mut fs = FixedBitSet::with_capacity(n);
                for e in es.ones() {
                    fs.union_with(&self.right_down[e * n + al]);
                }
                if !fs.is_disjoint(&out) {
                    return Ok(false);
                }
            }
            let inv = self.m.diamond(aj)?;
            if !self.down_tops(inv, v).is_disjoint(&out) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Literal `φ(A, B, C)`.
pub fn phi(m: &CoarseStructure, a: CosetId, b: CosetId, c: CosetId) -> Result<bool> {
    let order = m.order()?;
    Ok(!order
        .down(a)
        .ones()
        .any(|d| order.down(b).ones().any(|e| m.relation(d, e, c))))
}

/// Literal `ψ_n`.
pub fn psi(m: &CoarseStructure, a: &[CosetId], b: CosetId, v: CosetId) -> Result<bool> {
    let order = m.order()?;
    for c in order.down(b).ones() {
        let mut all = true;
        for &ai in a {
            if !phi(m, v, ai, c)? {
                all = false;
                break;
            }
        }
        if all {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Literal `θ_n`, with `ρ` quantifying over `B ⊑ V`, `C ⊑ A_j`, `D ⊑ A_l`
/// and arbitrary `E`, `F`; inverse closure uses `⋄`.
pub fn theta(m: &CoarseStructure, a: &[CosetId], v: CosetId) -> Result<bool> {
    let order = m.order()?;
    let n = m.size();
    let mut outside = vec![true; n];
    for (f, slot) in outside.iter_mut().enumerate() {
        for &ai in a {
            if !phi(m, v, ai, f)? {
                *slot = false;
                break;
            }
        }
    }
    for &aj in a {
        for &al in a {
            for b in order.down(v).ones() {
                for c in order.down(aj).ones() {
                    for e in m.tops(b, c).ones() {
                        for d in order.down(al).ones() {
                            if m.tops(e, d).ones().any(|f| outside[f]) {
                                return Ok(false);
                            }
                        }
                    }
                }
            }
        }
        let inv = m.diamond(aj)?;
        for d in order.down(inv).ones() {
            for e in order.down(v).ones() {
                if m.tops(d, e).ones().any(|f| outside[f]) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
