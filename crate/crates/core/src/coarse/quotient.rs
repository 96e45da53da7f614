use serde::Serialize;

use super::{CoarseStructure, CosetId};
use crate::error::{Error, Result};

/// `(LC(U), ·, ⋄)` for a normal *subgroup `U`, as a multiplication table.
///
/// Entries of `table` and `inverse` are positions in `elements`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuotientGroup {
    pub subgroup: CosetId,
    pub elements: Vec<CosetId>,
    pub identity: usize,
    pub table: Vec<Vec<usize>>,
    pub inverse: Vec<usize>,
}

impl QuotientGroup {
    pub(super) fn new(m: &CoarseStructure, u: CosetId) -> Result<Self> {
        if !m.is_normal(u)? {
            return Err(Error::NotNormal(u));
        }
        let elements = m.lc_list(u);
        let pos = |a: CosetId| elements.binary_search(&a).ok();
        let mut table = Vec::with_capacity(elements.len());
        for &a in &elements {
            let mut row = Vec::with_capacity(elements.len());
            for &b in &elements {
                let c = m
                    .dot(a, b)?
                    .and_then(pos)
                    .ok_or_else(|| Error::Structural(format!("{a}·{b} leaves LC({u})")))?;
                row.push(c);
            }
            table.push(row);
        }
        let inverse = elements
            .iter()
            .map(|&a| {
                let d = m.diamond(a)?;
                pos(d).ok_or_else(|| Error::Structural(format!("{a}⋄ leaves LC({u})")))
            })
            .collect::<Result<Vec<_>>>()?;
        let identity = pos(u).ok_or_else(|| Error::Structural(format!("{u} not in LC({u})")))?;
        let q = QuotientGroup {
            subgroup: u,
            elements,
            identity,
            table,
            inverse,
        };
        q.verify()?;
        Ok(q)
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    /// Checks identity, inverse and associativity laws on the table.
    pub fn verify(&self) -> Result<()> {
        let n = self.order();
        let e = self.identity;
        for a in 0..n {
            if self.mul(e, a) != a || self.mul(a, e) != a {
                return Err(Error::Structural(format!("identity law fails at {}", self.elements[a])));
            }
            if self.mul(a, self.inverse[a]) != e || self.mul(self.inverse[a], a) != e {
                return Err(Error::Structural(format!("inverse law fails at {}", self.elements[a])));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                        return Err(Error::NonAssociative(
                            self.elements[a],
                            self.elements[b],
                            self.elements[c],
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}
