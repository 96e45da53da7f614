//! Orbit equivalence structures and conjugacy inside `Sym(n)`.

use itertools::Itertools;
use serde::Serialize;

use crate::bounds::Bounds;
use crate::error::{Error, Result};
use crate::groups::{Perm, PermGroup, TupleOrbits};

/// For each arity `1..=max_arity`, the partition of tuples into orbits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitStructure {
    pub degree: usize,
    pub arities: Vec<TupleOrbits>,
}

impl OrbitStructure {
    pub fn max_arity(&self) -> usize {
        self.arities.len()
    }

    pub fn orbit_counts(&self) -> Vec<usize> {
        self.arities.iter().map(TupleOrbits::num_orbits).collect()
    }

    /// Whether `α` maps this orbit equivalence exactly onto `other`'s, at every arity.
    pub fn mapped_onto_by(&self, other: &OrbitStructure, alpha: &Perm) -> bool {
        if self.degree != other.degree || self.max_arity() != other.max_arity() || alpha.degree() != self.degree {
            return false;
        }
        for (mine, theirs) in self.arities.iter().zip(&other.arities) {
            // Label correspondence must be a bijection.
            let mut fwd = vec![usize::MAX; mine.labels.len()];
            let mut back = vec![usize::MAX; theirs.labels.len()];
            for (t, &l) in mine.labels.iter().enumerate() {
                let image: Vec<usize> = mine.decode(t).into_iter().map(|p| alpha.apply(p)).collect();
                let l2 = theirs.orbit_of(&image);
                if fwd[l] == usize::MAX && back[l2] == usize::MAX {
                    fwd[l] = l2;
                    back[l2] = l;
                } else if fwd[l] != l2 || back[l2] != l {
                    return false;
                }
            }
        }
        true
    }
}

#[derive(Serialize)]
struct ArityView {
    arity: usize,
    orbits: usize,
    representatives: Vec<Vec<usize>>,
}

impl Serialize for OrbitStructure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct View {
            degree: usize,
            arities: Vec<ArityView>,
        }
        View {
            degree: self.degree,
            arities: self
                .arities
                .iter()
                .map(|o| ArityView {
                    arity: o.arity,
                    orbits: o.num_orbits(),
                    representatives: o.representatives().into_iter().map(|t| o.decode(t)).collect(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

pub fn orbit_structure(g: &PermGroup, max_arity: usize) -> Result<OrbitStructure> {
    orbit_structure_bounded(g, max_arity, &Bounds::default())
}

pub fn orbit_structure_bounded(g: &PermGroup, max_arity: usize, bounds: &Bounds) -> Result<OrbitStructure> {
    let arities = (1..=max_arity)
        .map(|k| g.orbits(k, bounds.max_tuples))
        .collect::<Result<Vec<_>>>()?;
    Ok(OrbitStructure {
        degree: g.degree(),
        arities,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConjugacyReport {
    pub degree: usize,
    pub arity: usize,
    pub conjugate: bool,
    /// Least `α` (by image list) with `αGα⁻¹ = H`.
    pub witness: Option<Perm>,
    /// How many `α` were tried; every one gave the same verdict on both sides.
    pub checked: usize,
}

/// `αGα⁻¹ = H`.
fn conjugates_onto(g: &PermGroup, h: &PermGroup, alpha: &Perm) -> bool {
    g.order() == h.order()
        && g.generators()
            .iter()
            .all(|p| h.index_of(&p.conjugate_by(alpha)).is_some())
}

/// Searches `Sym(n)` for `α` with `αGα⁻¹ = H`, and for each `α` compares that
/// with `α` being an isomorphism `E_G → E_H` up to `arity`. Disagreement is an error.
pub fn conjugacy_check(g: &PermGroup, h: &PermGroup, arity: usize) -> Result<ConjugacyReport> {
    if g.degree() != h.degree() {
        return Err(Error::DegreeMismatch {
            expected: g.degree(),
            got: h.degree(),
        });
    }
    let n = g.degree();
    const MAX_DEGREE: usize = 8;
    if n > MAX_DEGREE {
        return Err(Error::bound("degree for conjugacy search", n, MAX_DEGREE));
    }
    let eg = orbit_structure(g, arity)?;
    let eh = orbit_structure(h, arity)?;
    let mut witness = None;
    let mut checked = 0;
    for images in (0..n).permutations(n) {
        let alpha = Perm::from_images(images)?;
        let conj = conjugates_onto(g, h, &alpha);
        let orbit = eg.mapped_onto_by(&eh, &alpha);
        checked += 1;
        if conj != orbit {
            return Err(Error::Structural(format!(
                "α = {alpha}: conjugation says {conj}, orbit structures say {orbit}"
            )));
        }
        if conj && witness.is_none() {
            witness = Some(alpha);
        }
    }
    Ok(ConjugacyReport {
        degree: n,
        arity,
        conjugate: witness.is_some(),
        witness,
        checked,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::catalog;

    fn gen(degree: usize, cycles: &[&[usize]]) -> PermGroup {
        PermGroup::generate("H", degree, vec![Perm::from_cycles(degree, cycles).unwrap()]).unwrap()
    }

    #[test]
    fn orbit_counts() {
        assert_eq!(
            orbit_structure(&catalog::symmetric(3), 2).unwrap().orbit_counts(),
            vec![1, 2]
        );
        assert_eq!(
            orbit_structure(&catalog::trivial(2), 1).unwrap().orbit_counts(),
            vec![2]
        );
        assert_eq!(
            orbit_structure(&catalog::cyclic(2), 2).unwrap().orbit_counts(),
            vec![1, 2]
        );
    }

    #[test]
    fn transpositions_are_conjugate() {
        let r = conjugacy_check(&gen(3, &[&[0, 1]]), &gen(3, &[&[0, 2]]), 3).unwrap();
        assert!(r.conjugate);
        assert_eq!(r.witness.unwrap().images(), &[0, 2, 1]);
    }

    #[test]
    fn regular_z4_and_v4_are_not_conjugate() {
        let r = conjugacy_check(&catalog::cyclic(4), &catalog::klein_four(), 3).unwrap();
        assert!(!r.conjugate);
    }

    #[test]
    fn self_conjugacy_has_identity_witness() {
        let s3 = catalog::symmetric(3);
        let r = conjugacy_check(&s3, &s3, 2).unwrap();
        assert!(r.witness.unwrap().is_identity());
    }

    #[test]
    fn degree_mismatch_is_an_input_error() {
        let e = conjugacy_check(&catalog::cyclic(2), &catalog::cyclic(3), 1).unwrap_err();
        assert!(e.is_input_error());
    }
}
