//! Constructors for coarse structures: finite groups, towers of finite groups,
//! and truncations of the groupoid of finite order-preserving maps on the rationals.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::bounds::Bounds;
use crate::coarse::{CoarseStructure, CosetId};
use crate::error::{Error, Result, Side};
use crate::groups::{PermGroup, ProfiniteTower, Subgroup, TupleOrbits};

pub mod rationals;

pub use rationals::{groupoid_to_coarse, rationals_groupoid, PartialOrderMap, RationalGroupoid};

/// What an element of a built structure stands for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ElementMeaning {
    /// A left coset `rep·U` of the `subgroup`-th subgroup, listed by element indices.
    Coset {
        subgroup: usize,
        representative: usize,
        members: Vec<usize>,
    },
    /// A finite partial map on the rationals.
    Map { map: PartialOrderMap },
}

#[derive(Debug, Clone)]
pub struct LabeledCoarse {
    pub structure: CoarseStructure,
    pub meanings: Vec<ElementMeaning>,
    pub provenance: String,
}

impl LabeledCoarse {
    /// The element whose coset has exactly these (sorted) member indices.
    pub fn find_coset(&self, members: &[usize]) -> Option<CosetId> {
        self.meanings.iter().position(|m| match m {
            ElementMeaning::Coset { members: ms, .. } => ms == members,
            ElementMeaning::Map { .. } => false,
        })
    }

    pub fn members(&self, a: CosetId) -> Option<&[usize]> {
        match &self.meanings[a] {
            ElementMeaning::Coset { members, .. } => Some(members),
            ElementMeaning::Map { .. } => None,
        }
    }
}

/// The coarse group of a finite group with the default subgroup bound.
pub fn coarse_of_group(g: &PermGroup) -> Result<LabeledCoarse> {
    coarse_of_group_bounded(g, &Bounds::default())
}

/// Domain: every left coset of every subgroup, as a set (left cosets of distinct
/// subgroups never coincide, and every right coset is a left coset of a conjugate).
/// `R(A, B, C)` holds iff the setwise product `AB` is contained in `C`.
pub fn coarse_of_group_bounded(g: &PermGroup, bounds: &Bounds) -> Result<LabeledCoarse> {
    let subgroups = g.all_subgroups(bounds.max_subgroup_order)?;
    let order = g.order();
    let mut sets: Vec<FixedBitSet> = Vec::new();
    let mut meanings = Vec::new();
    let mut labels = Vec::new();
    let mut seen: HashMap<FixedBitSet, usize> = HashMap::new();
    for (si, u) in subgroups.iter().enumerate() {
        for cell in g.cosets(u, Side::Left) {
            let bits = Subgroup::from_indices(order, cell.iter().copied()).bits().clone();
            if seen.contains_key(&bits) {
                continue;
            }
            seen.insert(bits.clone(), sets.len());
            let mut members = cell.clone();
            members.sort_unstable();
            let rep = members[0];
            labels.push(format!("coset:subgroup={si},rep={}", g.element(rep)));
            meanings.push(ElementMeaning::Coset {
                subgroup: si,
                representative: rep,
                members,
            });
            sets.push(bits);
        }
    }
    let n = sets.len();
    let lists: Vec<Vec<usize>> = sets.iter().map(|s| s.ones().collect()).collect();
    let mut triples = Vec::new();
    let mut product = FixedBitSet::with_capacity(order);
    for a in 0..n {
        for b in 0..n {
            product.clear();
            for &x in &lists[a] {
                for &y in &lists[b] {
                    product.insert(g.mul(x, y));
                }
            }
            for (c, set) in sets.iter().enumerate() {
                if product.is_subset(set) {
                    triples.push((a, b, c));
                }
            }
        }
    }
    let structure = CoarseStructure::from_triples(n, triples)?.with_labels(labels)?;
    Ok(LabeledCoarse {
        structure,
        meanings,
        provenance: g.name().to_string(),
    })
}

/// The coarse group of the top level of a tower, with the kernels of the
/// composite maps `G_K -> G_k` marked as a descending chain of normal *subgroups.
#[derive(Debug, Clone)]
pub struct TowerCoarse {
    pub coarse: LabeledCoarse,
    /// `chain[k]` is the element for `ker(G_K -> G_k)`; the last entry is the trivial subgroup.
    pub chain: Vec<CosetId>,
}

pub fn coarse_of_tower(t: &ProfiniteTower) -> Result<TowerCoarse> {
    coarse_of_tower_bounded(t, &Bounds::default())
}

pub fn coarse_of_tower_bounded(t: &ProfiniteTower, bounds: &Bounds) -> Result<TowerCoarse> {
    let report = t.validate();
    if let Some(v) = report.violation {
        return Err(Error::Invalid(format!("tower is not valid: {v:?}")));
    }
    let top = t.top();
    let coarse = coarse_of_group_bounded(top, bounds)?;
    let mut chain = Vec::with_capacity(t.height());
    for k in 0..t.height() {
        let map = t.composite_to(k);
        let kernel: Vec<usize> = (0..top.order()).filter(|&i| map[i] == PermGroup::IDENTITY).collect();
        let id = coarse
            .find_coset(&kernel)
            .ok_or_else(|| Error::Structural(format!("kernel of level {k} is not an element")))?;
        chain.push(id);
    }
    Ok(TowerCoarse {
        coarse: coarse.with_provenance(format!("tower:{}", top.name())),
        chain,
    })
}

impl LabeledCoarse {
    fn with_provenance(mut self, provenance: String) -> Self {
        self.provenance = provenance;
        self
    }
}

/// One relation of the canonical structure: the tuples of a single orbit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitRelation {
    pub arity: usize,
    /// Least tuple of the orbit in lexicographic order.
    pub representative: Vec<usize>,
    pub tuples: Vec<Vec<usize>>,
}

/// The structure on `{0..degree-1}` naming every orbit on `n`-tuples for `n <= max_arity`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CanonicalStructure {
    pub degree: usize,
    pub relations: Vec<OrbitRelation>,
}

impl CanonicalStructure {
    pub fn count(&self, arity: usize) -> usize {
        self.relations.iter().filter(|r| r.arity == arity).count()
    }

    /// True if the permutation maps every relation onto itself.
    pub fn preserved_by(&self, p: &crate::groups::Perm) -> bool {
        self.relations.iter().all(|r| {
            let mut moved: Vec<Vec<usize>> = r
                .tuples
                .iter()
                .map(|t| t.iter().map(|&x| p.apply(x)).collect())
                .collect();
            moved.sort();
            moved == r.tuples
        })
    }
}

pub fn canonical_structure(g: &PermGroup, max_arity: usize) -> Result<CanonicalStructure> {
    canonical_structure_bounded(g, max_arity, &Bounds::default())
}

pub fn canonical_structure_bounded(g: &PermGroup, max_arity: usize, bounds: &Bounds) -> Result<CanonicalStructure> {
    let mut relations = Vec::new();
    for arity in 1..=max_arity {
        let orbits: TupleOrbits = g.orbits(arity, bounds.max_tuples)?;
        for rep in orbits.representatives() {
            let tuples: Vec<Vec<usize>> = (0..g.degree().pow(arity as u32))
                .filter(|&t| orbits.labels[t] == rep)
                .map(|t| orbits.decode(t))
                .collect();
            relations.push(OrbitRelation {
                arity,
                representative: orbits.decode(rep),
                tuples,
            });
        }
    }
    Ok(CanonicalStructure {
        degree: g.degree(),
        relations,
    })
}
