//! The filter group `F(M)` of a finite coarse structure, its actions on left
//! *cosets, and the two reconstruction results (finite groups and inverse limits).

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use serde::{Serialize, Serializer};

use crate::bounds::Bounds;
use crate::builders::{coarse_of_group_bounded, TowerCoarse};
use crate::coarse::{CoarseStructure, CosetId, QuotientGroup};
use crate::error::{Error, Result};
use crate::groups::{Perm, PermGroup};

/// A full filter, stored as its full member set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FullFilter {
    members: FixedBitSet,
}

impl FullFilter {
    pub fn members(&self) -> &FixedBitSet {
        &self.members
    }

    pub fn contains(&self, a: CosetId) -> bool {
        self.members.contains(a)
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_clear()
    }

    pub fn member_list(&self) -> Vec<CosetId> {
        self.members.ones().collect()
    }

    /// The `⊑`-minimal members.
    pub fn minimal(&self, m: &CoarseStructure) -> Result<Vec<CosetId>> {
        let order = m.order()?;
        Ok(self
            .members
            .ones()
            .filter(|&a| order.down(a).intersection(&self.members).count() == 1)
            .collect())
    }
}

impl Serialize for FullFilter {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.member_list().serialize(s)
    }
}

/// Checks the full-filter conditions; returns the first violated one.
pub fn filter_violation(m: &CoarseStructure, x: &FixedBitSet) -> Result<Option<String>> {
    let order = m.order()?;
    if x.is_clear() {
        return Ok(Some("empty".into()));
    }
    for a in x.ones() {
        if !order.up(a).is_subset(x) {
            return Ok(Some(format!("not upward closed at {a}")));
        }
    }
    let members: Vec<CosetId> = x.ones().collect();
    for (i, &a) in members.iter().enumerate() {
        for &b in &members[i + 1..] {
            let mut common = order.down(a).clone();
            common.intersect_with(order.down(b));
            if common.is_disjoint(x) {
                return Ok(Some(format!("{a} and {b} have no common lower bound inside")));
            }
        }
    }
    for u in m.subgroups() {
        let left = m.lc_list(u).into_iter().filter(|&a| x.contains(a)).count();
        let right = m.rc_list(u).into_iter().filter(|&a| x.contains(a)).count();
        if left != 1 || right != 1 {
            return Ok(Some(format!(
                "{left} left and {right} right *cosets of {u} (need one each)"
            )));
        }
    }
    Ok(None)
}

fn validated(m: &CoarseStructure, x: FixedBitSet, what: &str) -> Result<FullFilter> {
    match filter_violation(m, &x)? {
        None => Ok(FullFilter { members: x }),
        Some(why) => Err(Error::Structural(format!("{what} is not a full filter: {why}"))),
    }
}

/// All full filters, as upward closures of the left *cosets of the minimum *subgroup.
///
/// A full filter contains exactly one left *coset of the minimum *subgroup,
/// and when those are `⊑`-minimal the filter is that element's upward closure.
pub fn full_filters(m: &CoarseStructure) -> Result<Vec<FullFilter>> {
    let v0 = m.minimum_subgroup()?;
    let order = m.order()?;
    let mut out = Vec::new();
    for c in m.lc_list(v0) {
        let up = order.up(c).clone();
        if filter_violation(m, &up)?.is_none() {
            out.push(FullFilter { members: up });
        }
    }
    Ok(out)
}

/// `{C : ∃A∈x ∃B∈y AB ⊑ C}`.
pub fn filter_product(m: &CoarseStructure, x: &FullFilter, y: &FullFilter) -> Result<FullFilter> {
    validated(m, raw_product(m, &x.members, &y.members), "product")
}

fn raw_product(m: &CoarseStructure, x: &FixedBitSet, y: &FixedBitSet) -> FixedBitSet {
    let mut out = FixedBitSet::with_capacity(m.size());
    for a in x.ones() {
        for b in y.ones() {
            out.union_with(m.tops(a, b));
        }
    }
    out
}

/// `{A⋄ : A ∈ x}`.
pub fn filter_inverse(m: &CoarseStructure, x: &FullFilter) -> Result<FullFilter> {
    let mut out = FixedBitSet::with_capacity(m.size());
    for a in x.members.ones() {
        out.insert(m.diamond(a)?);
    }
    validated(m, out, "inverse")
}

/// The filter generated by the *subgroups.
pub fn filter_neutral(m: &CoarseStructure) -> Result<FullFilter> {
    let order = m.order()?;
    let mut out = FixedBitSet::with_capacity(m.size());
    for u in m.subgroups() {
        out.union_with(order.up(u));
    }
    validated(m, out, "neutral filter")
}

/// `F(M)` with its multiplication and inverse tables.
#[derive(Debug, Clone, Serialize)]
pub struct FilterGroup {
    pub filters: Vec<FullFilter>,
    pub table: Vec<Vec<usize>>,
    pub inverse: Vec<usize>,
    pub identity: usize,
    #[serde(skip)]
    hats: Vec<FixedBitSet>,
}

/// Builds `F(M)`, checking the group laws, associativity included, on the whole table.
pub fn filter_group(m: &CoarseStructure) -> Result<FilterGroup> {
    let filters = full_filters(m)?;
    let index: HashMap<&FixedBitSet, usize> = filters.iter().enumerate().map(|(i, x)| (&x.members, i)).collect();
    let find = |x: &FixedBitSet, what: &dyn Fn() -> String| {
        index
            .get(x)
            .copied()
            .ok_or_else(|| Error::Structural(format!("{} is not an enumerated full filter", what())))
    };
    let k = filters.len();
    let mut table = vec![vec![0; k]; k];
    for i in 0..k {
        for j in 0..k {
            let p = filter_product(m, &filters[i], &filters[j])?;
            table[i][j] = find(&p.members, &|| format!("product of filters {i} and {j}"))?;
        }
    }
    let mut inverse = Vec::with_capacity(k);
    for (i, x) in filters.iter().enumerate() {
        inverse.push(find(&filter_inverse(m, x)?.members, &|| {
            format!("inverse of filter {i}")
        })?);
    }
    let identity = find(&filter_neutral(m)?.members, &|| "the neutral filter".into())?;
    for i in 0..k {
        if table[identity][i] != i || table[i][identity] != i {
            return Err(Error::Structural(format!(
                "neutral filter is not neutral for filter {i}"
            )));
        }
        if table[i][inverse[i]] != identity || table[inverse[i]][i] != identity {
            return Err(Error::Structural(format!(
                "filter {i} times its inverse is not neutral"
            )));
        }
    }
    for a in 0..k {
        for b in 0..k {
            for c in 0..k {
                if table[table[a][b]][c] != table[a][table[b][c]] {
                    return Err(Error::NonAssociative(a, b, c));
                }
            }
        }
    }
    let mut hats = vec![FixedBitSet::with_capacity(k); m.size()];
    for (i, x) in filters.iter().enumerate() {
        for a in x.members.ones() {
            hats[a].insert(i);
        }
    }
    Ok(FilterGroup {
        filters,
        table,
        inverse,
        identity,
        hats,
    })
}

impl FilterGroup {
    pub fn order(&self) -> usize {
        self.filters.len()
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.table[x][y]
    }

    pub fn index_of(&self, members: &FixedBitSet) -> Option<usize> {
        self.filters.iter().position(|x| &x.members == members)
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order()).all(|x| (0..x).all(|y| self.mul(x, y) == self.mul(y, x)))
    }

    /// `Â`: the filters containing `A`, as a set of filter indices.
    pub fn hat(&self, a: CosetId) -> &FixedBitSet {
        &self.hats[a]
    }

    /// `{xy : x ∈ X, y ∈ Y}`.
    pub fn set_product(&self, xs: &FixedBitSet, ys: &FixedBitSet) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.order());
        for x in xs.ones() {
            for y in ys.ones() {
                out.insert(self.mul(x, y));
            }
        }
        out
    }

    pub fn set_inverse(&self, xs: &FixedBitSet) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.order());
        out.extend(xs.ones().map(|x| self.inverse[x]));
        out
    }

    pub fn is_subgroup(&self, xs: &FixedBitSet) -> bool {
        xs.contains(self.identity)
            && xs
                .ones()
                .all(|x| xs.contains(self.inverse[x]) && xs.ones().all(|y| xs.contains(self.mul(x, y))))
    }

    /// `⋃_i V̂ Â_i`.
    pub fn double_coset_union(&self, v: CosetId, a: &[CosetId]) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.order());
        for &ai in a {
            out.union_with(&self.set_product(self.hat(v), self.hat(ai)));
        }
        out
    }

    /// Regular representation of the table as a permutation group.
    pub fn to_perm_group(&self, name: &str) -> Result<PermGroup> {
        table_to_perm_group(name, &self.table)
    }
}

/// Semantic `φ`: `ÂB̂ ∩ Ĉ = ∅`.
pub fn semantic_phi(fg: &FilterGroup, a: CosetId, b: CosetId, c: CosetId) -> bool {
    fg.set_product(fg.hat(a), fg.hat(b)).is_disjoint(fg.hat(c))
}

/// Semantic `ψ_n`: `B̂ ⊆ ⋃_i V̂Â_i`.
pub fn semantic_psi(fg: &FilterGroup, a: &[CosetId], b: CosetId, v: CosetId) -> bool {
    fg.hat(b).is_subset(&fg.double_coset_union(v, a))
}

/// Semantic `θ_n`: `⋃_i V̂Â_i` is a subgroup of `F(M)`.
pub fn semantic_theta(fg: &FilterGroup, a: &[CosetId], v: CosetId) -> bool {
    fg.is_subgroup(&fg.double_coset_union(v, a))
}

/// The group with left-regular permutations `i ↦ table[g][i]`.
pub fn table_to_perm_group(name: &str, table: &[Vec<usize>]) -> Result<PermGroup> {
    let n = table.len();
    let gens = table
        .iter()
        .map(|row| Perm::from_images(row.clone()))
        .collect::<Result<Vec<_>>>()?;
    let gens: Vec<Perm> = gens.into_iter().filter(|p| !p.is_identity()).collect();
    PermGroup::generate(name, n.max(1), gens)
}

fn require_left_coset(m: &CoarseStructure, v: CosetId, a: CosetId) -> Result<()> {
    if v >= m.size() || !m.is_star_subgroup(v) {
        return Err(Error::NotSubgroup(v));
    }
    if a >= m.size() || m.lc_of(a)? != v {
        return Err(Error::Invalid(format!("{a} is not a left *coset of {v}")));
    }
    Ok(())
}

/// `γ_V`: the unique `B ∈ LC(V)` with `SA ⊑ B` for some `S ∈ x`.
pub fn gamma_action(m: &CoarseStructure, v: CosetId, x: &FullFilter, a: CosetId) -> Result<CosetId> {
    require_left_coset(m, v, a)?;
    let lcv = m.lc_list(v);
    let targets: Vec<CosetId> = lcv
        .into_iter()
        .filter(|&b| x.members.ones().any(|s| m.relation(s, a, b)))
        .collect();
    match targets.as_slice() {
        [b] => Ok(*b),
        [] => Err(Error::Structural(format!("no S in the filter moves {a} into LC({v})"))),
        _ => Err(Error::Structural(format!("{a} has targets {targets:?} in LC({v})"))),
    }
}

/// The permutation representation of `F(M)` on `LC(W)`, with `LC(W)` numbered in ascending order.
#[derive(Debug, Clone, Serialize)]
pub struct ThetaEmbedding {
    pub subgroup: CosetId,
    pub cosets: Vec<CosetId>,
    /// `images[i]` is the permutation for filter `i`.
    pub images: Vec<Vec<usize>>,
    pub image_order: usize,
    /// Filter indices acting trivially.
    pub kernel: Vec<usize>,
    #[serde(skip)]
    pub image: PermGroup,
}

impl ThetaEmbedding {
    pub fn is_faithful(&self) -> bool {
        self.kernel.len() == 1
    }
}

pub fn theta_embedding(m: &CoarseStructure, fg: &FilterGroup, w: CosetId) -> Result<ThetaEmbedding> {
    if w >= m.size() || !m.is_star_subgroup(w) {
        return Err(Error::NotSubgroup(w));
    }
    let cosets = m.lc_list(w);
    let mut images = Vec::with_capacity(fg.order());
    for x in &fg.filters {
        let img = cosets
            .iter()
            .map(|&a| {
                let b = gamma_action(m, w, x, a)?;
                Ok(cosets.binary_search(&b).expect("target lies in LC(W)"))
            })
            .collect::<Result<Vec<_>>>()?;
        images.push(img);
    }
    let kernel: Vec<usize> = images
        .iter()
        .enumerate()
        .filter(|(_, img)| img.iter().enumerate().all(|(i, &j)| i == j))
        .map(|(i, _)| i)
        .collect();
    let mut gens = Vec::new();
    for img in &images {
        let p = Perm::from_images(img.clone())?;
        if !p.is_identity() && !gens.contains(&p) {
            gens.push(p);
        }
    }
    let image = PermGroup::generate(format!("theta({w})"), cosets.len(), gens)?;
    Ok(ThetaEmbedding {
        subgroup: w,
        cosets,
        images,
        image_order: image.order(),
        kernel,
        image,
    })
}

/// Outcome of checking `g ↦ {A : g ∈ A}` against `F(M(G))`.
#[derive(Debug, Clone, Serialize)]
pub struct ReconstructionReport {
    pub group: String,
    pub group_order: usize,
    pub structure_size: usize,
    pub filters: usize,
    /// `phi[g]` is the filter index of `Φ(g)`.
    pub phi: Vec<usize>,
    pub bijective: bool,
    pub homomorphism: bool,
    pub intersections: bool,
    pub holds: bool,
    pub counterexample: Option<String>,
}

pub fn reconstruct_check(g: &PermGroup) -> Result<ReconstructionReport> {
    reconstruct_check_bounded(g, &Bounds::default())
}

pub fn reconstruct_check_bounded(g: &PermGroup, bounds: &Bounds) -> Result<ReconstructionReport> {
    let lc = coarse_of_group_bounded(g, bounds)?;
    let m = &lc.structure;
    let fg = filter_group(m)?;
    let n = m.size();
    let mut counterexample = None;
    let mut phi = Vec::with_capacity(g.order());
    for x in 0..g.order() {
        let mut set = FixedBitSet::with_capacity(n);
        set.extend((0..n).filter(|&a| lc.members(a).is_some_and(|mem| mem.binary_search(&x).is_ok())));
        match fg.index_of(&set) {
            Some(i) => phi.push(i),
            None => {
                counterexample.get_or_insert_with(|| format!("Φ({}) is not a full filter", g.element(x)));
                phi.push(usize::MAX);
            }
        }
    }
    let mut seen = FixedBitSet::with_capacity(fg.order());
    seen.extend(phi.iter().copied().filter(|&i| i != usize::MAX));
    let bijective = counterexample.is_none() && seen.count_ones(..) == g.order() && fg.order() == g.order();
    if !bijective {
        counterexample.get_or_insert_with(|| format!("{} filters for {} elements", fg.order(), g.order()));
    }
    let mut homomorphism = bijective;
    if bijective {
        'outer: for a in 0..g.order() {
            for b in 0..g.order() {
                if phi[g.mul(a, b)] != fg.mul(phi[a], phi[b]) {
                    homomorphism = false;
                    counterexample = Some(format!(
                        "Φ({}·{}) ≠ Φ({})Φ({})",
                        g.element(a),
                        g.element(b),
                        g.element(a),
                        g.element(b)
                    ));
                    break 'outer;
                }
            }
        }
    }
    let mut intersections = true;
    for (i, x) in fg.filters.iter().enumerate() {
        let mut common: Option<Vec<usize>> = None;
        for a in x.members.ones() {
            let mem = lc.members(a).unwrap_or(&[]);
            common = Some(match common {
                None => mem.to_vec(),
                Some(c) => c.into_iter().filter(|e| mem.binary_search(e).is_ok()).collect(),
            });
        }
        let common = common.unwrap_or_default();
        let expected = phi.iter().position(|&p| p == i);
        if common.len() != 1 || Some(common[0]) != expected {
            intersections = false;
            counterexample.get_or_insert_with(|| format!("filter {i} intersects to {common:?}"));
            break;
        }
    }
    Ok(ReconstructionReport {
        group: g.name().to_string(),
        group_order: g.order(),
        structure_size: n,
        filters: fg.order(),
        phi,
        bijective,
        homomorphism,
        intersections,
        holds: bijective && homomorphism && intersections,
        counterexample,
    })
}

/// The inverse limit of the quotients `LC(N_k)` along a descending normal chain.
#[derive(Debug, Clone, Serialize)]
pub struct InverseLimit {
    pub chain: Vec<CosetId>,
    pub quotients: Vec<QuotientGroup>,
    /// `projections[k][i]` is the position in `LC(N_{k-1})` above position `i` of `LC(N_k)`; empty for `k = 0`.
    pub projections: Vec<Vec<usize>>,
    /// Coherent sequences, as element ids per level.
    pub sequences: Vec<Vec<CosetId>>,
    pub table: Vec<Vec<usize>>,
    pub identity: usize,
    /// `phi[f]` is the filter index of `{C : ∃k f(k) ⊑ C}`.
    pub phi: Vec<usize>,
    pub filter_group_order: usize,
    pub holds: bool,
    pub counterexample: Option<String>,
}

impl InverseLimit {
    pub fn order(&self) -> usize {
        self.sequences.len()
    }

    pub fn to_perm_group(&self, name: &str) -> Result<PermGroup> {
        table_to_perm_group(name, &self.table)
    }
}

pub fn inverse_limit_reconstruct(tc: &TowerCoarse) -> Result<InverseLimit> {
    let m = &tc.coarse.structure;
    let chain = tc.chain.clone();
    if chain.is_empty() {
        return Err(Error::Invalid("empty chain".into()));
    }
    let order = m.order()?;
    for w in chain.windows(2) {
        if !m.sub_order(w[1], w[0]) {
            return Err(Error::Invalid(format!(
                "chain is not descending at {} ⊒ {}",
                w[0], w[1]
            )));
        }
    }
    let quotients = chain.iter().map(|&u| m.quotient_group(u)).collect::<Result<Vec<_>>>()?;
    let mut projections = vec![Vec::new()];
    for k in 1..chain.len() {
        let (lo, hi) = (&quotients[k - 1], &quotients[k]);
        let mut p = Vec::with_capacity(hi.order());
        for &a in &hi.elements {
            let above: Vec<usize> = (0..lo.order()).filter(|&j| order.leq(a, lo.elements[j])).collect();
            match above.as_slice() {
                [j] => p.push(*j),
                _ => {
                    return Err(Error::Structural(format!(
                        "{a} lies below {} elements of LC({})",
                        above.len(),
                        chain[k - 1]
                    )))
                }
            }
        }
        for x in 0..hi.order() {
            for y in 0..hi.order() {
                if p[hi.mul(x, y)] != lo.mul(p[x], p[y]) {
                    return Err(Error::Structural(format!(
                        "projection to level {} is not a homomorphism",
                        k - 1
                    )));
                }
            }
        }
        projections.push(p);
    }
    // Coherent sequences as positions per level.
    let mut seqs: Vec<Vec<usize>> = (0..quotients[0].order()).map(|i| vec![i]).collect();
    for k in 1..chain.len() {
        let mut next = Vec::new();
        for s in &seqs {
            for (i, &up) in projections[k].iter().enumerate() {
                if up == s[k - 1] {
                    let mut t = s.clone();
                    t.push(i);
                    next.push(t);
                }
            }
        }
        seqs = next;
    }
    let index: HashMap<&Vec<usize>, usize> = seqs.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut table = vec![vec![0; seqs.len()]; seqs.len()];
    for (i, s) in seqs.iter().enumerate() {
        for (j, t) in seqs.iter().enumerate() {
            let prod: Vec<usize> = (0..chain.len()).map(|k| quotients[k].mul(s[k], t[k])).collect();
            table[i][j] = *index
                .get(&prod)
                .ok_or_else(|| Error::Structural("product of coherent sequences is not coherent".into()))?;
        }
    }
    let id_seq: Vec<usize> = quotients.iter().map(|q| q.identity).collect();
    let identity = index[&id_seq];
    let sequences: Vec<Vec<CosetId>> = seqs
        .iter()
        .map(|s| s.iter().enumerate().map(|(k, &i)| quotients[k].elements[i]).collect())
        .collect();

    let fg = filter_group(m)?;
    let mut counterexample = None;
    let mut phi = Vec::with_capacity(sequences.len());
    for (f, seq) in sequences.iter().enumerate() {
        let mut set = FixedBitSet::with_capacity(m.size());
        for &a in seq {
            set.union_with(order.up(a));
        }
        match fg.index_of(&set) {
            Some(i) => phi.push(i),
            None => {
                counterexample.get_or_insert_with(|| format!("Φ of sequence {f} is not a full filter"));
                phi.push(usize::MAX);
            }
        }
    }
    let mut hit = FixedBitSet::with_capacity(fg.order());
    hit.extend(phi.iter().copied().filter(|&i| i != usize::MAX));
    if counterexample.is_none() && (hit.count_ones(..) != fg.order() || sequences.len() != fg.order()) {
        counterexample = Some(format!(
            "{} sequences map onto {} of {} filters",
            sequences.len(),
            hit.count_ones(..),
            fg.order()
        ));
    }
    if counterexample.is_none() {
        'outer: for x in 0..sequences.len() {
            for y in 0..sequences.len() {
                if phi[table[x][y]] != fg.mul(phi[x], phi[y]) {
                    counterexample = Some(format!("Φ is not multiplicative on sequences {x}, {y}"));
                    break 'outer;
                }
            }
        }
    }
    Ok(InverseLimit {
        chain,
        quotients,
        projections,
        sequences,
        table,
        identity,
        phi,
        filter_group_order: fg.order(),
        holds: counterexample.is_none(),
        counterexample,
    })
}
