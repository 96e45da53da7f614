//! Isomorphism of coarse structures and of groups, and the comparison of the two.

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use crate::bounds::Bounds;
use crate::builders::coarse_of_group_bounded;
use crate::coarse::CoarseStructure;
use crate::error::{Error, Result};
use crate::groups::PermGroup;

mod fingerprint;
mod orbit;

pub use fingerprint::{ef_fingerprint, orbit_fingerprint, Fingerprint};
pub use orbit::{conjugacy_check, orbit_structure, ConjugacyReport, OrbitStructure};

/// Joint color refinement of two structures over the same color namespace.
///
/// Colors start from the diagonal and the triple counts per position, then each
/// round adds the multiset of (position, colors of the other two) over all triples.
fn refine_jointly(ms: [&CoarseStructure; 2]) -> [Vec<usize>; 2] {
    let n = ms[0].size();
    let mut colors: [Vec<usize>; 2] = [vec![0; n], vec![0; n]];
    let mut classes = 0;
    for round in 0.. {
        let sigs: Vec<Vec<Vec<usize>>> = ms
            .iter()
            .zip(&colors)
            .map(|(m, col)| {
                let mut per: Vec<Vec<usize>> = (0..n).map(|a| vec![col[a], m.relation(a, a, a) as usize]).collect();
                let mut entries: Vec<Vec<[usize; 3]>> = vec![Vec::new(); n];
                for (a, b, c) in m.triples() {
                    entries[a].push([0, col[b], col[c]]);
                    entries[b].push([1, col[a], col[c]]);
                    entries[c].push([2, col[a], col[b]]);
                }
                for (a, mut e) in entries.into_iter().enumerate() {
                    e.sort_unstable();
                    per[a].push(e.len());
                    per[a].extend(e.into_iter().flatten());
                }
                per
            })
            .collect();
        let mut ids: BTreeMap<&Vec<usize>, usize> = BTreeMap::new();
        for s in sigs.iter().flatten() {
            ids.insert(s, 0);
        }
        for (i, v) in ids.values_mut().enumerate() {
            *v = i;
        }
        let next: [Vec<usize>; 2] = [
            sigs[0].iter().map(|s| ids[s]).collect(),
            sigs[1].iter().map(|s| ids[s]).collect(),
        ];
        let count = ids.len();
        colors = next;
        if round > 0 && count == classes {
            break;
        }
        classes = count;
    }
    colors
}

/// A bijection `f` with `R_M(a,b,c) ⟺ R_N(fa,fb,fc)`, or `None`.
pub fn struct_iso(m: &CoarseStructure, n: &CoarseStructure) -> Option<Vec<usize>> {
    if m.size() != n.size() || m.num_triples() != n.num_triples() {
        return None;
    }
    let size = m.size();
    let [cm, cn] = refine_jointly([m, n]);
    let mut hist_m = BTreeMap::new();
    let mut hist_n = BTreeMap::new();
    for &c in &cm {
        *hist_m.entry(c).or_insert(0usize) += 1;
    }
    for &c in &cn {
        *hist_n.entry(c).or_insert(0usize) += 1;
    }
    if hist_m != hist_n {
        return None;
    }
    // Most constrained elements first.
    let mut order: Vec<usize> = (0..size).collect();
    order.sort_by_key(|&a| (hist_m[&cm[a]], cm[a], a));
    let mut f = vec![usize::MAX; size];
    let mut used = vec![false; size];
    let mut mapped: Vec<usize> = Vec::with_capacity(size);

    fn consistent(m: &CoarseStructure, n: &CoarseStructure, f: &[usize], mapped: &[usize], a: usize) -> bool {
        let fa = f[a];
        if m.relation(a, a, a) != n.relation(fa, fa, fa) {
            return false;
        }
        for &b in mapped {
            let fb = f[b];
            let pairs = [(a, a, b), (a, b, a), (b, a, a), (a, b, b), (b, a, b), (b, b, a)];
            for (x, y, z) in pairs {
                if m.relation(x, y, z) != n.relation(f[x], f[y], f[z]) {
                    return false;
                }
            }
            for &c in mapped {
                let fc = f[c];
                if m.relation(a, b, c) != n.relation(fa, fb, fc)
                    || m.relation(b, a, c) != n.relation(fb, fa, fc)
                    || m.relation(b, c, a) != n.relation(fb, fc, fa)
                {
                    return false;
                }
            }
        }
        true
    }

    #[allow(clippy::too_many_arguments)]
    fn search(
        m: &CoarseStructure,
        n: &CoarseStructure,
        cm: &[usize],
        cn: &[usize],
        order: &[usize],
        f: &mut [usize],
        used: &mut [bool],
        mapped: &mut Vec<usize>,
    ) -> bool {
        let depth = mapped.len();
        if depth == order.len() {
            return true;
        }
        let a = order[depth];
        for b in 0..n.size() {
            if used[b] || cn[b] != cm[a] {
                continue;
            }
            f[a] = b;
            if consistent(m, n, f, mapped, a) {
                used[b] = true;
                mapped.push(a);
                if search(m, n, cm, cn, order, f, used, mapped) {
                    return true;
                }
                mapped.pop();
                used[b] = false;
            }
            f[a] = usize::MAX;
        }
        false
    }

    search(m, n, &cm, &cn, &order, &mut f, &mut used, &mut mapped).then_some(f)
}

/// Checks that `f` is an isomorphism of the two structures.
pub fn is_struct_iso(m: &CoarseStructure, n: &CoarseStructure, f: &[usize]) -> bool {
    if m.size() != n.size() || f.len() != m.size() || m.num_triples() != n.num_triples() {
        return false;
    }
    let mut seen = vec![false; n.size()];
    for &x in f {
        if x >= n.size() || std::mem::replace(&mut seen[x], true) {
            return false;
        }
    }
    m.triples().all(|(a, b, c)| n.relation(f[a], f[b], f[c]))
}

/// Element orders, indexed like the group's elements.
fn element_orders(g: &PermGroup) -> Vec<usize> {
    g.elements().iter().map(|p| p.order()).collect()
}

/// Extends generator images along the Cayley graph; `None` if that is not a bijective homomorphism.
fn extend_images(g: &PermGroup, h: &PermGroup, gens: &[usize], images: &[usize]) -> Option<Vec<usize>> {
    let mut f = vec![usize::MAX; g.order()];
    f[PermGroup::IDENTITY] = PermGroup::IDENTITY;
    let mut queue = VecDeque::from([PermGroup::IDENTITY]);
    while let Some(x) = queue.pop_front() {
        for (&s, &t) in gens.iter().zip(images) {
            let y = g.mul(x, s);
            let fy = h.mul(f[x], t);
            if f[y] == usize::MAX {
                f[y] = fy;
                queue.push_back(y);
            } else if f[y] != fy {
                return None;
            }
        }
    }
    let mut seen = vec![false; h.order()];
    for &y in &f {
        if y == usize::MAX || std::mem::replace(&mut seen[y], true) {
            return None;
        }
    }
    Some(f)
}

/// An isomorphism `G → H` as an element-index map, found by backtracking over generator images.
pub fn group_iso(g: &PermGroup, h: &PermGroup) -> Option<Vec<usize>> {
    if g.order() != h.order() {
        return None;
    }
    let (og, oh) = (element_orders(g), element_orders(h));
    let mut sg = og.clone();
    let mut sh = oh.clone();
    sg.sort_unstable();
    sh.sort_unstable();
    if sg != sh {
        return None;
    }
    let gens = g.reduced_generators();
    let mut images = Vec::with_capacity(gens.len());

    fn go(
        g: &PermGroup,
        h: &PermGroup,
        gens: &[usize],
        og: &[usize],
        oh: &[usize],
        images: &mut Vec<usize>,
    ) -> Option<Vec<usize>> {
        if images.len() == gens.len() {
            return extend_images(g, h, gens, images);
        }
        let want = og[gens[images.len()]];
        for t in 0..h.order() {
            if oh[t] != want {
                continue;
            }
            images.push(t);
            if let Some(f) = go(g, h, gens, og, oh, images) {
                return Some(f);
            }
            images.pop();
        }
        None
    }

    go(g, h, &gens, &og, &oh, &mut images)
}

/// Checks that `f` is an isomorphism of the two groups.
pub fn is_group_iso(g: &PermGroup, h: &PermGroup, f: &[usize]) -> bool {
    if g.order() != h.order() || f.len() != g.order() {
        return false;
    }
    let mut seen = vec![false; h.order()];
    for &y in f {
        if y >= h.order() || std::mem::replace(&mut seen[y], true) {
            return false;
        }
    }
    (0..g.order()).all(|a| (0..g.order()).all(|b| f[g.mul(a, b)] == h.mul(f[a], f[b])))
}

/// Both sides of `G ≅ H ⟺ M(G) ≅ M(H)`, computed independently.
#[derive(Debug, Clone, Serialize)]
pub struct KnsReport {
    pub left: String,
    pub right: String,
    pub groups_isomorphic: bool,
    pub structures_isomorphic: bool,
    pub group_witness: Option<Vec<usize>>,
    pub structure_witness: Option<Vec<usize>>,
    pub sizes: [usize; 2],
}

/// Errors with the full transcript if the two verdicts disagree.
pub fn kns_check(g: &PermGroup, h: &PermGroup) -> Result<KnsReport> {
    kns_check_bounded(g, h, &Bounds::default())
}

pub fn kns_check_bounded(g: &PermGroup, h: &PermGroup, bounds: &Bounds) -> Result<KnsReport> {
    let group_witness = group_iso(g, h);
    if let Some(f) = &group_witness {
        if !is_group_iso(g, h, f) {
            return Err(Error::Structural(format!("group isomorphism {f:?} fails verification")));
        }
    }
    let mg = coarse_of_group_bounded(g, bounds)?.structure;
    let mh = coarse_of_group_bounded(h, bounds)?.structure;
    let structure_witness = struct_iso(&mg, &mh);
    if let Some(f) = &structure_witness {
        if !is_struct_iso(&mg, &mh, f) {
            return Err(Error::Structural(format!(
                "structure isomorphism {f:?} fails verification"
            )));
        }
    }
    let report = KnsReport {
        left: g.name().to_string(),
        right: h.name().to_string(),
        groups_isomorphic: group_witness.is_some(),
        structures_isomorphic: structure_witness.is_some(),
        group_witness,
        structure_witness,
        sizes: [mg.size(), mh.size()],
    };
    if report.groups_isomorphic != report.structures_isomorphic {
        return Err(Error::Structural(format!(
            "verdicts disagree: {}",
            serde_json::to_string(&report).unwrap_or_default()
        )));
    }
    Ok(report)
}
