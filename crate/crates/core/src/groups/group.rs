use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::OnceLock;

use fixedbitset::FixedBitSet;

use super::perm::Perm;
use crate::bounds::Bounds;
use crate::error::{Error, Result, Side};

/// Groups at most this large get a cached Cayley table.
const TABLE_LIMIT: usize = 1024;

/// A finite permutation group given by generators, with its elements enumerated.
///
/// Elements are listed breadth-first from the identity, extending by right
/// multiplication with the generators in input order. Index 0 is always the
/// identity, and the order is reproducible for identical input.
#[derive(Debug, Clone)]
pub struct PermGroup {
    name: String,
    degree: usize,
    generators: Vec<Perm>,
    elements: Vec<Perm>,
    index: HashMap<Perm, usize>,
    // For i > 0: elements[i] == elements[parent] * generators[gen].
    spanning: Vec<Option<(usize, usize)>>,
    table: OnceLock<Vec<usize>>,
}

impl PermGroup {
    /// Generator closure with the default element bound.
    pub fn generate(name: impl Into<String>, degree: usize, generators: Vec<Perm>) -> Result<Self> {
        Self::generate_bounded(name, degree, generators, Bounds::default().max_group_order)
    }

    pub fn generate_bounded(
        name: impl Into<String>,
        degree: usize,
        generators: Vec<Perm>,
        max_order: usize,
    ) -> Result<Self> {
        if degree == 0 {
            return Err(Error::Invalid("degree must be positive".into()));
        }
        for g in &generators {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch {
                    expected: degree,
                    got: g.degree(),
                });
            }
        }
        let id = Perm::identity(degree);
        let mut elements = vec![id.clone()];
        let mut index = HashMap::from([(id, 0usize)]);
        let mut spanning = vec![None];
        let mut head = 0;
        while head < elements.len() {
            for (k, g) in generators.iter().enumerate() {
                let next = elements[head].compose(g);
                if index.contains_key(&next) {
                    continue;
                }
                if elements.len() >= max_order {
                    return Err(Error::bound("group order", elements.len() + 1, max_order));
                }
                index.insert(next.clone(), elements.len());
                elements.push(next);
                spanning.push(Some((head, k)));
            }
            head += 1;
        }
        Ok(PermGroup {
            name: name.into(),
            degree,
            generators,
            elements,
            index,
            spanning,
            table: OnceLock::new(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn element(&self, i: usize) -> &Perm {
        &self.elements[i]
    }

    pub fn index_of(&self, p: &Perm) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub const IDENTITY: usize = 0;

    /// `(parent, generator)` with `element(i) == element(parent) * generator`, `None` for the identity.
    pub fn spanning_edge(&self, i: usize) -> Option<(usize, usize)> {
        self.spanning[i]
    }

    /// Index of `element(a) * element(b)`.
    pub fn mul(&self, a: usize, b: usize) -> usize {
        let n = self.order();
        if n <= TABLE_LIMIT {
            self.table()[a * n + b]
        } else {
            self.index[&self.elements[a].compose(&self.elements[b])]
        }
    }

    pub fn inv(&self, a: usize) -> usize {
        self.index[&self.elements[a].inverse()]
    }

    fn table(&self) -> &[usize] {
        self.table.get_or_init(|| {
            let n = self.order();
            let mut t = Vec::with_capacity(n * n);
            for a in &self.elements {
                for b in &self.elements {
                    t.push(self.index[&a.compose(b)]);
                }
            }
            t
        })
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Indices of a generating set, dropping generators already in the span of earlier ones.
    pub fn reduced_generators(&self) -> Vec<usize> {
        let mut kept: Vec<usize> = Vec::new();
        let mut span = self.closure_of(&[]);
        for g in &self.generators {
            let i = self.index[g];
            if !span.contains(i) {
                kept.push(i);
                span = self.closure_of(&kept);
            }
        }
        kept
    }

    /// Subgroup generated by the given element indices.
    pub fn closure_of(&self, gens: &[usize]) -> FixedBitSet {
        let n = self.order();
        let mut members = FixedBitSet::with_capacity(n);
        members.insert(Self::IDENTITY);
        let mut queue = VecDeque::from([Self::IDENTITY]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !members.put(y) {
                    queue.push_back(y);
                }
            }
        }
        members
    }

    /// Every subgroup, each exactly once, sorted by order and then by member list.
    ///
    /// Bottom-up cyclic extension: starting from the trivial subgroup, adjoin
    /// one element at a time and close.
    pub fn all_subgroups(&self, max_order: usize) -> Result<Vec<Subgroup>> {
        if self.order() > max_order {
            return Err(Error::bound(
                "group order for subgroup enumeration",
                self.order(),
                max_order,
            ));
        }
        let n = self.order();
        let trivial = self.closure_of(&[]);
        let mut seen: HashSet<FixedBitSet> = HashSet::from([trivial.clone()]);
        let mut found: Vec<(FixedBitSet, Vec<usize>)> = vec![(trivial, Vec::new())];
        let mut head = 0;
        while head < found.len() {
            let (members, gens) = found[head].clone();
            for g in 0..n {
                if members.contains(g) {
                    continue;
                }
                let mut next_gens = gens.clone();
                next_gens.push(g);
                let next = self.closure_of(&next_gens);
                if seen.insert(next.clone()) {
                    found.push((next, next_gens));
                }
            }
            head += 1;
        }
        let mut subgroups: Vec<Subgroup> = found
            .into_iter()
            .map(|(members, _)| Subgroup::from_members(members))
            .collect();
        subgroups.sort_by(|a, b| {
            a.order()
                .cmp(&b.order())
                .then_with(|| a.member_list().cmp(&b.member_list()))
        });
        Ok(subgroups)
    }

    /// Coset partition of the group by `u`; the first cell is `u` itself.
    pub fn cosets(&self, u: &Subgroup, side: Side) -> Vec<Vec<usize>> {
        let n = self.order();
        let mut covered = FixedBitSet::with_capacity(n);
        let mut cells = Vec::new();
        for a in 0..n {
            if covered.contains(a) {
                continue;
            }
            let mut cell: Vec<usize> = u
                .members()
                .map(|x| match side {
                    Side::Left => self.mul(a, x),
                    Side::Right => self.mul(x, a),
                })
                .collect();
            cell.sort_unstable();
            for &c in &cell {
                covered.insert(c);
            }
            cells.push(cell);
        }
        cells
    }

    pub fn pointwise_stabilizer(&self, points: &[usize]) -> Result<Subgroup> {
        if let Some(&p) = points.iter().find(|&&p| p >= self.degree) {
            return Err(Error::Invalid(format!("point {p} outside degree {}", self.degree)));
        }
        let members = self
            .elements
            .iter()
            .enumerate()
            .filter(|(_, g)| points.iter().all(|&p| g.apply(p) == p))
            .map(|(i, _)| i);
        Ok(Subgroup::from_indices(self.order(), members))
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup::from_indices(self.order(), 0..self.order())
    }

    pub fn trivial(&self) -> Subgroup {
        Subgroup::from_indices(self.order(), [Self::IDENTITY])
    }

    /// Orbits of the group on `arity`-tuples of points.
    pub fn orbits(&self, arity: usize, max_tuples: usize) -> Result<TupleOrbits> {
        TupleOrbits::compute(self, arity, max_tuples)
    }

    /// Checks closure of a candidate member set.
    pub fn is_subgroup(&self, members: &FixedBitSet) -> bool {
        members.contains(Self::IDENTITY)
            && members
                .ones()
                .all(|a| members.contains(self.inv(a)) && members.ones().all(|b| members.contains(self.mul(a, b))))
    }
}

/// A subgroup of some [`PermGroup`], stored as a set of element indices of that group.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subgroup {
    members: FixedBitSet,
}

impl Subgroup {
    pub fn from_members(members: FixedBitSet) -> Self {
        Subgroup { members }
    }

    pub fn from_indices(group_order: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut members = FixedBitSet::with_capacity(group_order);
        members.extend(indices);
        Subgroup { members }
    }

    pub fn order(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.contains(i)
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.ones()
    }

    pub fn member_list(&self) -> Vec<usize> {
        self.members.ones().collect()
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.members
    }

    pub fn intersection(&self, other: &Subgroup) -> Subgroup {
        let mut members = self.members.clone();
        members.intersect_with(&other.members);
        Subgroup { members }
    }
}

/// Orbit labelling of `{0..degree-1}^arity`.
///
/// Tuples are numbered in lexicographic order (base `degree`, first
/// coordinate most significant); each tuple is labelled by the number of the
/// least tuple in its orbit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleOrbits {
    pub degree: usize,
    pub arity: usize,
    pub labels: Vec<usize>,
}

impl TupleOrbits {
    fn compute(group: &PermGroup, arity: usize, max_tuples: usize) -> Result<Self> {
        if arity == 0 {
            return Err(Error::Invalid("arity must be at least 1".into()));
        }
        let degree = group.degree();
        let count = degree
            .checked_pow(arity as u32)
            .filter(|&c| c <= max_tuples)
            .ok_or_else(|| Error::bound("tuple count", degree.saturating_pow(arity as u32), max_tuples))?;
        const UNSET: usize = usize::MAX;
        let mut labels = vec![UNSET; count];
        let mut scratch = vec![0; arity];
        for start in 0..count {
            if labels[start] != UNSET {
                continue;
            }
            labels[start] = start;
            let mut queue = VecDeque::from([start]);
            while let Some(t) = queue.pop_front() {
                decode(t, degree, &mut scratch);
                for g in group.generators() {
                    let image = scratch.iter().fold(0, |acc, &p| acc * degree + g.apply(p));
                    if labels[image] == UNSET {
                        labels[image] = start;
                        queue.push_back(image);
                    }
                }
            }
        }
        Ok(TupleOrbits { degree, arity, labels })
    }

    pub fn num_orbits(&self) -> usize {
        self.representatives().len()
    }

    /// Tuple numbers of the orbit representatives, ascending.
    pub fn representatives(&self) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(i, &l)| *i == l)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn encode(&self, tuple: &[usize]) -> usize {
        tuple.iter().fold(0, |acc, &p| acc * self.degree + p)
    }

    pub fn decode(&self, t: usize) -> Vec<usize> {
        let mut out = vec![0; self.arity];
        decode(t, self.degree, &mut out);
        out
    }

    pub fn orbit_of(&self, tuple: &[usize]) -> usize {
        self.labels[self.encode(tuple)]
    }

    pub fn orbit_size(&self, label: usize) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }
}

fn decode(mut t: usize, degree: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = t % degree;
        t /= degree;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::catalog;

    fn perm(deg: usize, cycles: &[&[usize]]) -> Perm {
        Perm::from_cycles(deg, cycles).unwrap()
    }

    // Brute-force subgroup count: every subset containing the identity and closed under products.
    fn brute_force_subgroup_count(g: &PermGroup) -> usize {
        let n = g.order();
        assert!(n <= 16);
        (0u32..1 << n)
            .filter(|mask| {
                let set: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                mask & 1 == 1 && set.iter().all(|&a| set.iter().all(|&b| mask >> g.mul(a, b) & 1 == 1))
            })
            .count()
    }

    #[test]
    fn closure_examples() {
        let z2 = PermGroup::generate("Z2", 2, vec![perm(2, &[&[0, 1]])]).unwrap();
        assert_eq!(z2.order(), 2);
        let s3 = PermGroup::generate("S3", 3, vec![perm(3, &[&[0, 1]]), perm(3, &[&[0, 1, 2]])]).unwrap();
        assert_eq!(s3.order(), 6);
        let trivial = PermGroup::generate("1", 3, vec![]).unwrap();
        assert_eq!(trivial.order(), 1);
        assert!(trivial.element(0).is_identity());
    }

    #[test]
    fn closure_respects_bound() {
        let err = PermGroup::generate_bounded("S5", 5, catalog::symmetric(5).generators().to_vec(), 100).unwrap_err();
        assert!(matches!(err, Error::BoundExceeded { .. }));
    }

    #[test]
    fn closure_is_breadth_first_and_spanning() {
        let s3 = catalog::symmetric(3);
        for i in 1..s3.order() {
            let (parent, k) = s3.spanning_edge(i).unwrap();
            assert!(parent < i);
            assert_eq!(s3.element(parent).compose(&s3.generators()[k]), *s3.element(i));
        }
    }

    #[test]
    fn degree_mismatch_is_rejected() {
        let err = PermGroup::generate("bad", 3, vec![perm(2, &[&[0, 1]])]).unwrap_err();
        assert_eq!(err, Error::DegreeMismatch { expected: 3, got: 2 });
    }

    #[test]
    fn subgroup_counts_match_brute_force() {
        for g in [
            catalog::cyclic(2),
            catalog::symmetric(3),
            catalog::cyclic(4),
            catalog::klein_four(),
            catalog::dihedral(4),
            catalog::quaternion(),
        ] {
            let subs = g.all_subgroups(48).unwrap();
            assert_eq!(subs.len(), brute_force_subgroup_count(&g), "{}", g.name());
            assert!(subs.iter().all(|s| g.is_subgroup(s.bits())));
        }
    }

    #[test]
    fn subgroup_examples() {
        assert_eq!(catalog::cyclic(2).all_subgroups(48).unwrap().len(), 2);
        let s3 = catalog::symmetric(3).all_subgroups(48).unwrap();
        let orders: Vec<usize> = s3.iter().map(Subgroup::order).collect();
        assert_eq!(orders, vec![1, 2, 2, 2, 3, 6]);
        assert_eq!(catalog::cyclic(4).all_subgroups(48).unwrap().len(), 3);
    }

    #[test]
    fn subgroup_bound_is_enforced() {
        let err = catalog::symmetric(5).all_subgroups(48).unwrap_err();
        assert!(matches!(err, Error::BoundExceeded { .. }));
    }

    #[test]
    fn coset_examples() {
        let z2 = catalog::cyclic(2);
        assert_eq!(z2.cosets(&z2.trivial(), Side::Left), vec![vec![0], vec![1]]);

        let s3 = catalog::symmetric(3);
        let subs = s3.all_subgroups(48).unwrap();
        let t01 = s3.index_of(&perm(3, &[&[0, 1]])).unwrap();
        let u = subs.iter().find(|s| s.order() == 2 && s.contains(t01)).unwrap();
        let cells = s3.cosets(u, Side::Left);
        assert_eq!(cells.len(), 3);
        assert!(cells.iter().all(|c| c.len() == 2));
        assert_eq!(cells[0], u.member_list());

        let a3 = subs.iter().find(|s| s.order() == 3).unwrap();
        let cells = s3.cosets(a3, Side::Right);
        assert_eq!(cells.len(), 2);
        assert!(cells.iter().all(|c| c.len() == 3));
    }

    #[test]
    fn stabilizer_examples() {
        let s3 = catalog::symmetric(3);
        assert_eq!(s3.pointwise_stabilizer(&[0]).unwrap().order(), 2);
        assert_eq!(s3.pointwise_stabilizer(&[0, 1, 2]).unwrap().order(), 1);
        assert_eq!(s3.pointwise_stabilizer(&[]).unwrap(), s3.whole());
        assert!(s3.pointwise_stabilizer(&[3]).is_err());
    }

    #[test]
    fn orbit_examples() {
        let z2 = catalog::cyclic(2);
        assert_eq!(z2.orbits(1, 100).unwrap().num_orbits(), 1);
        let s3 = catalog::symmetric(3);
        let o = s3.orbits(2, 100).unwrap();
        assert_eq!(o.num_orbits(), 2);
        assert_eq!(o.orbit_of(&[1, 1]), o.orbit_of(&[0, 0]));
        assert_eq!(o.orbit_of(&[2, 1]), o.encode(&[0, 1]));
        let trivial = catalog::trivial(2);
        assert_eq!(trivial.orbits(1, 100).unwrap().num_orbits(), 2);
        assert!(s3.orbits(3, 10).is_err());
    }
}
