//! Finite truncations of the duality between subtrees of `2^{<ω}` without dead
//! ends and countable Boolean algebras.

use std::collections::BTreeSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest depth handled; atoms of the clopen algebra are stored in a `u64`.
pub const MAX_DEPTH: usize = 6;

/// A prefix-closed set of binary strings with no dead ends below `depth_bound`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BinaryTree {
    pub nodes: BTreeSet<String>,
    pub depth_bound: usize,
}

impl BinaryTree {
    pub fn new(nodes: impl IntoIterator<Item = String>, depth_bound: usize) -> Result<Self> {
        let t = BinaryTree {
            nodes: nodes.into_iter().collect(),
            depth_bound,
        };
        t.validate()?;
        Ok(t)
    }

    /// All strings of length at most `depth`.
    pub fn full(depth: usize) -> Self {
        let mut nodes = BTreeSet::new();
        for len in 0..=depth {
            for bits in 0..(1u64 << len) {
                nodes.insert(bit_string(bits, len));
            }
        }
        BinaryTree {
            nodes,
            depth_bound: depth,
        }
    }

    /// The single path `0^depth`.
    pub fn single_branch(depth: usize) -> Self {
        BinaryTree {
            nodes: (0..=depth).map(|n| "0".repeat(n)).collect(),
            depth_bound: depth,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.depth_bound > MAX_DEPTH {
            return Err(Error::bound("tree depth", self.depth_bound, MAX_DEPTH));
        }
        if !self.nodes.contains("") {
            return Err(Error::Invalid("tree has no root".into()));
        }
        for s in &self.nodes {
            if s.chars().any(|c| c != '0' && c != '1') {
                return Err(Error::Invalid(format!("node {s:?} is not a binary string")));
            }
            if s.len() > self.depth_bound {
                return Err(Error::Invalid(format!(
                    "node {s:?} is deeper than {}",
                    self.depth_bound
                )));
            }
            if !s.is_empty() && !self.nodes.contains(&s[..s.len() - 1]) {
                return Err(Error::Invalid(format!("node {s:?} has no parent")));
            }
            if s.len() < self.depth_bound && !self.has_child(s) {
                return Err(Error::Invalid(format!("node {s:?} is a dead end")));
            }
        }
        Ok(())
    }

    fn has_child(&self, s: &str) -> bool {
        self.nodes.contains(&format!("{s}0")) || self.nodes.contains(&format!("{s}1"))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes of length exactly `depth`, in lexicographic order.
    pub fn level(&self, depth: usize) -> Vec<String> {
        self.nodes.iter().filter(|s| s.len() == depth).cloned().collect()
    }

    pub fn truncate(&self, depth: usize) -> BinaryTree {
        BinaryTree {
            nodes: self.nodes.iter().filter(|s| s.len() <= depth).cloned().collect(),
            depth_bound: depth.min(self.depth_bound),
        }
    }
}

fn bit_string(bits: u64, len: usize) -> String {
    (0..len)
        .map(|i| if bits >> (len - 1 - i) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// The finite Boolean algebra of all sets of atoms; elements are bitmasks over `atoms`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiniteBA {
    pub atoms: Vec<String>,
}

impl FiniteBA {
    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn num_elements(&self) -> u128 {
        1u128 << self.atoms.len()
    }

    pub fn top(&self) -> u64 {
        if self.atoms.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.atoms.len()) - 1
        }
    }

    pub fn complement(&self, x: u64) -> u64 {
        self.top() & !x
    }

    /// An element as a string with one bit per atom.
    pub fn element_bits(&self, x: u64) -> String {
        (0..self.atoms.len())
            .map(|i| if x >> i & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    /// Generator `i` joins the atoms whose label has `1` at position `i`.
    pub fn level_generators(&self, depth: usize) -> Vec<u64> {
        (0..depth)
            .map(|i| {
                self.atoms
                    .iter()
                    .enumerate()
                    .filter(|(_, a)| a.as_bytes().get(i) == Some(&b'1'))
                    .fold(0u64, |acc, (j, _)| acc | 1 << j)
            })
            .collect()
    }

    /// `r_σ`: the conjunction of `g_i` or its complement according to `σ(i)`.
    pub fn conjunction(&self, generators: &[u64], sigma: &str) -> u64 {
        sigma.bytes().zip(generators).fold(self.top(), |acc, (bit, &g)| {
            acc & if bit == b'1' { g } else { self.complement(g) }
        })
    }
}

/// The clopen sets of `[T]` determined at level `depth`: one atom per node of that length.
pub fn clopen_algebra(t: &BinaryTree, depth: usize) -> Result<FiniteBA> {
    if depth > t.depth_bound {
        return Err(Error::Invalid(format!(
            "depth {depth} exceeds the tree's bound {}",
            t.depth_bound
        )));
    }
    Ok(FiniteBA { atoms: t.level(depth) })
}

/// Keeps `σ` iff `r_σ ≠ 0`, for all `σ` of length at most `generators.len()`.
pub fn ba_to_tree(b: &FiniteBA, generators: &[u64]) -> BinaryTree {
    let depth = generators.len();
    let mut nodes = BTreeSet::new();
    let mut frontier = vec![String::new()];
    // r_σ is monotone along prefixes, so only children of kept nodes can survive.
    while let Some(s) = frontier.pop() {
        if b.conjunction(generators, &s) == 0 {
            continue;
        }
        if s.len() < depth {
            frontier.push(format!("{s}0"));
            frontier.push(format!("{s}1"));
        }
        nodes.insert(s);
    }
    BinaryTree {
        nodes,
        depth_bound: depth,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StoneReport {
    pub depth: usize,
    pub nodes: usize,
    pub atoms: usize,
    pub elements: u128,
    pub tree_match: bool,
    /// `atom_map[i]` is the atom of the original algebra matched to atom `i` of the rebuilt one.
    pub atom_map: Option<Vec<usize>>,
    pub holds: bool,
    pub counterexample: Option<String>,
}

/// Tree → algebra → tree, then algebra → tree → algebra with the isomorphism found by atom matching.
pub fn stone_roundtrip(t: &BinaryTree, depth: usize) -> Result<StoneReport> {
    t.validate()?;
    let b = clopen_algebra(t, depth)?;
    let gens = b.level_generators(depth);
    let back = ba_to_tree(&b, &gens);
    let expected = t.truncate(depth);
    let mut counterexample = expected
        .nodes
        .symmetric_difference(&back.nodes)
        .next()
        .map(|s| format!("node {s:?} differs after the round trip"));
    let tree_match = counterexample.is_none();

    let rebuilt = clopen_algebra(&back, depth)?;
    let mut atom_map = Vec::with_capacity(rebuilt.num_atoms());
    let mut used = 0u64;
    for sigma in &rebuilt.atoms {
        let r = b.conjunction(&gens, sigma);
        if r.count_ones() != 1 || used & r != 0 {
            counterexample.get_or_insert_with(|| format!("r_{sigma} = {} is not a fresh atom", b.element_bits(r)));
            break;
        }
        used |= r;
        atom_map.push(r.trailing_zeros() as usize);
    }
    let algebra_iso = atom_map.len() == rebuilt.num_atoms() && used == b.top();
    if !algebra_iso {
        counterexample.get_or_insert_with(|| "atoms are not matched bijectively".into());
    }
    Ok(StoneReport {
        depth,
        nodes: expected.len(),
        atoms: b.num_atoms(),
        elements: b.num_elements(),
        tree_match,
        atom_map: algebra_iso.then_some(atom_map),
        holds: tree_match && algebra_iso,
        counterexample,
    })
}

/// Every tree with `depth_bound = depth` (all leaves at that depth).
pub fn all_trees(depth: usize) -> Vec<BinaryTree> {
    fn below(prefix: &str, remaining: usize) -> Vec<Vec<String>> {
        if remaining == 0 {
            return vec![vec![prefix.to_string()]];
        }
        let zero = below(&format!("{prefix}0"), remaining - 1);
        let one = below(&format!("{prefix}1"), remaining - 1);
        let mut out = Vec::new();
        for z in &zero {
            out.push(z.clone());
        }
        for o in &one {
            out.push(o.clone());
        }
        for z in &zero {
            for o in &one {
                out.push(z.iter().chain(o).cloned().collect());
            }
        }
        for v in &mut out {
            v.push(prefix.to_string());
        }
        out
    }
    below("", depth)
        .into_iter()
        .map(|nodes| BinaryTree {
            nodes: nodes.into_iter().collect(),
            depth_bound: depth,
        })
        .collect()
}

/// A random tree: each node below the bound gets child `0`, child `1`, or both, uniformly.
pub fn random_tree(depth: usize, rng: &mut impl Rng) -> BinaryTree {
    let mut nodes = BTreeSet::new();
    let mut frontier = vec![String::new()];
    while let Some(s) = frontier.pop() {
        if s.len() < depth {
            match rng.random_range(0..3) {
                0 => frontier.push(format!("{s}0")),
                1 => frontier.push(format!("{s}1")),
                _ => {
                    frontier.push(format!("{s}0"));
                    frontier.push(format!("{s}1"));
                }
            }
        }
        nodes.insert(s);
    }
    BinaryTree {
        nodes,
        depth_bound: depth,
    }
}

/// `count` random trees from a seeded generator.
pub fn seeded_trees(depth: usize, count: usize, seed: u64) -> Vec<BinaryTree> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_tree(depth, &mut rng)).collect()
}
