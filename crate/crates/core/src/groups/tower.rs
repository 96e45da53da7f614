use serde::Serialize;

use super::group::PermGroup;
use crate::error::{Error, Result};

/// A finite truncation `G_0 <- G_1 <- ... <- G_K` of an inverse system.
///
/// `maps[k]` is the map `G_{k+1} -> G_k` as a table of element indices.
#[derive(Debug, Clone)]
pub struct ProfiniteTower {
    levels: Vec<PermGroup>,
    maps: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TowerViolation {
    WrongLength { map: usize, expected: usize, got: usize },
    OutOfRange { map: usize, element: usize, image: usize },
    NotHomomorphism { map: usize, a: usize, b: usize },
    NotSurjective { map: usize, missing: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TowerReport {
    pub valid: bool,
    pub violation: Option<TowerViolation>,
}

impl ProfiniteTower {
    pub fn new(levels: Vec<PermGroup>, maps: Vec<Vec<usize>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Invalid("a tower needs at least one level".into()));
        }
        if maps.len() + 1 != levels.len() {
            return Err(Error::Invalid(format!(
                "{} levels need {} maps, got {}",
                levels.len(),
                levels.len() - 1,
                maps.len()
            )));
        }
        Ok(ProfiniteTower { levels, maps })
    }

    /// Chain of cyclic groups with reduction maps; each order must divide the next.
    pub fn cyclic_chain(orders: &[usize]) -> Result<Self> {
        let levels: Vec<PermGroup> = orders.iter().map(|&n| super::catalog::cyclic(n)).collect();
        let mut maps = Vec::new();
        for k in 0..orders.len().saturating_sub(1) {
            let (lo, hi) = (orders[k], orders[k + 1]);
            if hi % lo != 0 {
                return Err(Error::Invalid(format!("{lo} does not divide {hi}")));
            }
            // Catalog cyclic groups list g^i at index i.
            maps.push((0..hi).map(|i| i % lo).collect());
        }
        Self::new(levels, maps)
    }

    pub fn levels(&self) -> &[PermGroup] {
        &self.levels
    }

    pub fn maps(&self) -> &[Vec<usize>] {
        &self.maps
    }

    pub fn top(&self) -> &PermGroup {
        self.levels.last().expect("non-empty")
    }

    pub fn height(&self) -> usize {
        self.levels.len()
    }

    /// Checks that every connecting map is a surjective homomorphism, reporting the first violation.
    pub fn validate(&self) -> TowerReport {
        match self.first_violation() {
            None => TowerReport {
                valid: true,
                violation: None,
            },
            Some(v) => TowerReport {
                valid: false,
                violation: Some(v),
            },
        }
    }

    fn first_violation(&self) -> Option<TowerViolation> {
        for (k, map) in self.maps.iter().enumerate() {
            let (lower, upper) = (&self.levels[k], &self.levels[k + 1]);
            if map.len() != upper.order() {
                return Some(TowerViolation::WrongLength {
                    map: k,
                    expected: upper.order(),
                    got: map.len(),
                });
            }
            if let Some((element, &image)) = map.iter().enumerate().find(|(_, &i)| i >= lower.order()) {
                return Some(TowerViolation::OutOfRange { map: k, element, image });
            }
            for a in 0..upper.order() {
                for b in 0..upper.order() {
                    if map[upper.mul(a, b)] != lower.mul(map[a], map[b]) {
                        return Some(TowerViolation::NotHomomorphism { map: k, a, b });
                    }
                }
            }
            let mut hit = vec![false; lower.order()];
            for &i in map {
                hit[i] = true;
            }
            if let Some(missing) = hit.iter().position(|h| !h) {
                return Some(TowerViolation::NotSurjective { map: k, missing });
            }
        }
        None
    }

    /// Composite map `G_K -> G_k` as an element table on the top level.
    pub fn composite_to(&self, k: usize) -> Vec<usize> {
        let top = self.height() - 1;
        let mut current: Vec<usize> = (0..self.top().order()).collect();
        for level in (k..top).rev() {
            current = current.iter().map(|&i| self.maps[level][i]).collect();
        }
        current
    }
}
