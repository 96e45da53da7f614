use serde::Serialize;

/// Size limits applied by the exhaustive procedures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Bounds {
    /// Largest group produced by generator closure.
    pub max_group_order: usize,
    /// Largest group whose full subgroup lattice (and hence coarse group) is enumerated.
    pub max_subgroup_order: usize,
    /// Largest number of tuples `degree^arity` an orbit computation may visit.
    pub max_tuples: usize,
    /// Largest rational support for the order-preserving groupoid.
    pub max_support: usize,
}

impl Bounds {
    pub const DEFAULT_MAX_GROUP_ORDER: usize = 20_000;
    pub const DEFAULT_MAX_SUBGROUP_ORDER: usize = 48;
    pub const DEFAULT_MAX_TUPLES: usize = 1_000_000;
    pub const DEFAULT_MAX_SUPPORT: usize = 6;
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_group_order: Self::DEFAULT_MAX_GROUP_ORDER,
            max_subgroup_order: Self::DEFAULT_MAX_SUBGROUP_ORDER,
            max_tuples: Self::DEFAULT_MAX_TUPLES,
            max_support: Self::DEFAULT_MAX_SUPPORT,
        }
    }
}
