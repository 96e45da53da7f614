pub mod catalog;
mod group;
mod perm;
mod tower;

pub use group::{PermGroup, Subgroup, TupleOrbits};
pub use perm::Perm;
pub use tower::{ProfiniteTower, TowerReport, TowerViolation};
