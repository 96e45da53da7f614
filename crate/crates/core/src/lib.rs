pub mod axioms;
pub mod bounds;
pub mod builders;
pub mod coarse;
pub mod error;
pub mod filters;
pub mod formats;
pub mod groups;
pub mod iso;
pub mod stone;

pub use bounds::Bounds;
pub use builders::{coarse_of_group, coarse_of_tower, LabeledCoarse};
pub use coarse::{CoarseStructure, CosetId};
pub use error::{Error, Result, Side};
pub use groups::{Perm, PermGroup, ProfiniteTower, Subgroup};
