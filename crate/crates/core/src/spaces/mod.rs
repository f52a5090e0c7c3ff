//! Lagrange spaces on active meshes and single skeleton elements.

pub mod basis;
pub mod space;

pub use basis::{ElementBasis, Family, MAX_DEGREE};
pub use space::{FeSpace, SpaceCell, SpaceMode};
