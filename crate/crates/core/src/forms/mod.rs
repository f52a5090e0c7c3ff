//! Bilinear forms, loads and norms of the hybridized method.

pub mod assembly;
pub mod discretization;
pub mod norms;
pub mod params;

pub use assembly::{
    assemble_bulk_stiffness, assemble_ghost_penalty_bulk, assemble_load, assemble_nitsche,
    assemble_skeleton_stabilization, BlockSystem, DofLayout, Rhs, SparseMatrix,
};
pub use discretization::{BoundarySegment, Discretization, SkeletonMode, SkeletonSegment};
pub use norms::{energy_error, energy_norm, interpolate, l2_errors, ExactSolution, L2Errors, Zero};
pub use params::MethodParams;

#[cfg(test)]
mod tests;
