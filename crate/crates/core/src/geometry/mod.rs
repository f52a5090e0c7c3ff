//! Polygonal partitions, background grids, active meshes and quadrature.

pub mod active;
pub mod grid;
pub mod partition;
pub mod point;
pub mod polygon;
pub mod quadrature;
pub mod skeleton;
pub mod voronoi;

pub use active::{ActiveCell, ActiveMesh, CellStatus, GhostFace, Region};
pub use grid::{AffineMap, BackgroundGrid, CellKind, Face};
pub use partition::{PartitionSpec, PolygonalPartition, Subdomain};
pub use point::Point;
pub use polygon::Polygon;
pub use quadrature::{cut_cell_quadrature, skeleton_quadrature, QuadratureRule};
pub use skeleton::{extract_skeleton, BoundaryKind, BoundaryPiece, SkeletonComponent};
