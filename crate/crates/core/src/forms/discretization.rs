//! Spaces of one discretization plus the boundary and skeleton segments split at grid lines.

use crate::error::{Error, Result};
use crate::geometry::{
    ActiveMesh, BackgroundGrid, BoundaryKind, PolygonalPartition, Point, Region, SkeletonComponent,
};
use crate::spaces::{FeSpace, SpaceMode};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// How skeleton components are discretized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SkeletonMode {
    /// Traces of 2D spaces on the band of background cells cut by each component.
    #[default]
    GlobalBackgroundGrid,
    /// One tensor-product element per component.
    SingleElementInterfaces,
}

/// Piece of a subdomain boundary inside a single bulk cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySegment {
    pub a: Point,
    pub b: Point,
    /// Unit normal pointing out of the subdomain.
    pub normal: Point,
    /// Local cell of the bulk space.
    pub bulk_cell: usize,
    /// Skeleton component and local cell of its space; `None` on the outer boundary.
    pub skeleton: Option<(usize, usize)>,
}

/// Piece of a skeleton component inside a single skeleton cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkeletonSegment {
    pub a: Point,
    pub b: Point,
    /// Unit normal of the leg.
    pub normal: Point,
    pub cell: usize,
}

#[derive(Debug, Clone)]
pub struct Discretization {
    pub partition: PolygonalPartition,
    pub grid: BackgroundGrid,
    pub mode: SkeletonMode,
    pub bulk_meshes: Vec<ActiveMesh>,
    pub bulk_spaces: Vec<FeSpace>,
    pub skeleton_spaces: Vec<FeSpace>,
    pub boundary: Vec<Vec<BoundarySegment>>,
    pub skeleton_segments: Vec<Vec<SkeletonSegment>>,
}

fn centroid(v: &[Point]) -> Point {
    v.iter().fold(Point::default(), |acc, &p| acc + p) * (1.0 / v.len() as f64)
}

fn split(grid: &BackgroundGrid, a: Point, b: Point) -> impl Iterator<Item = (Point, Point)> + '_ {
    let ts = grid.segment_breakpoints(a, b);
    (0..ts.len() - 1)
        .map(move |k| (a.lerp(b, ts[k]), a.lerp(b, ts[k + 1])))
        .collect::<Vec<_>>()
        .into_iter()
}

impl Discretization {
    /// Builds bulk spaces of degree `p` and skeleton spaces of degree `p0`.
    pub fn new(
        partition: PolygonalPartition,
        grid: BackgroundGrid,
        mode: SkeletonMode,
        p: usize,
        p0: usize,
    ) -> Result<Self> {
        let n = partition.num_subdomains();
        let bulk: Vec<(ActiveMesh, FeSpace)> = (0..n)
            .into_par_iter()
            .map(|i| -> Result<_> {
                let mesh = ActiveMesh::build(&grid, &partition, Region::Bulk(i))?;
                let space = FeSpace::on_active_mesh(&mesh, p, SpaceMode::Bulk)?;
                Ok((mesh, space))
            })
            .collect::<Result<_>>()?;
        let (bulk_meshes, bulk_spaces): (Vec<_>, Vec<_>) = bulk.into_iter().unzip();

        let skeleton_spaces = partition
            .skeleton
            .iter()
            .enumerate()
            .map(|(j, comp)| -> Result<FeSpace> {
                Ok(match mode {
                    SkeletonMode::GlobalBackgroundGrid => {
                        let mesh = ActiveMesh::build(&grid, &partition, Region::Skeleton(j))?;
                        FeSpace::on_active_mesh(&mesh, p0, SpaceMode::SkeletonTrace)?
                    }
                    SkeletonMode::SingleElementInterfaces => FeSpace::single_element(comp, j, p0)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;

        let skeleton_segments = partition
            .skeleton
            .iter()
            .zip(&skeleton_spaces)
            .map(|(comp, space)| skeleton_pieces(&grid, comp, space))
            .collect::<Result<Vec<_>>>()?;

        let boundary = (0..n)
            .map(|i| {
                let space = &bulk_spaces[i];
                let mut segs = Vec::new();
                for piece in &partition.boundaries[i] {
                    let normal = piece.outward_normal();
                    for (a, b) in split(&grid, piece.a, piece.b) {
                        let m = a.lerp(b, 0.5);
                        // on grid lines prefer the cell on the subdomain side
                        let bulk_cell = grid
                            .cells_containing(m)
                            .into_iter()
                            .filter_map(|c| {
                                let k = space.cell_of_grid(c)?;
                                let side = (centroid(&space.cells[k].vertices) - m).dot(normal);
                                Some((k, side))
                            })
                            .min_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
                            .map(|(k, _)| k)
                            .ok_or(Error::Unlocated(m.x, m.y))?;
                        let skeleton = match piece.kind {
                            BoundaryKind::Outer => None,
                            BoundaryKind::Skeleton(j) => {
                                Some((j, locate_skeleton(&grid, &skeleton_spaces[j], m)?))
                            }
                        };
                        segs.push(BoundarySegment {
                            a,
                            b,
                            normal,
                            bulk_cell,
                            skeleton,
                        });
                    }
                }
                Ok(segs)
            })
            .collect::<Result<Vec<_>>>()?;

        Ok(Self {
            partition,
            grid,
            mode,
            bulk_meshes,
            bulk_spaces,
            skeleton_spaces,
            boundary,
            skeleton_segments,
        })
    }

    pub fn num_subdomains(&self) -> usize {
        self.bulk_spaces.len()
    }

    pub fn bulk_dofs(&self) -> usize {
        self.bulk_spaces.iter().map(|s| s.n_dofs).sum()
    }

    pub fn skeleton_dofs(&self) -> usize {
        self.skeleton_spaces.iter().map(|s| s.n_dofs).sum()
    }

    /// Mesh size of subdomain `i`, used in its penalty and norm scalings.
    pub fn h(&self, i: usize) -> f64 {
        self.bulk_spaces[i].h
    }
}

fn locate_skeleton(grid: &BackgroundGrid, space: &FeSpace, m: Point) -> Result<usize> {
    match space.mode {
        SpaceMode::SkeletonSingleElement => space.locate(m),
        _ => grid
            .cells_containing(m)
            .into_iter()
            .find_map(|c| space.cell_of_grid(c)),
    }
    .ok_or(Error::Unlocated(m.x, m.y))
}

fn skeleton_pieces(
    grid: &BackgroundGrid,
    comp: &SkeletonComponent,
    space: &FeSpace,
) -> Result<Vec<SkeletonSegment>> {
    let mut out = Vec::new();
    for (a, b) in comp.legs() {
        let normal = SkeletonComponent::leg_normal(a, b);
        for (s, e) in split(grid, a, b) {
            let cell = locate_skeleton(grid, space, s.lerp(e, 0.5))?;
            out.push(SkeletonSegment {
                a: s,
                b: e,
                normal,
                cell,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{CellKind, PartitionSpec};

    fn two_halves(x: f64, n: usize, mode: SkeletonMode) -> Discretization {
        let part = PolygonalPartition::build(&PartitionSpec::TwoHalves { interface_x: x }).unwrap();
        Discretization::new(part, BackgroundGrid::unit_square(n, CellKind::Quad), mode, 1, 2).unwrap()
    }

    #[test]
    fn boundary_segments_cover_boundaries() {
        let d = two_halves(0.5 + 0.25 / 3.0, 4, SkeletonMode::GlobalBackgroundGrid);
        for i in 0..2 {
            let len: f64 = d.boundary[i].iter().map(|s| s.a.dist(s.b)).sum();
            let expected = d.partition.subdomains[i].polygon.perimeter();
            assert!((len - expected).abs() < 1e-12);
            let skel: f64 = d.boundary[i]
                .iter()
                .filter(|s| s.skeleton.is_some())
                .map(|s| s.a.dist(s.b))
                .sum();
            assert!((skel - 1.0).abs() < 1e-12);
        }
        let total: f64 = d.skeleton_segments[0].iter().map(|s| s.a.dist(s.b)).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fitted_interface_uses_cells_on_each_side() {
        let d = two_halves(0.5, 4, SkeletonMode::GlobalBackgroundGrid);
        for (i, expected_side) in [(0usize, -1.0), (1, 1.0)] {
            for s in d.boundary[i].iter().filter(|s| s.skeleton.is_some()) {
                let c = centroid(&d.bulk_spaces[i].cells[s.bulk_cell].vertices);
                assert!((c.x - 0.5) * expected_side > 0.0);
            }
        }
    }

    #[test]
    fn single_element_mode_has_one_cell() {
        let d = two_halves(0.5, 4, SkeletonMode::SingleElementInterfaces);
        assert_eq!(d.skeleton_spaces[0].num_cells(), 1);
        assert_eq!(d.skeleton_dofs(), 9);
        assert!(d.skeleton_segments[0].iter().all(|s| s.cell == 0));
    }
}
