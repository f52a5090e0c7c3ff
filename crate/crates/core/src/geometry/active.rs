//! Active meshes: the background cells meeting a subdomain or a skeleton component.

use super::grid::{BackgroundGrid, Face};
use super::partition::PolygonalPartition;
use super::polygon::{clip_segment_convex, signed_area, BoundingBox};
use super::quadrature::{
    clip_cell, convex_polygon_rule, parallelogram_rule, skeleton_quadrature, QuadratureRule,
};
use crate::error::GeometryError;
use crate::geometry::grid::CellKind;
use serde::Serialize;
use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Region {
    Bulk(usize),
    Skeleton(usize),
}

impl std::fmt::Display for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Region::Bulk(i) => write!(f, "bulk:{i}"),
            Region::Skeleton(j) => write!(f, "skeleton:{j}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CellStatus {
    Inside,
    Cut,
}

impl std::fmt::Display for CellStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CellStatus::Inside => write!(f, "INSIDE"),
            CellStatus::Cut => write!(f, "CUT"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActiveCell {
    /// Background grid cell id.
    pub id: usize,
    pub status: CellStatus,
    /// Area (bulk) or length (skeleton) of the intersection with the region.
    pub measure: f64,
    /// Convex pieces of the cell inside a bulk region; empty for inside and skeleton cells.
    pub pieces: Vec<Vec<super::point::Point>>,
}

/// Interior face of an active mesh, in local cell indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhostFace {
    pub cells: (usize, usize),
    pub face: Face,
}

#[derive(Debug, Clone)]
pub struct ActiveMesh {
    pub region: Region,
    pub grid: BackgroundGrid,
    pub cells: Vec<ActiveCell>,
    pub ghost_faces: Vec<GhostFace>,
    local: HashMap<usize, usize>,
}

/// Relative threshold below which an intersection counts as measure zero.
const MEASURE_TOL: f64 = 1e-12;

impl ActiveMesh {
    pub fn build(
        grid: &BackgroundGrid,
        partition: &PolygonalPartition,
        region: Region,
    ) -> Result<Self, GeometryError> {
        match region {
            Region::Bulk(i) => Self::bulk(grid, partition, i),
            Region::Skeleton(j) => Self::skeleton(grid, partition, j),
        }
    }

    fn check_inside_grid(grid: &BackgroundGrid, bbox: &BoundingBox, region: Region) -> Result<(), GeometryError> {
        let g = grid.bbox();
        let tol = 1e-12 * grid.h;
        if bbox.min.x < g.min.x - tol
            || bbox.min.y < g.min.y - tol
            || bbox.max.x > g.max.x + tol
            || bbox.max.y > g.max.y + tol
        {
            return Err(GeometryError::RegionOutsideGrid(region.to_string()));
        }
        Ok(())
    }

    pub fn bulk(
        grid: &BackgroundGrid,
        partition: &PolygonalPartition,
        subdomain: usize,
    ) -> Result<Self, GeometryError> {
        let region = Region::Bulk(subdomain);
        let sub = &partition.subdomains[subdomain];
        let bbox = sub.polygon.bbox();
        Self::check_inside_grid(grid, &bbox, region)?;
        let cell_area = grid.cell_area();
        let mut cells = Vec::new();
        for id in grid.cells_near(&bbox) {
            let verts = grid.cell_vertices(id);
            let pieces = clip_cell(&verts, &sub.triangles);
            let area: f64 = pieces.iter().map(|p| signed_area(p)).sum();
            if area <= MEASURE_TOL * cell_area {
                continue;
            }
            let inside = area >= (1.0 - MEASURE_TOL) * cell_area;
            cells.push(ActiveCell {
                id,
                status: if inside { CellStatus::Inside } else { CellStatus::Cut },
                measure: area,
                pieces: if inside { Vec::new() } else { pieces },
            });
        }
        Ok(Self::finish(grid, region, cells, |a, b| {
            a.status == CellStatus::Cut || b.status == CellStatus::Cut
        }))
    }

    pub fn skeleton(
        grid: &BackgroundGrid,
        partition: &PolygonalPartition,
        component: usize,
    ) -> Result<Self, GeometryError> {
        let region = Region::Skeleton(component);
        let comp = &partition.skeleton[component];
        let bbox = BoundingBox::of(&comp.points);
        Self::check_inside_grid(grid, &bbox, region)?;
        let mut cells = Vec::new();
        for id in grid.cells_near(&bbox) {
            let verts = grid.cell_vertices(id);
            let length: f64 = comp
                .legs()
                .filter_map(|(a, b)| clip_segment_convex(a, b, &verts).map(|(t0, t1)| a.dist(b) * (t1 - t0)))
                .sum();
            if length <= MEASURE_TOL * grid.h {
                continue;
            }
            cells.push(ActiveCell {
                id,
                status: CellStatus::Cut,
                measure: length,
                pieces: Vec::new(),
            });
        }
        Ok(Self::finish(grid, region, cells, |_, _| true))
    }

    fn finish(
        grid: &BackgroundGrid,
        region: Region,
        cells: Vec<ActiveCell>,
        is_ghost: impl Fn(&ActiveCell, &ActiveCell) -> bool,
    ) -> Self {
        let local: HashMap<usize, usize> = cells.iter().enumerate().map(|(k, c)| (c.id, k)).collect();
        let mut ghost_faces = Vec::new();
        for (k, cell) in cells.iter().enumerate() {
            for face in grid.neighbours(cell.id) {
                let other = face.cells.1;
                if other <= cell.id {
                    continue;
                }
                if let Some(&m) = local.get(&other) {
                    if is_ghost(cell, &cells[m]) {
                        ghost_faces.push(GhostFace { cells: (k, m), face });
                    }
                }
            }
        }
        Self {
            region,
            grid: grid.clone(),
            cells,
            ghost_faces,
            local,
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Local index of a background cell, if active.
    pub fn local_index(&self, cell_id: usize) -> Option<usize> {
        self.local.get(&cell_id).copied()
    }

    /// Quadrature on the part of active cell `k` inside the bulk region.
    pub fn cell_quadrature(&self, k: usize, order: usize) -> QuadratureRule {
        let cell = &self.cells[k];
        match cell.status {
            CellStatus::Inside => {
                let map = self.grid.cell_map(cell.id);
                let o = map.origin;
                let e0 = super::point::Point::new(map.jac[0][0], map.jac[1][0]);
                let e1 = super::point::Point::new(map.jac[0][1], map.jac[1][1]);
                match self.grid.kind {
                    CellKind::Quad => parallelogram_rule(o, e0, e1, order),
                    CellKind::Triangle => convex_polygon_rule(&[o, o + e0, o + e1], order),
                }
            }
            CellStatus::Cut => {
                let mut rule = QuadratureRule {
                    order,
                    ..Default::default()
                };
                for piece in &cell.pieces {
                    let r = convex_polygon_rule(piece, order);
                    rule.points.extend(r.points);
                    rule.weights.extend(r.weights);
                }
                rule
            }
        }
    }

    /// Quadrature along the segment a -> b restricted to active cell `k`.
    pub fn segment_quadrature(
        &self,
        k: usize,
        a: super::point::Point,
        b: super::point::Point,
        order: usize,
    ) -> Result<QuadratureRule, GeometryError> {
        skeleton_quadrature(&self.grid.cell_vertices(self.cells[k].id), a, b, order)
    }
}
