use super::basis::{ElementBasis, Family};
use crate::error::SpaceError;
use crate::geometry::{
    ActiveMesh, AffineMap, CellKind, GhostFace, Point, Region, SkeletonComponent,
};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SpaceMode {
    Bulk,
    /// Full 2D space on the band of cells cut by a skeleton component, used through its trace.
    SkeletonTrace,
    /// One tensor-product cell covering a whole skeleton component.
    SkeletonSingleElement,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceCell {
    pub map: AffineMap,
    /// Global dof of each local basis function.
    pub dofs: Vec<usize>,
    pub vertices: Vec<Point>,
    /// Background grid cell, if the cell comes from a grid.
    pub grid_cell: Option<usize>,
}

/// Continuous Lagrange space on a set of cells with a global dof numbering.
#[derive(Debug, Clone)]
pub struct FeSpace {
    pub mode: SpaceMode,
    pub region: Region,
    pub basis: ElementBasis,
    pub cells: Vec<SpaceCell>,
    pub n_dofs: usize,
    /// Physical location of each dof's Lagrange node.
    pub dof_points: Vec<Point>,
    pub ghost_faces: Vec<GhostFace>,
    /// Mesh parameter used in stabilization and penalty scalings.
    pub h: f64,
    grid_lookup: Option<(crate::geometry::BackgroundGrid, HashMap<usize, usize>)>,
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl FeSpace {
    /// Lagrange space of degree `degree` on an active mesh. The family follows the grid's cell kind.
    pub fn on_active_mesh(mesh: &ActiveMesh, degree: usize, mode: SpaceMode) -> Result<Self, SpaceError> {
        if mode == SpaceMode::SkeletonSingleElement {
            return Err(SpaceError::Unsupported(
                "single-element skeleton spaces are built from a component".into(),
            ));
        }
        let grid = &mesh.grid;
        let family = match grid.kind {
            CellKind::Quad => Family::Q,
            CellKind::Triangle => Family::P,
        };
        let basis = ElementBasis::new(family, degree)?;
        let lattice = grid.h / degree as f64;
        let mut numbering: HashMap<(i64, i64), usize> = HashMap::new();
        let mut dof_points = Vec::new();
        let mut cells = Vec::with_capacity(mesh.len());
        for ac in &mesh.cells {
            let map = grid.cell_map(ac.id);
            let dofs = basis
                .nodes
                .iter()
                .map(|&xi| {
                    let x = map.forward(xi);
                    let key = (
                        ((x.x - grid.origin.x) / lattice).round() as i64,
                        ((x.y - grid.origin.y) / lattice).round() as i64,
                    );
                    *numbering.entry(key).or_insert_with(|| {
                        dof_points.push(x);
                        dof_points.len() - 1
                    })
                })
                .collect();
            cells.push(SpaceCell {
                map,
                dofs,
                vertices: grid.cell_vertices(ac.id),
                grid_cell: Some(ac.id),
            });
        }
        let lookup = cells
            .iter()
            .enumerate()
            .map(|(k, c)| (c.grid_cell.unwrap(), k))
            .collect();
        Ok(Self {
            mode,
            region: mesh.region,
            basis,
            cells,
            n_dofs: dof_points.len(),
            dof_points,
            ghost_faces: mesh.ghost_faces.clone(),
            h: grid.h,
            grid_lookup: Some((grid.clone(), lookup)),
        })
    }

    /// One Q_p cell on a box aligned with the component's end-to-end direction.
    ///
    /// The box tightly contains the polyline along its direction and is at least
    /// as thick as it is long in the normal direction, centred on the polyline.
    pub fn single_element(
        component: &SkeletonComponent,
        index: usize,
        degree: usize,
    ) -> Result<Self, SpaceError> {
        let basis = ElementBasis::new(Family::Q, degree)?;
        let first = component.points[0];
        let last = *component.points.last().unwrap();
        let mut t = last - first;
        if t.norm() == 0.0 {
            t = component.points[1] - first;
        }
        let t = t.normalized();
        let n = t.rot_cw();
        let (mut s0, mut s1, mut n0, mut n1) =
            (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &p in &component.points {
            let d = p - first;
            s0 = s0.min(d.dot(t));
            s1 = s1.max(d.dot(t));
            n0 = n0.min(d.dot(n));
            n1 = n1.max(d.dot(n));
        }
        let inflate = 1e-8 * (s1 - s0);
        s0 -= inflate;
        s1 += inflate;
        let length = s1 - s0;
        let mid = 0.5 * (n0 + n1);
        let thickness = (n1 - n0 + 2.0 * inflate).max(length);
        n0 = mid - 0.5 * thickness;
        let origin = first + t * s0 + n * n0;
        let map = AffineMap::new(origin, t * length, n * thickness);
        let dof_points: Vec<Point> = basis.nodes.iter().map(|&xi| map.forward(xi)).collect();
        let vertices = vec![
            map.forward(Point::new(0.0, 0.0)),
            map.forward(Point::new(1.0, 0.0)),
            map.forward(Point::new(1.0, 1.0)),
            map.forward(Point::new(0.0, 1.0)),
        ];
        let vertices = if crate::geometry::polygon::signed_area(&vertices) < 0.0 {
            vertices.into_iter().rev().collect()
        } else {
            vertices
        };
        Ok(Self {
            mode: SpaceMode::SkeletonSingleElement,
            region: Region::Skeleton(index),
            n_dofs: basis.len(),
            cells: vec![SpaceCell {
                map,
                dofs: (0..basis.len()).collect(),
                vertices,
                grid_cell: None,
            }],
            basis,
            dof_points,
            ghost_faces: Vec::new(),
            h: length,
            grid_lookup: None,
        })
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    /// Local cell containing `x`, if any.
    pub fn locate(&self, x: Point) -> Option<usize> {
        match &self.grid_lookup {
            Some((grid, lookup)) => {
                let id = grid.locate(x)?;
                if let Some(&k) = lookup.get(&id) {
                    return Some(k);
                }
                // points on cell boundaries may be owned by an inactive neighbour
                let tol = 1e-10;
                self.cells.iter().position(|c| {
                    self.basis
                        .contains_reference(c.map.inverse(x), tol)
                })
            }
            None => {
                let c = &self.cells[0];
                self.basis.contains_reference(c.map.inverse(x), 1e-8).then_some(0)
            }
        }
    }

    /// Local cell index of a background grid cell.
    pub fn cell_of_grid(&self, grid_cell: usize) -> Option<usize> {
        self.grid_lookup.as_ref()?.1.get(&grid_cell).copied()
    }

    fn reference(&self, cell: usize, x: Point) -> Result<Point, SpaceError> {
        let xi = self.cells[cell].map.inverse(x);
        if !self.basis.contains_reference(xi, 1e-8) {
            return Err(SpaceError::PointOutsideCell(x.x, x.y, cell));
        }
        Ok(xi)
    }

    /// Values of the local basis functions of `cell` at `x`.
    pub fn basis_values(&self, cell: usize, x: Point) -> Vec<f64> {
        self.basis.values(self.cells[cell].map.inverse(x))
    }

    /// Physical gradients of the local basis functions.
    pub fn basis_gradients(&self, cell: usize, x: Point) -> Vec<Point> {
        let map = &self.cells[cell].map;
        let xi = map.inverse(x);
        let gx = self.basis.partial(xi, 1, 0);
        let gy = self.basis.partial(xi, 0, 1);
        // grad = J^{-T} grad_ref
        gx.iter()
            .zip(&gy)
            .map(|(&a, &b)| {
                Point::new(
                    map.inv[0][0] * a + map.inv[1][0] * b,
                    map.inv[0][1] * a + map.inv[1][1] * b,
                )
            })
            .collect()
    }

    /// l-th directional derivative (dir . grad)^l of the local basis functions.
    pub fn basis_directional(&self, cell: usize, x: Point, dir: Point, order: usize) -> Vec<f64> {
        let map = &self.cells[cell].map;
        let xi = map.inverse(x);
        let d = map.reference_direction(dir);
        let mut out = vec![0.0; self.basis.len()];
        let mut tmp = vec![0.0; self.basis.len()];
        for s in 0..=order {
            let w = binom(order, s) * d.x.powi((order - s) as i32) * d.y.powi(s as i32);
            if w == 0.0 {
                continue;
            }
            self.basis.partial_into(xi, order - s, s, &mut tmp);
            for (o, t) in out.iter_mut().zip(&tmp) {
                *o += w * t;
            }
        }
        out
    }

    /// Physical partial derivative d^a/dx^a d^b/dy^b of the local basis functions.
    pub fn basis_partial(&self, cell: usize, x: Point, a: usize, b: usize) -> Vec<f64> {
        let map = &self.cells[cell].map;
        let xi = map.inverse(x);
        // d/dx = alpha . grad_ref, d/dy = beta . grad_ref
        let alpha = (map.inv[0][0], map.inv[1][0]);
        let beta = (map.inv[0][1], map.inv[1][1]);
        let mut out = vec![0.0; self.basis.len()];
        let mut tmp = vec![0.0; self.basis.len()];
        for s in 0..=a {
            for t in 0..=b {
                let w = binom(a, s)
                    * binom(b, t)
                    * alpha.0.powi((a - s) as i32)
                    * alpha.1.powi(s as i32)
                    * beta.0.powi((b - t) as i32)
                    * beta.1.powi(t as i32);
                if w == 0.0 {
                    continue;
                }
                self.basis.partial_into(xi, a - s + b - t, s + t, &mut tmp);
                for (o, v) in out.iter_mut().zip(&tmp) {
                    *o += w * v;
                }
            }
        }
        out
    }

    /// Derivative tensor of order `order` of the field `coeffs` at `x` in `cell`:
    /// the components d^{order-s}/dx^{order-s} d^s/dy^s for s = 0..=order.
    pub fn evaluate(
        &self,
        coeffs: &[f64],
        cell: usize,
        x: Point,
        order: usize,
    ) -> Result<Vec<f64>, SpaceError> {
        if order > self.basis.degree
            && !(self.basis.family == Family::Q && order <= 2 * self.basis.degree)
        {
            return Err(SpaceError::DerivativeOrder {
                order,
                degree: self.basis.degree,
            });
        }
        self.reference(cell, x)?;
        let dofs = &self.cells[cell].dofs;
        Ok((0..=order)
            .map(|s| {
                let d = self.basis_partial(cell, x, order - s, s);
                dofs.iter().zip(&d).map(|(&g, v)| coeffs[g] * v).sum()
            })
            .collect())
    }

    pub fn value(&self, coeffs: &[f64], cell: usize, x: Point) -> f64 {
        let v = self.basis_values(cell, x);
        self.cells[cell].dofs.iter().zip(&v).map(|(&g, b)| coeffs[g] * b).sum()
    }

    pub fn gradient(&self, coeffs: &[f64], cell: usize, x: Point) -> Point {
        let g = self.basis_gradients(cell, x);
        self.cells[cell]
            .dofs
            .iter()
            .zip(&g)
            .fold(Point::default(), |acc, (&d, gb)| acc + *gb * coeffs[d])
    }

    pub fn directional(&self, coeffs: &[f64], cell: usize, x: Point, dir: Point, order: usize) -> f64 {
        let d = self.basis_directional(cell, x, dir, order);
        self.cells[cell].dofs.iter().zip(&d).map(|(&g, v)| coeffs[g] * v).sum()
    }

    /// Nodal interpolant of `f`.
    pub fn interpolate(&self, f: impl Fn(Point) -> f64) -> Vec<f64> {
        self.dof_points.iter().map(|&p| f(p)).collect()
    }
}
