use super::point::Point;
use super::polygon::BoundingBox;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CellKind {
    #[default]
    Quad,
    /// Every square split along its (0,0)-(1,1) diagonal.
    Triangle,
}

/// Affine map x = origin + J * xi from a reference cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap {
    pub origin: Point,
    /// Columns are the images of the reference unit vectors.
    pub jac: [[f64; 2]; 2],
    pub inv: [[f64; 2]; 2],
    pub det: f64,
}

impl AffineMap {
    pub fn new(origin: Point, col0: Point, col1: Point) -> Self {
        let jac = [[col0.x, col1.x], [col0.y, col1.y]];
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        let inv = [
            [jac[1][1] / det, -jac[0][1] / det],
            [-jac[1][0] / det, jac[0][0] / det],
        ];
        Self {
            origin,
            jac,
            inv,
            det,
        }
    }

    pub fn forward(&self, xi: Point) -> Point {
        Point::new(
            self.origin.x + self.jac[0][0] * xi.x + self.jac[0][1] * xi.y,
            self.origin.y + self.jac[1][0] * xi.x + self.jac[1][1] * xi.y,
        )
    }

    pub fn inverse(&self, x: Point) -> Point {
        let d = x - self.origin;
        Point::new(
            self.inv[0][0] * d.x + self.inv[0][1] * d.y,
            self.inv[1][0] * d.x + self.inv[1][1] * d.y,
        )
    }

    /// Reference-frame components of a physical direction vector.
    pub fn reference_direction(&self, v: Point) -> Point {
        Point::new(
            self.inv[0][0] * v.x + self.inv[0][1] * v.y,
            self.inv[1][0] * v.x + self.inv[1][1] * v.y,
        )
    }
}

/// Interior face between two cells, with unit normal pointing from the first to the second.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Face {
    pub cells: (usize, usize),
    pub a: Point,
    pub b: Point,
    pub normal: Point,
}

/// Uniform background grid of squares, optionally split into triangles.
#[derive(Debug, Clone, PartialEq)]
pub struct BackgroundGrid {
    pub origin: Point,
    pub nx: usize,
    pub ny: usize,
    /// Side length of the squares.
    pub h: f64,
    pub kind: CellKind,
}

impl BackgroundGrid {
    pub fn new(origin: Point, h: f64, nx: usize, ny: usize, kind: CellKind) -> Self {
        Self {
            origin,
            nx,
            ny,
            h,
            kind,
        }
    }

    /// `n x n` grid on the unit square.
    pub fn unit_square(n: usize, kind: CellKind) -> Self {
        Self::new(Point::new(0.0, 0.0), 1.0 / n as f64, n, n, kind)
    }

    pub fn extent(&self) -> (f64, f64) {
        (self.nx as f64 * self.h, self.ny as f64 * self.h)
    }

    pub fn bbox(&self) -> BoundingBox {
        let (ex, ey) = self.extent();
        BoundingBox {
            min: self.origin,
            max: self.origin + Point::new(ex, ey),
        }
    }

    fn per_square(&self) -> usize {
        match self.kind {
            CellKind::Quad => 1,
            CellKind::Triangle => 2,
        }
    }

    pub fn num_cells(&self) -> usize {
        self.nx * self.ny * self.per_square()
    }

    /// (ix, iy, sub-cell) of a cell id.
    pub fn cell_coords(&self, cell: usize) -> (usize, usize, usize) {
        let ps = self.per_square();
        let sq = cell / ps;
        (sq % self.nx, sq / self.nx, cell % ps)
    }

    fn cell_id(&self, ix: usize, iy: usize, sub: usize) -> usize {
        (iy * self.nx + ix) * self.per_square() + sub
    }

    fn corner(&self, ix: usize, iy: usize) -> Point {
        self.origin + Point::new(ix as f64 * self.h, iy as f64 * self.h)
    }

    /// Counter-clockwise vertices of a cell.
    pub fn cell_vertices(&self, cell: usize) -> Vec<Point> {
        let (ix, iy, sub) = self.cell_coords(cell);
        let v00 = self.corner(ix, iy);
        let v10 = self.corner(ix + 1, iy);
        let v11 = self.corner(ix + 1, iy + 1);
        let v01 = self.corner(ix, iy + 1);
        match (self.kind, sub) {
            (CellKind::Quad, _) => vec![v00, v10, v11, v01],
            (CellKind::Triangle, 0) => vec![v00, v10, v11],
            (CellKind::Triangle, _) => vec![v00, v11, v01],
        }
    }

    pub fn cell_area(&self) -> f64 {
        match self.kind {
            CellKind::Quad => self.h * self.h,
            CellKind::Triangle => 0.5 * self.h * self.h,
        }
    }

    pub fn cell_map(&self, cell: usize) -> AffineMap {
        let (ix, iy, sub) = self.cell_coords(cell);
        let o = self.corner(ix, iy);
        let h = self.h;
        match (self.kind, sub) {
            (CellKind::Quad, _) => AffineMap::new(o, Point::new(h, 0.0), Point::new(0.0, h)),
            (CellKind::Triangle, 0) => AffineMap::new(o, Point::new(h, 0.0), Point::new(h, h)),
            (CellKind::Triangle, _) => AffineMap::new(o, Point::new(h, h), Point::new(0.0, h)),
        }
    }

    /// Cells whose closure may meet the box.
    pub fn cells_near(&self, bbox: &BoundingBox) -> Vec<usize> {
        let tol = 1e-12 * self.h;
        let clampi = |v: f64, n: usize| -> usize { (v.max(0.0) as usize).min(n.saturating_sub(1)) };
        let ix0 = clampi(((bbox.min.x - self.origin.x - tol) / self.h).floor(), self.nx);
        let ix1 = clampi(((bbox.max.x - self.origin.x + tol) / self.h).floor(), self.nx);
        let iy0 = clampi(((bbox.min.y - self.origin.y - tol) / self.h).floor(), self.ny);
        let iy1 = clampi(((bbox.max.y - self.origin.y + tol) / self.h).floor(), self.ny);
        let mut out = Vec::new();
        for iy in iy0..=iy1 {
            for ix in ix0..=ix1 {
                for sub in 0..self.per_square() {
                    out.push(self.cell_id(ix, iy, sub));
                }
            }
        }
        out
    }

    /// Cell whose closure contains `p`, preferring the lowest indices on shared boundaries.
    pub fn locate(&self, p: Point) -> Option<usize> {
        let fx = (p.x - self.origin.x) / self.h;
        let fy = (p.y - self.origin.y) / self.h;
        let eps = 1e-10;
        if fx < -eps || fy < -eps || fx > self.nx as f64 + eps || fy > self.ny as f64 + eps {
            return None;
        }
        let ix = (fx.floor().max(0.0) as usize).min(self.nx - 1);
        let iy = (fy.floor().max(0.0) as usize).min(self.ny - 1);
        let sub = match self.kind {
            CellKind::Quad => 0,
            CellKind::Triangle => {
                if fx - ix as f64 >= fy - iy as f64 {
                    0
                } else {
                    1
                }
            }
        };
        Some(self.cell_id(ix, iy, sub))
    }

    /// Sorted parameters in [0, 1], endpoints included, where the segment a -> b
    /// crosses grid lines (and cell diagonals on triangle grids).
    pub fn segment_breakpoints(&self, a: Point, b: Point) -> Vec<f64> {
        let mut ts = vec![0.0, 1.0];
        let mut crossings = |ga: f64, gb: f64| {
            // level sets g = k for integer k strictly between ga and gb
            if gb == ga {
                return;
            }
            let (lo, hi) = (ga.min(gb), ga.max(gb));
            let mut k = lo.floor() + 1.0;
            while k < hi {
                ts.push((k - ga) / (gb - ga));
                k += 1.0;
            }
        };
        let gx = |p: Point| (p.x - self.origin.x) / self.h;
        let gy = |p: Point| (p.y - self.origin.y) / self.h;
        crossings(gx(a), gx(b));
        crossings(gy(a), gy(b));
        if self.kind == CellKind::Triangle {
            crossings(gy(a) - gx(a), gy(b) - gx(b));
        }
        ts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        ts.dedup_by(|x, y| (*x - *y).abs() < 1e-14);
        ts
    }

    /// Cells whose closure contains `p` up to a relative tolerance.
    pub fn cells_containing(&self, p: Point) -> Vec<usize> {
        let tol = 1e-10 * self.h;
        let bbox = BoundingBox {
            min: p - Point::new(tol, tol),
            max: p + Point::new(tol, tol),
        };
        self.cells_near(&bbox)
            .into_iter()
            .filter(|&c| {
                let v = self.cell_vertices(c);
                (0..v.len()).all(|k| {
                    let (e0, e1) = (v[k], v[(k + 1) % v.len()]);
                    (e1 - e0).cross(p - e0) >= -tol * e0.dist(e1)
                })
            })
            .collect()
    }

    /// Faces shared with neighbouring cells; normals point away from `cell`.
    pub fn neighbours(&self, cell: usize) -> Vec<Face> {
        let (ix, iy, sub) = self.cell_coords(cell);
        let v00 = self.corner(ix, iy);
        let v10 = self.corner(ix + 1, iy);
        let v11 = self.corner(ix + 1, iy + 1);
        let v01 = self.corner(ix, iy + 1);
        let mut out = Vec::with_capacity(4);
        let mut push = |other: usize, a: Point, b: Point, normal: Point| {
            out.push(Face {
                cells: (cell, other),
                a,
                b,
                normal,
            })
        };
        let e = Point::new(1.0, 0.0);
        let n = Point::new(0.0, 1.0);
        match (self.kind, sub) {
            (CellKind::Quad, _) => {
                if ix > 0 {
                    push(self.cell_id(ix - 1, iy, 0), v00, v01, -e);
                }
                if ix + 1 < self.nx {
                    push(self.cell_id(ix + 1, iy, 0), v10, v11, e);
                }
                if iy > 0 {
                    push(self.cell_id(ix, iy - 1, 0), v00, v10, -n);
                }
                if iy + 1 < self.ny {
                    push(self.cell_id(ix, iy + 1, 0), v01, v11, n);
                }
            }
            (CellKind::Triangle, 0) => {
                let d = Point::new(-1.0, 1.0).normalized();
                push(self.cell_id(ix, iy, 1), v00, v11, d);
                if ix + 1 < self.nx {
                    push(self.cell_id(ix + 1, iy, 1), v10, v11, e);
                }
                if iy > 0 {
                    push(self.cell_id(ix, iy - 1, 1), v00, v10, -n);
                }
            }
            (CellKind::Triangle, _) => {
                let d = Point::new(1.0, -1.0).normalized();
                push(self.cell_id(ix, iy, 0), v00, v11, d);
                if ix > 0 {
                    push(self.cell_id(ix - 1, iy, 0), v00, v01, -e);
                }
                if iy + 1 < self.ny {
                    push(self.cell_id(ix, iy + 1, 0), v01, v11, n);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quad_grid_basics() {
        let g = BackgroundGrid::unit_square(4, CellKind::Quad);
        assert_eq!(g.num_cells(), 16);
        assert_eq!(g.h, 0.25);
        let c = g.locate(Point::new(0.6, 0.1)).unwrap();
        assert_eq!(g.cell_coords(c), (2, 0, 0));
        let m = g.cell_map(c);
        let x = m.forward(Point::new(1.0, 1.0));
        assert!(x.approx_eq(Point::new(0.75, 0.25), 1e-15));
        assert!(m.inverse(x).approx_eq(Point::new(1.0, 1.0), 1e-15));
        // interior cell has four neighbours
        let inner = g.locate(Point::new(0.3, 0.3)).unwrap();
        assert_eq!(g.neighbours(inner).len(), 4);
    }

    #[test]
    fn triangle_neighbours_are_mutual() {
        let g = BackgroundGrid::unit_square(3, CellKind::Triangle);
        for c in 0..g.num_cells() {
            for f in g.neighbours(c) {
                let back = g.neighbours(f.cells.1);
                let mirrored = back.iter().find(|b| b.cells.1 == c).expect("mutual");
                assert!((mirrored.normal + f.normal).norm() < 1e-15);
            }
            let v = g.cell_vertices(c);
            assert!(super::super::polygon::signed_area(&v) > 0.0);
        }
    }

    #[test]
    fn triangle_maps_match_vertices() {
        let g = BackgroundGrid::unit_square(2, CellKind::Triangle);
        for c in 0..g.num_cells() {
            let m = g.cell_map(c);
            let v = g.cell_vertices(c);
            assert!(m.forward(Point::new(0.0, 0.0)).approx_eq(v[0], 1e-15));
            assert!(m.forward(Point::new(1.0, 0.0)).approx_eq(v[1], 1e-15));
            assert!(m.forward(Point::new(0.0, 1.0)).approx_eq(v[2], 1e-15));
        }
    }

    #[test]
    fn breakpoints_at_grid_lines() {
        let g = BackgroundGrid::unit_square(4, CellKind::Quad);
        let t = g.segment_breakpoints(Point::new(0.1, 0.5), Point::new(0.9, 0.5));
        assert_eq!(t.len(), 5);
        assert!((t[1] - 0.15 / 0.8).abs() < 1e-15);
        let tri = BackgroundGrid::unit_square(4, CellKind::Triangle);
        // the vertical line x = 0.3 crosses 3 horizontal lines and 4 diagonals
        let t = tri.segment_breakpoints(Point::new(0.3, 0.0), Point::new(0.3, 1.0));
        assert_eq!(t.len(), 2 + 3 + 4);
    }

    #[test]
    fn points_on_lines_belong_to_several_cells() {
        let g = BackgroundGrid::unit_square(4, CellKind::Quad);
        assert_eq!(g.cells_containing(Point::new(0.5, 0.1)).len(), 2);
        assert_eq!(g.cells_containing(Point::new(0.5, 0.5)).len(), 4);
        assert_eq!(g.cells_containing(Point::new(0.4, 0.1)).len(), 1);
    }
}
