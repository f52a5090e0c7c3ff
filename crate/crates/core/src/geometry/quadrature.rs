//! Quadrature on cells, cut cells and segments.

use super::point::{orient, Point};
use super::polygon::{clip_convex, clip_segment_convex, signed_area};
use crate::error::GeometryError;

/// Gauss-Legendre nodes and weights on [0, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        // Chebyshev-type initial guess, then Newton on P_n
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Number of Gauss points exact for polynomials of the given degree.
pub fn gauss_points_for_order(order: usize) -> usize {
    order / 2 + 1
}

/// Points with positive weights in physical coordinates.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    /// Total polynomial degree integrated exactly.
    pub order: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn measure(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate(&self, f: impl Fn(Point) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&p, &w)| w * f(p))
            .sum()
    }

    fn append(&mut self, other: QuadratureRule) {
        self.points.extend(other.points);
        self.weights.extend(other.weights);
    }
}

/// Tensor Gauss rule on the parallelogram origin + s*e0 + t*e1, s,t in [0,1].
pub fn parallelogram_rule(origin: Point, e0: Point, e1: Point, order: usize) -> QuadratureRule {
    let n = gauss_points_for_order(order);
    let (x, w) = gauss_legendre(n);
    let area = e0.cross(e1).abs();
    let mut rule = QuadratureRule {
        order,
        ..Default::default()
    };
    for j in 0..n {
        for i in 0..n {
            rule.points.push(origin + e0 * x[i] + e1 * x[j]);
            rule.weights.push(w[i] * w[j] * area);
        }
    }
    rule
}

/// Collapsed-coordinate Gauss rule on a triangle, exact for total degree `order`.
pub fn triangle_rule(a: Point, b: Point, c: Point, order: usize) -> QuadratureRule {
    // the collapse adds one degree in the first variable
    let nu = gauss_points_for_order(order + 1);
    let nv = gauss_points_for_order(order);
    let (xu, wu) = gauss_legendre(nu);
    let (xv, wv) = gauss_legendre(nv);
    let area2 = orient(a, b, c).abs();
    let mut rule = QuadratureRule {
        order,
        ..Default::default()
    };
    for i in 0..nu {
        for j in 0..nv {
            let xi = xu[i];
            let eta = xv[j] * (1.0 - xi);
            rule.points.push(a + (b - a) * xi + (c - a) * eta);
            rule.weights.push(wu[i] * wv[j] * (1.0 - xi) * area2);
        }
    }
    rule
}

/// Fan triangulation of a convex polygon, integrated triangle by triangle.
pub fn convex_polygon_rule(poly: &[Point], order: usize) -> QuadratureRule {
    let mut rule = QuadratureRule {
        order,
        ..Default::default()
    };
    for k in 1..poly.len().saturating_sub(1) {
        if orient(poly[0], poly[k], poly[k + 1]).abs() > 0.0 {
            rule.append(triangle_rule(poly[0], poly[k], poly[k + 1], order));
        }
    }
    rule
}

/// Clips a convex cell against a triangulated region, returning the convex pieces.
pub fn clip_cell(cell: &[Point], region_triangles: &[[Point; 3]]) -> Vec<Vec<Point>> {
    region_triangles
        .iter()
        .filter_map(|t| {
            let piece = clip_convex(t, cell);
            (piece.len() >= 3 && signed_area(&piece) > 0.0).then_some(piece)
        })
        .collect()
}

/// Quadrature on the intersection of a convex cell with a polygon given by its triangulation.
///
/// Exact for total degree `order` on the intersection.
pub fn cut_cell_quadrature(
    cell: &[Point],
    region_triangles: &[[Point; 3]],
    order: usize,
) -> Result<QuadratureRule, GeometryError> {
    let pieces = clip_cell(cell, region_triangles);
    let area: f64 = pieces.iter().map(|p| signed_area(p)).sum();
    if area <= 1e-14 * signed_area(cell).abs() {
        return Err(GeometryError::EmptyIntersection);
    }
    let mut rule = QuadratureRule {
        order,
        ..Default::default()
    };
    for p in &pieces {
        rule.append(convex_polygon_rule(p, order));
    }
    Ok(rule)
}

/// Gauss rule on the segment a -> b.
pub fn segment_rule(a: Point, b: Point, order: usize) -> QuadratureRule {
    let n = gauss_points_for_order(order);
    let (x, w) = gauss_legendre(n);
    let len = a.dist(b);
    QuadratureRule {
        points: x.iter().map(|&t| a.lerp(b, t)).collect(),
        weights: w.iter().map(|&wi| wi * len).collect(),
        order,
    }
}

/// Gauss rule on the part of the segment a -> b inside a convex cell.
pub fn skeleton_quadrature(
    cell: &[Point],
    a: Point,
    b: Point,
    order: usize,
) -> Result<QuadratureRule, GeometryError> {
    let (t0, t1) = clip_segment_convex(a, b, cell).ok_or(GeometryError::EmptyIntersection)?;
    let len = a.dist(b) * (t1 - t0);
    if len <= 1e-14 * a.dist(b).max(f64::MIN_POSITIVE) {
        return Err(GeometryError::EmptyIntersection);
    }
    Ok(segment_rule(a.lerp(b, t0), a.lerp(b, t1), order))
}
