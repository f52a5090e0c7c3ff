//! Lagrange bases on the reference square and triangle, with partial
//! derivatives of any order.

use crate::error::SpaceError;
use crate::geometry::Point;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    /// Tensor-product polynomials of degree p in each variable on [0,1]^2.
    Q,
    /// Polynomials of total degree p on the reference triangle (0,0), (1,0), (0,1).
    P,
}

pub const MAX_DEGREE: usize = 10;

/// Affine factor c + gx*xi + gy*eta.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Factor {
    c: f64,
    gx: f64,
    gy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementBasis {
    pub family: Family,
    pub degree: usize,
    /// Lagrange nodes in reference coordinates.
    pub nodes: Vec<Point>,
    /// Each basis function as a product of affine factors.
    factors: Vec<Vec<Factor>>,
}

/// Factors of the 1D Lagrange polynomial through i/p in the variable selected by `axis`.
fn lagrange_factors(p: usize, i: usize, axis: usize, out: &mut Vec<Factor>) {
    let pf = p as f64;
    for m in 0..=p {
        if m == i {
            continue;
        }
        // (t - m/p) / ((i - m)/p) = (p t - m) / (i - m)
        let s = 1.0 / (i as f64 - m as f64);
        let g = pf * s;
        out.push(Factor {
            c: -(m as f64) * s,
            gx: if axis == 0 { g } else { 0.0 },
            gy: if axis == 1 { g } else { 0.0 },
        });
    }
}

/// Factors of prod_{a<k} (p*lambda - a) / (a + 1).
fn barycentric_factors(p: usize, k: usize, lambda: Factor, out: &mut Vec<Factor>) {
    let pf = p as f64;
    for a in 0..k {
        let s = 1.0 / (a as f64 + 1.0);
        out.push(Factor {
            c: (pf * lambda.c - a as f64) * s,
            gx: pf * lambda.gx * s,
            gy: pf * lambda.gy * s,
        });
    }
}

impl ElementBasis {
    pub fn new(family: Family, degree: usize) -> Result<Self, SpaceError> {
        if degree == 0 || degree > MAX_DEGREE {
            return Err(SpaceError::Unsupported(format!(
                "{family:?}{degree}: degree must be in 1..={MAX_DEGREE}"
            )));
        }
        let p = degree;
        let pf = p as f64;
        let mut nodes = Vec::new();
        let mut factors = Vec::new();
        match family {
            Family::Q => {
                for j in 0..=p {
                    for i in 0..=p {
                        nodes.push(Point::new(i as f64 / pf, j as f64 / pf));
                        let mut f = Vec::with_capacity(2 * p);
                        lagrange_factors(p, i, 0, &mut f);
                        lagrange_factors(p, j, 1, &mut f);
                        factors.push(f);
                    }
                }
            }
            Family::P => {
                let l1 = Factor { c: 0.0, gx: 1.0, gy: 0.0 };
                let l2 = Factor { c: 0.0, gx: 0.0, gy: 1.0 };
                let l3 = Factor { c: 1.0, gx: -1.0, gy: -1.0 };
                for j in 0..=p {
                    for i in 0..=(p - j) {
                        nodes.push(Point::new(i as f64 / pf, j as f64 / pf));
                        let mut f = Vec::with_capacity(p);
                        barycentric_factors(p, i, l1, &mut f);
                        barycentric_factors(p, j, l2, &mut f);
                        barycentric_factors(p, p - i - j, l3, &mut f);
                        factors.push(f);
                    }
                }
            }
        }
        Ok(Self {
            family,
            degree,
            nodes,
            factors,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Writes the reference partial derivative d^a/dxi^a d^b/deta^b of every basis function.
    pub fn partial_into(&self, xi: Point, a: usize, b: usize, out: &mut [f64]) {
        // d[s][t] holds the (s, t) partial of the running product
        let w = b + 1;
        let mut d = vec![0.0; (a + 1) * w];
        for (k, fs) in self.factors.iter().enumerate() {
            d.iter_mut().for_each(|v| *v = 0.0);
            d[0] = 1.0;
            for f in fs {
                let val = f.c + f.gx * xi.x + f.gy * xi.y;
                for s in (0..=a).rev() {
                    for t in (0..=b).rev() {
                        let mut v = d[s * w + t] * val;
                        if s > 0 {
                            v += s as f64 * f.gx * d[(s - 1) * w + t];
                        }
                        if t > 0 {
                            v += t as f64 * f.gy * d[s * w + t - 1];
                        }
                        d[s * w + t] = v;
                    }
                }
            }
            out[k] = d[a * w + b];
        }
    }

    pub fn partial(&self, xi: Point, a: usize, b: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.partial_into(xi, a, b, &mut out);
        out
    }

    pub fn values(&self, xi: Point) -> Vec<f64> {
        self.partial(xi, 0, 0)
    }

    /// Whether a reference point lies in the reference cell, up to `tol`.
    pub fn contains_reference(&self, xi: Point, tol: f64) -> bool {
        match self.family {
            Family::Q => xi.x >= -tol && xi.y >= -tol && xi.x <= 1.0 + tol && xi.y <= 1.0 + tol,
            Family::P => xi.x >= -tol && xi.y >= -tol && xi.x + xi.y <= 1.0 + tol,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_points(family: Family) -> Vec<Point> {
        let pts = [(0.1, 0.2), (0.33, 0.05), (0.25, 0.6), (0.0, 0.0), (0.45, 0.45)];
        pts.iter()
            .map(|&(x, y)| Point::new(x, y))
            .filter(|p| family == Family::Q || p.x + p.y <= 1.0)
            .collect()
    }

    #[test]
    fn partition_of_unity() {
        for family in [Family::Q, Family::P] {
            for p in 1..=6 {
                let basis = ElementBasis::new(family, p).unwrap();
                for x in sample_points(family) {
                    let s: f64 = basis.values(x).iter().sum();
                    assert!((s - 1.0).abs() < 1e-13, "{family:?}{p}");
                    let gx: f64 = basis.partial(x, 1, 0).iter().sum();
                    assert!(gx.abs() < 1e-11);
                }
            }
        }
    }

    #[test]
    fn kronecker_at_nodes() {
        for family in [Family::Q, Family::P] {
            for p in 1..=6 {
                let basis = ElementBasis::new(family, p).unwrap();
                for (k, &node) in basis.nodes.iter().enumerate() {
                    let v = basis.values(node);
                    for (m, vm) in v.iter().enumerate() {
                        let expected = if m == k { 1.0 } else { 0.0 };
                        assert!((vm - expected).abs() < 1e-11, "{family:?}{p} node {k} fn {m}");
                    }
                }
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let eps = 1e-6;
        for family in [Family::Q, Family::P] {
            for p in 1..=4 {
                let basis = ElementBasis::new(family, p).unwrap();
                for x in sample_points(family) {
                    let x = Point::new(x.x.max(eps), x.y.max(eps));
                    for (a, b) in [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0)] {
                        if a + b + 1 > p + 1 {
                            continue;
                        }
                        let d = basis.partial(x, a + 1, b);
                        let fp = basis.partial(Point::new(x.x + eps, x.y), a, b);
                        let fm = basis.partial(Point::new(x.x - eps, x.y), a, b);
                        let scale = d.iter().fold(1.0f64, |m, v| m.max(v.abs()));
                        for k in 0..basis.len() {
                            let fd = (fp[k] - fm[k]) / (2.0 * eps);
                            assert!((fd - d[k]).abs() < 1e-5 * scale, "{family:?}{p} ({a},{b})");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn degree_limits() {
        assert!(ElementBasis::new(Family::Q, 0).is_err());
        assert!(ElementBasis::new(Family::P, MAX_DEGREE + 1).is_err());
        assert_eq!(ElementBasis::new(Family::Q, 4).unwrap().len(), 25);
        assert_eq!(ElementBasis::new(Family::P, 2).unwrap().len(), 6);
    }
}
