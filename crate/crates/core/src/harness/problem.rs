//! Problem definitions: right-hand sides, exact solutions and the manufactured interface problem.

use crate::error::{Error, Result};
use crate::forms::ExactSolution;
use crate::geometry::{BoundaryKind, PolygonalPartition, Point};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Coefficient on the side of `u1 = x sin(pi y)`.
pub const A_LEFT: f64 = 2.0 * PI - 1.0;
pub const A_RIGHT: f64 = 1.0;

/// Right-hand side: one constant for all subdomains, one per subdomain, or a named formula.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RhsSpec {
    Constant(f64),
    PerSubdomain(Vec<f64>),
    Formula(FormulaName),
}

impl Default for RhsSpec {
    fn default() -> Self {
        RhsSpec::Constant(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormulaName {
    Manufactured,
}

/// The manufactured solution on the two halves of the unit square split at x = 0.5.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Manufactured {
    pub a: [f64; 2],
}

impl Default for Manufactured {
    fn default() -> Self {
        Self {
            a: [A_LEFT, A_RIGHT],
        }
    }
}

impl Manufactured {
    pub fn u(&self, i: usize, x: Point) -> f64 {
        let s = (PI * x.y).sin();
        match i {
            0 => x.x * s,
            _ => (1.0 - x.x - (2.0 * PI * x.x).sin()) * s,
        }
    }

    pub fn grad(&self, i: usize, x: Point) -> Point {
        let (s, c) = (PI * x.y).sin_cos();
        match i {
            0 => Point::new(s, PI * x.x * c),
            _ => {
                let g = 1.0 - x.x - (2.0 * PI * x.x).sin();
                Point::new((-1.0 - 2.0 * PI * (2.0 * PI * x.x).cos()) * s, PI * g * c)
            }
        }
    }

    /// f_i = -a_i Laplace u_i.
    pub fn f(&self, i: usize, x: Point) -> f64 {
        let s = (PI * x.y).sin();
        let pi2 = PI * PI;
        match i {
            0 => self.a[0] * pi2 * x.x * s,
            _ => {
                let s2 = (2.0 * PI * x.x).sin();
                self.a[1] * (pi2 * (1.0 - x.x - s2) - 4.0 * pi2 * s2) * s
            }
        }
    }

    pub fn u0(&self, x: Point) -> f64 {
        0.5 * (PI * x.y).sin()
    }
}

impl ExactSolution for Manufactured {
    fn bulk(&self, i: usize, x: Point) -> f64 {
        self.u(i, x)
    }
    fn bulk_gradient(&self, i: usize, x: Point) -> Point {
        self.grad(i, x)
    }
    fn skeleton(&self, _: usize, x: Point) -> f64 {
        self.u0(x)
    }
}

/// Checks [u] = 0 and the flux jump at the midpoint of every skeleton boundary piece.
pub fn check_interface_conditions(
    exact: &dyn ExactSolution,
    partition: &PolygonalPartition,
    tol: f64,
) -> Result<()> {
    let mut flux: Vec<(Point, f64)> = Vec::new();
    for (i, pieces) in partition.boundaries.iter().enumerate() {
        let a = partition.subdomains[i].coefficient;
        for piece in pieces {
            let BoundaryKind::Skeleton(j) = piece.kind else {
                continue;
            };
            let m = piece.a.lerp(piece.b, 0.5);
            let jump = exact.bulk(i, m) - exact.skeleton(j, m);
            if jump.abs() > tol {
                return Err(Error::Config(format!(
                    "exact solution of subdomain {i} differs from the skeleton by {jump:e} at ({}, {})",
                    m.x, m.y
                )));
            }
            flux.push((m, a * exact.bulk_gradient(i, m).dot(piece.outward_normal())));
        }
    }
    // matching midpoints from the two sides must have opposite fluxes
    let mut used = vec![false; flux.len()];
    for k in 0..flux.len() {
        if used[k] {
            continue;
        }
        let (m, q) = flux[k];
        if let Some(l) = (k + 1..flux.len()).find(|&l| !used[l] && flux[l].0.dist(m) < 1e-12) {
            used[l] = true;
            let jump = q + flux[l].1;
            if jump.abs() > tol * (1.0 + q.abs()) {
                return Err(Error::Config(format!(
                    "flux jump {jump:e} at ({}, {})",
                    m.x, m.y
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::PartitionSpec;

    fn laplacian_fd(u: impl Fn(Point) -> f64, x: Point) -> f64 {
        let e = 1e-4;
        let c = u(x);
        (u(Point::new(x.x + e, x.y)) + u(Point::new(x.x - e, x.y)) + u(Point::new(x.x, x.y + e))
            + u(Point::new(x.x, x.y - e))
            - 4.0 * c)
            / (e * e)
    }

    #[test]
    fn rhs_matches_finite_differences() {
        let m = Manufactured::default();
        for k in 0..40 {
            let x = Point::new(0.05 + 0.9 * ((k * 37 % 40) as f64 / 40.0), 0.05 + 0.9 * (k as f64 / 40.0));
            for i in 0..2 {
                let lap = laplacian_fd(|p| m.u(i, p), x);
                let f = m.f(i, x);
                let fd = -m.a[i] * lap;
                assert!((f - fd).abs() <= 1e-6 * f.abs().max(1.0), "{i} {x:?} {f} {fd}");
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let m = Manufactured::default();
        let e = 1e-6;
        for k in 0..20 {
            let x = Point::new(k as f64 / 19.0, 0.3 + 0.02 * k as f64);
            for i in 0..2 {
                let g = m.grad(i, x);
                let gx = (m.u(i, Point::new(x.x + e, x.y)) - m.u(i, Point::new(x.x - e, x.y))) / (2.0 * e);
                let gy = (m.u(i, Point::new(x.x, x.y + e)) - m.u(i, Point::new(x.x, x.y - e))) / (2.0 * e);
                assert!((g.x - gx).abs() < 1e-7 && (g.y - gy).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn continuous_and_flux_balanced_at_interface() {
        let m = Manufactured::default();
        for k in 0..20 {
            let x = Point::new(0.5, k as f64 / 19.0);
            assert!((m.u(0, x) - m.u0(x)).abs() < 1e-15);
            assert!((m.u(1, x) - m.u0(x)).abs() < 1e-15);
            let jump = m.a[0] * m.grad(0, x).x - m.a[1] * m.grad(1, x).x;
            assert!(jump.abs() < 1e-12);
        }
    }

    #[test]
    fn swapped_coefficients_fail_the_flux_check() {
        let mut part = PolygonalPartition::build(&PartitionSpec::TwoHalves { interface_x: 0.5 }).unwrap();
        part.set_coefficients(&[A_LEFT, A_RIGHT]).unwrap();
        assert!(check_interface_conditions(&Manufactured::default(), &part, 1e-10).is_ok());
        part.set_coefficients(&[A_RIGHT, A_LEFT]).unwrap();
        assert!(check_interface_conditions(&Manufactured::default(), &part, 1e-10).is_err());
    }

    #[test]
    fn rhs_spec_parses_all_forms() {
        let c: RhsSpec = serde_json::from_str("1.5").unwrap();
        assert_eq!(c, RhsSpec::Constant(1.5));
        let v: RhsSpec = serde_json::from_str("[1, 2]").unwrap();
        assert_eq!(v, RhsSpec::PerSubdomain(vec![1.0, 2.0]));
        let f: RhsSpec = serde_json::from_str("\"manufactured\"").unwrap();
        assert_eq!(f, RhsSpec::Formula(FormulaName::Manufactured));
    }
}
