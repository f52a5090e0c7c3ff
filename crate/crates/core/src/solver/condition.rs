//! Extreme eigenvalues and condition number of the Schur complement.

use super::linalg::{dot, norm, Cholesky, LinearOperator};
use super::schur::SchurOperator;
use crate::error::{Result, SolverError};
use faer::{Mat, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EigenMode {
    /// Materialize the operator and run a symmetric eigensolver.
    Dense,
    /// Lanczos on the operator and on its inverse.
    Iterative,
}

/// Largest dimension for which the dense mode is used.
pub const DENSE_LIMIT: usize = 2000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CondNumberReport {
    pub lambda_max: f64,
    pub lambda_min: f64,
    pub kappa: f64,
    pub h: f64,
    pub min_diameter: f64,
    pub method: EigenMode,
    pub dim: usize,
}

fn symmetric_eigenvalues(m: &Mat<f64>) -> Result<Vec<f64>> {
    let mut ev = m
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| SolverError::Eigen(format!("{e:?}")))?;
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(ev)
}

/// Largest eigenvalue of a symmetric positive operator by Lanczos with full reorthogonalization.
pub fn lanczos_max(op: &dyn LinearOperator, rtol: f64, max_iter: usize, seed: u64) -> Result<f64> {
    let n = op.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
    let q0 = norm(&q);
    q.iter_mut().for_each(|v| *v /= q0);
    let mut basis: Vec<Vec<f64>> = vec![q];
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut last = f64::NAN;
    let max_iter = max_iter.min(n);
    for k in 0..max_iter {
        let mut w = op.apply(&basis[k]);
        let a = dot(&w, &basis[k]);
        alpha.push(a);
        // full reorthogonalization, twice for stability
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&w, b);
                w.iter_mut().zip(b).for_each(|(wi, bi)| *wi -= c * bi);
            }
        }
        let m = k + 1;
        let t = Mat::from_fn(m, m, |i, j| {
            if i == j {
                alpha[i]
            } else if i == j + 1 || j == i + 1 {
                beta[i.min(j)]
            } else {
                0.0
            }
        });
        let ritz = *symmetric_eigenvalues(&t)?.last().unwrap();
        let bnorm = norm(&w);
        if (ritz - last).abs() <= rtol * ritz.abs() || bnorm <= 1e-14 * ritz.abs() || m == n {
            return Ok(ritz);
        }
        last = ritz;
        beta.push(bnorm);
        basis.push(w.iter().map(|v| v / bnorm).collect());
    }
    Err(SolverError::Eigen(format!("Lanczos did not converge in {max_iter} iterations")).into())
}

/// Inverse of the Schur complement through a factorization of the full system.
struct SchurInverse<'a> {
    full: Cholesky,
    schur: &'a SchurOperator<'a>,
}

impl LinearOperator for SchurInverse<'_> {
    fn dim(&self) -> usize {
        self.schur.dim()
    }
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut rhs = x.to_vec();
        rhs.resize(self.full.dim(), 0.0);
        let u = self.full.solve(&rhs);
        u[..self.dim()].to_vec()
    }
}

/// Extreme eigenvalues of the Schur complement in the Euclidean coefficient inner product.
pub fn estimate_condition_number(
    schur: &SchurOperator<'_>,
    mode: EigenMode,
    h: f64,
    min_diameter: f64,
) -> Result<CondNumberReport> {
    let dim = schur.dim();
    if dim == 0 {
        return Err(SolverError::Eigen("empty skeleton".into()).into());
    }
    let report = |lambda_max: f64, lambda_min: f64, method| CondNumberReport {
        lambda_max,
        lambda_min,
        kappa: lambda_max / lambda_min,
        h,
        min_diameter,
        method,
        dim,
    };
    let dense = || -> Result<CondNumberReport> {
        let ev = symmetric_eigenvalues(&schur.to_dense())?;
        let (lo, hi) = (ev[0], ev[ev.len() - 1]);
        if lo <= 0.0 {
            return Err(SolverError::Eigen(format!("non-positive eigenvalue {lo:e}")).into());
        }
        Ok(report(hi, lo, EigenMode::Dense))
    };
    match mode {
        EigenMode::Dense => dense(),
        EigenMode::Iterative => {
            let iterative = || -> Result<CondNumberReport> {
                let lmax = lanczos_max(schur, 1e-8, 500, 1)?;
                let inv = SchurInverse {
                    full: Cholesky::new(&schur.system.full_matrix()?)?,
                    schur,
                };
                let inv_max = lanczos_max(&inv, 1e-8, 500, 2)?;
                Ok(report(lmax, 1.0 / inv_max, EigenMode::Iterative))
            };
            match iterative() {
                Ok(r) => Ok(r),
                Err(_) if dim <= DENSE_LIMIT => dense(),
                Err(e) => Err(e),
            }
        }
    }
}
