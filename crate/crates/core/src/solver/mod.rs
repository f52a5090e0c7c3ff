//! Monolithic and Schur-complement solvers and condition-number estimation.

pub mod condition;
pub mod linalg;
pub mod schur;

pub use condition::{estimate_condition_number, CondNumberReport, EigenMode};
pub use linalg::{conjugate_gradient, CgResult, Cholesky, LinearOperator};
pub use schur::SchurOperator;

use crate::error::{Result, SolverError};
use crate::forms::BlockSystem;
use linalg::norm;

/// Solution in the global layout with its relative residual.
#[derive(Debug, Clone)]
pub struct Solution {
    pub u: Vec<f64>,
    pub residual: f64,
    pub cg: Option<CgResult>,
}

impl BlockSystem {
    /// l - A u.
    pub fn residual(&self, u: &[f64]) -> Vec<f64> {
        let mut r = self.full_load();
        let ns = self.n_skeleton();
        let u0 = &u[..ns];
        let (r0, rb) = r.split_at_mut(ns);
        linalg::matvec_add(&self.a00, u0, -1.0, r0);
        for i in 0..self.num_subdomains() {
            let o = self.layout.bulk_offsets[i];
            let n = self.layout.bulk_sizes[i];
            let ui = &u[o..o + n];
            let ri = &mut rb[o - ns..o - ns + n];
            linalg::matvec_add(&self.a0i[i], ui, -1.0, r0);
            linalg::matvec_transpose_add(&self.a0i[i], u0, -1.0, ri);
            linalg::matvec_add(&self.aii[i], ui, -1.0, ri);
        }
        r
    }
}

/// Sparse Cholesky solve of the full system with iterative refinement.
pub fn solve_monolithic(system: &BlockSystem, tol: f64) -> Result<Solution> {
    let n = system.layout.n_total;
    let l = system.full_load();
    let ln = norm(&l);
    if ln == 0.0 {
        return Ok(Solution {
            u: vec![0.0; n],
            residual: 0.0,
            cg: None,
        });
    }
    let chol = Cholesky::new(&system.full_matrix()?)?;
    let mut u = chol.solve(&l);
    let mut residual = norm(&system.residual(&u)) / ln;
    for _ in 0..3 {
        if residual <= tol {
            break;
        }
        let du = chol.solve(&system.residual(&u));
        u.iter_mut().zip(&du).for_each(|(a, b)| *a += b);
        residual = norm(&system.residual(&u)) / ln;
    }
    if residual > tol {
        return Err(SolverError::Residual { residual, tol }.into());
    }
    Ok(Solution { u, residual, cg: None })
}
