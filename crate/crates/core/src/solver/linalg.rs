//! Sparse matrix-vector products, factorizations and conjugate gradients.

use crate::error::SolverError;
use crate::forms::SparseMatrix;
use faer::linalg::solvers::Solve;
use faer::sparse::linalg::LltError;
use faer::sparse::linalg::solvers::Llt;
use faer::{Mat, Side};
use serde::Serialize;

/// y += alpha * A x.
pub fn matvec_add(a: &SparseMatrix, x: &[f64], alpha: f64, y: &mut [f64]) {
    let (cp, ri, v) = (a.col_ptr(), a.row_idx(), a.val());
    for (j, &xj) in x.iter().enumerate() {
        let s = alpha * xj;
        if s == 0.0 {
            continue;
        }
        for k in cp[j]..cp[j + 1] {
            y[ri[k]] += v[k] * s;
        }
    }
}

/// y += alpha * A^T x.
pub fn matvec_transpose_add(a: &SparseMatrix, x: &[f64], alpha: f64, y: &mut [f64]) {
    let (cp, ri, v) = (a.col_ptr(), a.row_idx(), a.val());
    for (j, yj) in y.iter_mut().enumerate() {
        let s: f64 = (cp[j]..cp[j + 1]).map(|k| v[k] * x[ri[k]]).sum();
        *yj += alpha * s;
    }
}

pub fn matvec(a: &SparseMatrix, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; a.nrows()];
    matvec_add(a, x, 1.0, &mut y);
    y
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Sparse Cholesky factor of a symmetric positive definite matrix.
pub struct Cholesky {
    llt: Llt<usize, f64>,
    n: usize,
}

impl std::fmt::Debug for Cholesky {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Cholesky({})", self.n)
    }
}

impl Cholesky {
    pub fn new(a: &SparseMatrix) -> Result<Self, SolverError> {
        let llt = a.sp_cholesky(Side::Lower).map_err(|e| match e {
            LltError::Numeric(faer::linalg::cholesky::llt::factor::LltError::NonPositivePivot { index }) => {
                SolverError::Indefinite(index)
            }
            other => SolverError::Sparse(format!("{other:?}")),
        })?;
        Ok(Self { llt, n: a.nrows() })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut m = Mat::from_fn(self.n, 1, |i, _| b[i]);
        self.llt.solve_in_place(m.as_mut());
        (0..self.n).map(|i| m[(i, 0)]).collect()
    }

    /// Solves for every column of `b` at once.
    pub fn solve_many(&self, b: &mut Mat<f64>) {
        self.llt.solve_in_place(b.as_mut());
    }
}

/// Symmetric linear operator on R^n.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64]) -> Vec<f64>;
}

impl LinearOperator for SparseMatrix {
    fn dim(&self) -> usize {
        self.nrows()
    }
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        matvec(self, x)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CgResult {
    #[serde(skip)]
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Relative residual norms, starting with the initial one.
    pub history: Vec<f64>,
}

/// Conjugate gradients from a zero initial guess, with an optional diagonal preconditioner.
pub fn conjugate_gradient(
    op: &dyn LinearOperator,
    b: &[f64],
    tol: f64,
    max_iter: usize,
    diagonal: Option<&[f64]>,
) -> Result<CgResult, SolverError> {
    let n = op.dim();
    let bnorm = norm(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok(CgResult {
            x,
            iterations: 0,
            history: vec![0.0],
        });
    }
    let precond = |r: &[f64]| -> Vec<f64> {
        match diagonal {
            Some(d) => r.iter().zip(d).map(|(ri, di)| ri / di).collect(),
            None => r.to_vec(),
        }
    };
    let mut r = b.to_vec();
    let mut z = precond(&r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut history = vec![1.0];
    for it in 1..=max_iter {
        let ap = op.apply(&p);
        let alpha = rz / dot(&p, &ap);
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        let rel = norm(&r) / bnorm;
        history.push(rel);
        if rel <= tol {
            return Ok(CgResult {
                x,
                iterations: it,
                history,
            });
        }
        z = precond(&r);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
    }
    Err(SolverError::CgNotConverged {
        iterations: max_iter,
        residual: *history.last().unwrap(),
        history,
    })
}
