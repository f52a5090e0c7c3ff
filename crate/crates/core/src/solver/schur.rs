//! Static condensation of the bulk unknowns onto the skeleton.

use super::linalg::{conjugate_gradient, matvec_add, matvec_transpose_add, norm, CgResult, Cholesky, LinearOperator};
use super::Solution;
use crate::error::{Result, SolverError};
use crate::forms::BlockSystem;
use faer::Mat;
use rayon::prelude::*;

/// Matrix-free S = A00 - sum_i A0i Aii^-1 Ai0 with one factorization per subdomain.
#[derive(Debug)]
pub struct SchurOperator<'a> {
    pub system: &'a BlockSystem,
    factors: Vec<Cholesky>,
}

impl<'a> SchurOperator<'a> {
    pub fn new(system: &'a BlockSystem) -> Result<Self> {
        let factors = system
            .aii
            .par_iter()
            .enumerate()
            .map(|(i, a)| Cholesky::new(a).map_err(|_| SolverError::SingularSubdomain(i)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { system, factors })
    }

    pub fn dim(&self) -> usize {
        self.system.n_skeleton()
    }

    /// Bulk extension w_i = -Aii^-1 Ai0 v0 of each subdomain.
    pub fn apply_th(&self, v0: &[f64]) -> Vec<Vec<f64>> {
        self.factors
            .par_iter()
            .zip(&self.system.a0i)
            .map(|(f, a0i)| {
                let mut rhs = vec![0.0; a0i.ncols()];
                matvec_transpose_add(a0i, v0, -1.0, &mut rhs);
                f.solve(&rhs)
            })
            .collect()
    }

    pub fn apply(&self, v0: &[f64]) -> Vec<f64> {
        let w = self.apply_th(v0);
        let mut y = vec![0.0; self.dim()];
        matvec_add(&self.system.a00, v0, 1.0, &mut y);
        for (a0i, wi) in self.system.a0i.iter().zip(&w) {
            matvec_add(a0i, wi, 1.0, &mut y);
        }
        y
    }

    /// Diagonal of A00, used as an optional CG preconditioner.
    pub fn a00_diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.dim()];
        for e in self.system.a00.triplet_iter() {
            if e.row == e.col {
                d[e.row] += *e.val;
            }
        }
        d
    }

    /// Condensed right-hand side l0 - sum_i A0i Aii^-1 li.
    pub fn condensed_load(&self) -> Vec<f64> {
        let sys = self.system;
        let sol: Vec<Vec<f64>> = self
            .factors
            .par_iter()
            .zip(&sys.li)
            .map(|(f, li)| f.solve(li))
            .collect();
        let mut g = sys.l0.clone();
        for (a0i, x) in sys.a0i.iter().zip(&sol) {
            matvec_add(a0i, x, -1.0, &mut g);
        }
        g
    }

    /// Bulk solutions ui = Aii^-1 (li - Ai0 u0).
    pub fn recover_bulk(&self, u0: &[f64]) -> Vec<Vec<f64>> {
        let sys = self.system;
        self.factors
            .par_iter()
            .zip(sys.a0i.par_iter().zip(&sys.li))
            .map(|(f, (a0i, li))| {
                let mut rhs = li.clone();
                matvec_transpose_add(a0i, u0, -1.0, &mut rhs);
                f.solve(&rhs)
            })
            .collect()
    }

    /// CG on the skeleton system followed by subdomain back-substitution.
    pub fn solve(&self, tol: f64, max_iter: usize, precondition: bool) -> Result<Solution> {
        let g = self.condensed_load();
        let diag = precondition.then(|| self.a00_diagonal());
        let cg: CgResult = conjugate_gradient(self, &g, tol, max_iter, diag.as_deref())?;
        let bulk = self.recover_bulk(&cg.x);
        let mut u = cg.x.clone();
        for b in bulk {
            u.extend(b);
        }
        let residual = self.system_residual(&u);
        Ok(Solution {
            u,
            residual,
            cg: Some(cg),
        })
    }

    fn system_residual(&self, u: &[f64]) -> f64 {
        let sys = self.system;
        let l = sys.full_load();
        let ln = norm(&l);
        if ln == 0.0 {
            return norm(u);
        }
        let r = sys.residual(u);
        norm(&r) / ln
    }

    /// The dense Schur complement, built from blocks of multi-right-hand-side solves.
    pub fn to_dense(&self) -> Mat<f64> {
        let n = self.dim();
        let sys = self.system;
        let mut s = sys.a00.to_dense();
        const BLOCK: usize = 64;
        for (f, a0i) in self.factors.iter().zip(&sys.a0i) {
            let ni = a0i.ncols();
            let mut start = 0;
            while start < n {
                let w = BLOCK.min(n - start);
                // columns start..start+w of Ai0 = A0i^T
                let mut b = Mat::<f64>::zeros(ni, w);
                for e in a0i.triplet_iter() {
                    if e.row >= start && e.row < start + w {
                        b[(e.col, e.row - start)] += *e.val;
                    }
                }
                f.solve_many(&mut b);
                for c in 0..w {
                    let col: Vec<f64> = (0..ni).map(|r| b[(r, c)]).collect();
                    let mut y = vec![0.0; n];
                    matvec_add(a0i, &col, 1.0, &mut y);
                    for r in 0..n {
                        s[(r, start + c)] -= y[r];
                    }
                }
                start += w;
            }
        }
        s
    }
}

impl LinearOperator for SchurOperator<'_> {
    fn dim(&self) -> usize {
        SchurOperator::dim(self)
    }
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        SchurOperator::apply(self, x)
    }
}
