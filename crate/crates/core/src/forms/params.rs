use serde::{Deserialize, Serialize};

/// Penalty, stabilization and quadrature parameters of the discrete method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodParams {
    /// Nitsche penalty, scaled by a_i / h_i.
    pub beta: f64,
    /// Bulk ghost-penalty constants, index l-1 for derivative order l.
    pub c_bulk: Vec<f64>,
    /// Skeleton stabilization constants, index l-1 for derivative order l.
    pub c_skel: Vec<f64>,
    /// Exactness order of cell quadrature in the bulk.
    pub bulk_order: usize,
    /// Exactness order of segment and face quadrature.
    pub segment_order: usize,
}

fn factorial(l: usize) -> f64 {
    (1..=l).map(|k| k as f64).product()
}

/// Default constants 1e-3 / l! for l = 1..=p.
pub fn default_stabilization(p: usize) -> Vec<f64> {
    (1..=p).map(|l| 1e-3 / factorial(l)).collect()
}

impl MethodParams {
    /// Defaults for bulk degree `p` and skeleton degree `p0`.
    ///
    /// Cut-cell rules for Q_p integrate total degree 4p + 1 since products of
    /// tensor-degree-p gradients are not of total degree 2p.
    pub fn defaults(p: usize, p0: usize) -> Self {
        Self {
            beta: 10.0 * (p * p) as f64,
            c_bulk: default_stabilization(p),
            c_skel: default_stabilization(p0),
            bulk_order: 4 * p + 1,
            segment_order: 2 * p.max(p0) + 1,
        }
    }

    /// Defaults for simplicial elements, where total degree 2p + 1 suffices.
    pub fn defaults_simplex(p: usize, p0: usize) -> Self {
        Self {
            bulk_order: 2 * p + 1,
            ..Self::defaults(p, p0)
        }
    }

    /// Multiplies all stabilization constants by `scale`; 0 disables stabilization.
    pub fn with_c_scale(mut self, scale: f64) -> Self {
        self.c_bulk.iter_mut().for_each(|c| *c *= scale);
        self.c_skel.iter_mut().for_each(|c| *c *= scale);
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.beta > 0.0) {
            return Err(format!("beta must be positive, got {}", self.beta));
        }
        if self.c_bulk.iter().chain(&self.c_skel).any(|&c| !(c >= 0.0)) {
            return Err("stabilization constants must be non-negative".into());
        }
        if self.bulk_order == 0 || self.segment_order == 0 {
            return Err("quadrature orders must be at least 1".into());
        }
        Ok(())
    }
}
