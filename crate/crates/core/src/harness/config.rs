//! JSON study configuration.

use super::problem::{FormulaName, Manufactured, RhsSpec, A_LEFT, A_RIGHT};
use crate::error::{Error, Result};
use crate::forms::{MethodParams, SkeletonMode};
use crate::geometry::{BackgroundGrid, CellKind, PartitionSpec, Point, PolygonalPartition};
use crate::solver::EigenMode;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Degrees {
    pub bulk: usize,
    /// Defaults to the bulk degree.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skeleton: Option<usize>,
}

impl Degrees {
    pub fn skeleton(&self) -> usize {
        self.skeleton.unwrap_or(self.bulk)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    /// Nitsche penalty; 10 p^2 when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Multiplier of the default stabilization constants 1e-3 / l!.
    #[serde(default = "one")]
    pub c_scale: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for ParamsSpec {
    fn default() -> Self {
        Self {
            beta: None,
            c_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SolverMethod {
    #[default]
    Schur,
    Monolithic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    #[serde(default)]
    pub method: SolverMethod,
    /// Relative residual tolerance.
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    /// Jacobi preconditioning of the skeleton CG.
    #[serde(default)]
    pub precondition: bool,
}

fn default_tol() -> f64 {
    1e-12
}

fn default_max_iter() -> usize {
    20_000
}

impl Default for SolverSpec {
    fn default() -> Self {
        Self {
            method: SolverMethod::Schur,
            tol: default_tol(),
            max_iter: default_max_iter(),
            precondition: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobustnessSpec {
    /// Interface offsets past the nearest grid line, in units of h.
    #[serde(default = "default_offsets")]
    pub offsets: Vec<f64>,
    /// Repeat the sweep without stabilization.
    #[serde(default = "yes")]
    pub compare_unstabilized: bool,
}

fn default_offsets() -> Vec<f64> {
    vec![1e-2, 1e-4, 1e-8]
}

fn yes() -> bool {
    true
}

impl Default for RobustnessSpec {
    fn default() -> Self {
        Self {
            offsets: default_offsets(),
            compare_unstabilized: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub partition: PartitionSpec,
    /// Per-subdomain coefficients; preset defaults when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<f64>>,
    #[serde(default)]
    pub rhs: RhsSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<FormulaName>,
    #[serde(default)]
    pub mode: SkeletonMode,
    pub degrees: Degrees,
    /// Cells per unit length; h = 1 / n for each entry.
    pub grids: Vec<usize>,
    #[serde(default)]
    pub params: ParamsSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub cell_kind: CellKind,
    #[serde(default)]
    pub solver: SolverSpec,
    /// Eigenvalue method; dense up to the dense limit, iterative above.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigen: Option<EigenMode>,
    #[serde(default)]
    pub robustness: RobustnessSpec,
    /// Least-squares fits use the last `fit_last` rows (all rows when absent).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_last: Option<usize>,
    /// Samples per unit length of field rasters.
    #[serde(default = "default_raster")]
    pub raster: usize,
}

fn default_raster() -> usize {
    64
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        // serde_json messages already end in "at line L column C"
        let c: Config = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.grids.is_empty() || self.grids.contains(&0) {
            return bad("grids must list positive cell counts".into());
        }
        if self.degrees.bulk == 0 || self.degrees.skeleton() == 0 {
            return bad("degrees must be at least 1".into());
        }
        if self.params.beta.is_some_and(|b| !(b > 0.0)) {
            return bad("params.beta must be positive".into());
        }
        if !(self.params.c_scale >= 0.0) || !self.params.c_scale.is_finite() {
            return bad("params.c_scale must be non-negative".into());
        }
        if !(self.solver.tol > 0.0) {
            return bad("solver.tol must be positive".into());
        }
        if self.fit_last.is_some_and(|k| k < 3) {
            return bad("fit_last must be at least 3".into());
        }
        if self.robustness.offsets.iter().any(|d| !(*d > 0.0 && *d < 1.0)) {
            return bad("robustness.offsets must lie in (0, 1)".into());
        }
        if self.raster == 0 {
            return bad("raster must be positive".into());
        }
        let manufactured = self.exact == Some(FormulaName::Manufactured)
            || self.rhs == RhsSpec::Formula(FormulaName::Manufactured);
        if manufactured {
            match self.partition {
                PartitionSpec::TwoHalves { interface_x } if interface_x == 0.5 => {}
                _ => return bad("the manufactured problem needs two_halves with interface_x = 0.5".into()),
            }
        }
        Ok(())
    }

    /// The partition with coefficients applied and the exact solution checked.
    pub fn build_partition(&self) -> Result<PolygonalPartition> {
        let spec = match &self.partition {
            PartitionSpec::Voronoi { seeds, rng_seed: None } => PartitionSpec::Voronoi {
                seeds: *seeds,
                rng_seed: Some(self.seed),
            },
            other => other.clone(),
        };
        let mut part = PolygonalPartition::build(&spec)?;
        if let Some(a) = &self.coefficients {
            part.set_coefficients(a)?;
        } else if self.manufactured().is_some() {
            part.set_coefficients(&[A_LEFT, A_RIGHT])?;
        }
        if let RhsSpec::PerSubdomain(v) = &self.rhs {
            if v.len() != part.num_subdomains() {
                return Err(Error::Config(format!(
                    "rhs lists {} values for {} subdomains",
                    v.len(),
                    part.num_subdomains()
                )));
            }
        }
        if let Some(m) = self.manufactured() {
            super::problem::check_interface_conditions(&m, &part, 1e-10)?;
        }
        Ok(part)
    }

    /// The manufactured solution with the partition's coefficients, if requested.
    pub fn manufactured(&self) -> Option<Manufactured> {
        let wanted = self.exact == Some(FormulaName::Manufactured)
            || self.rhs == RhsSpec::Formula(FormulaName::Manufactured);
        wanted.then(|| match &self.coefficients {
            Some(a) if a.len() == 2 => Manufactured { a: [a[0], a[1]] },
            _ => Manufactured::default(),
        })
    }

    /// Background grid with `n` cells per unit length covering the partition's domain.
    pub fn grid(&self, part: &PolygonalPartition, n: usize) -> BackgroundGrid {
        let bb = part.domain.bbox();
        let h = 1.0 / n as f64;
        let (w, t) = (bb.max.x - bb.min.x, bb.max.y - bb.min.y);
        let nx = ((w / h) - 1e-9).ceil().max(1.0) as usize;
        let ny = ((t / h) - 1e-9).ceil().max(1.0) as usize;
        BackgroundGrid::new(Point::new(bb.min.x, bb.min.y), h, nx, ny, self.cell_kind)
    }

    pub fn method_params(&self) -> MethodParams {
        let (p, p0) = (self.degrees.bulk, self.degrees.skeleton());
        let base = match self.cell_kind {
            CellKind::Quad => MethodParams::defaults(p, p0),
            CellKind::Triangle => MethodParams::defaults_simplex(p, p0),
        };
        let base = base.with_c_scale(self.params.c_scale);
        match self.params.beta {
            Some(b) => base.with_beta(b),
            None => base,
        }
    }

    /// Right-hand side value on subdomain `i`.
    pub fn rhs_value(&self, manufactured: Option<&Manufactured>, i: usize, x: Point) -> f64 {
        match &self.rhs {
            RhsSpec::Constant(c) => *c,
            RhsSpec::PerSubdomain(v) => v[i],
            RhsSpec::Formula(FormulaName::Manufactured) => manufactured.map_or(0.0, |m| m.f(i, x)),
        }
    }
}
