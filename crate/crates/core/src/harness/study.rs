//! Convergence, conditioning and cut-robustness studies.

use super::config::{Config, SolverMethod};
use crate::error::{Error, Result};
use crate::forms::{
    energy_error, l2_errors, BlockSystem, Discretization, ExactSolution, MethodParams,
};
use crate::geometry::{BackgroundGrid, PartitionSpec, Point, PolygonalPartition};
use crate::solver::{
    estimate_condition_number, solve_monolithic, EigenMode, SchurOperator, Solution,
};
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// Ratio of successive L2 errors below which convergence counts as levelled out.
pub const PLATEAU_RATIO: f64 = 1.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyKind {
    Solve,
    Convergence,
    Condnum,
    Robustness,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub h: f64,
    pub p: usize,
    pub dofs_bulk: usize,
    pub dofs_skeleton: usize,
    pub energy_error: Option<f64>,
    pub l2_error: Option<f64>,
    pub l2_error_skeleton: Option<f64>,
    pub kappa: Option<f64>,
    pub lambda_max: Option<f64>,
    pub lambda_min: Option<f64>,
    pub cg_iters: Option<usize>,
    pub seconds: f64,
    /// Skeleton degree.
    pub p0: usize,
    /// Interface offset in units of h (robustness sweeps).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<f64>,
    pub c_scale: f64,
    /// "ok" or the failure message.
    pub status: String,
}

impl StudyRow {
    pub fn ok(&self) -> bool {
        self.status == "ok"
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Slopes {
    pub energy_error: Option<f64>,
    pub l2_error: Option<f64>,
    pub l2_error_skeleton: Option<f64>,
    pub kappa: Option<f64>,
    pub lambda_max: Option<f64>,
    pub lambda_min: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessSummary {
    /// max / min energy error over the stabilized sweep.
    pub energy_ratio: Option<f64>,
    /// max / min condition number over the stabilized sweep.
    pub kappa_ratio: Option<f64>,
    /// Unstabilized kappa at the smallest offset over kappa at the largest.
    pub unstabilized_kappa_growth: Option<f64>,
    /// Offsets whose stabilized run failed.
    pub failed_offsets: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub message: String,
    pub exit_code: i32,
}

impl From<&Error> for Failure {
    fn from(e: &Error) -> Self {
        Self {
            message: e.to_string(),
            exit_code: e.exit_code(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub study: StudyKind,
    pub rows: Vec<StudyRow>,
    /// Log-log least-squares slopes against h.
    pub slopes: Slopes,
    /// Successive L2 error ratios e(h_(k-1)) / e(h_k).
    pub l2_ratios: Vec<f64>,
    /// First h whose L2 ratio drops below the plateau threshold.
    pub plateau_h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub robustness: Option<RobustnessSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<Failure>,
    pub config: Config,
}

impl StudyReport {
    fn new(study: StudyKind, config: &Config) -> Self {
        Self {
            study,
            rows: Vec::new(),
            slopes: Slopes::default(),
            l2_ratios: Vec::new(),
            plateau_h: None,
            robustness: None,
            failure: None,
            config: config.clone(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.failure.as_ref().map_or(0, |f| f.exit_code)
    }

    fn finish(mut self) -> Self {
        let rows: Vec<&StudyRow> = self.rows.iter().filter(|r| r.ok()).collect();
        let k = self.config.fit_last.unwrap_or(rows.len()).min(rows.len());
        let rows = &rows[rows.len() - k..];
        let hs: Vec<f64> = rows.iter().map(|r| r.h).collect();
        let fit = |f: &dyn Fn(&StudyRow) -> Option<f64>| -> Option<f64> {
            let ys: Option<Vec<f64>> = rows.iter().map(|r| f(r)).collect();
            fit_loglog(&hs, &ys?)
        };
        self.slopes = Slopes {
            energy_error: fit(&|r| r.energy_error),
            l2_error: fit(&|r| r.l2_error),
            l2_error_skeleton: fit(&|r| r.l2_error_skeleton),
            kappa: fit(&|r| r.kappa),
            lambda_max: fit(&|r| r.lambda_max),
            lambda_min: fit(&|r| r.lambda_min),
        };
        let all: Vec<&StudyRow> = self.rows.iter().filter(|r| r.ok()).collect();
        self.l2_ratios = all
            .windows(2)
            .filter_map(|w| Some(w[0].l2_error? / w[1].l2_error?))
            .collect();
        self.plateau_h = self
            .l2_ratios
            .iter()
            .position(|&q| q < PLATEAU_RATIO)
            .map(|k| all[k + 1].h);
        self
    }
}

/// Least-squares slope of log y against log x; `None` for fewer than three points
/// or non-positive data.
pub fn fit_loglog(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 3 || x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// A solved discretization kept for field output.
pub struct Solved {
    pub disc: Discretization,
    pub system: BlockSystem,
    pub solution: Solution,
    pub row: StudyRow,
}

#[derive(Debug, Clone, Copy)]
pub struct RowOptions {
    pub condition: bool,
    pub timing: bool,
}

fn eigen_mode(config: &Config, dim: usize) -> EigenMode {
    config.eigen.unwrap_or(if dim <= crate::solver::condition::DENSE_LIMIT {
        EigenMode::Dense
    } else {
        EigenMode::Iterative
    })
}

/// Assembles, solves and measures one configuration.
pub fn solve_one(
    config: &Config,
    part: &PolygonalPartition,
    grid: BackgroundGrid,
    params: &MethodParams,
    opts: RowOptions,
) -> Result<Solved> {
    let start = Instant::now();
    let h = grid.h;
    params.validate().map_err(Error::Config)?;
    let (p, p0) = (config.degrees.bulk, config.degrees.skeleton());
    let disc = Discretization::new(part.clone(), grid, config.mode, p, p0)?;
    let exact = config.manufactured();
    let rhs = |i: usize, x: Point| config.rhs_value(exact.as_ref(), i, x);
    let system = BlockSystem::assemble(&disc, params, &rhs)?;
    let needs_schur = opts.condition || config.solver.method == SolverMethod::Schur;
    let schur = if needs_schur && system.n_skeleton() > 0 {
        Some(SchurOperator::new(&system)?)
    } else {
        None
    };
    let solution = match (&schur, config.solver.method) {
        (Some(s), SolverMethod::Schur) => {
            s.solve(config.solver.tol, config.solver.max_iter, config.solver.precondition)?
        }
        _ => solve_monolithic(&system, config.solver.tol)?,
    };
    let mut row = StudyRow {
        h,
        p,
        dofs_bulk: disc.bulk_dofs(),
        dofs_skeleton: disc.skeleton_dofs(),
        energy_error: None,
        l2_error: None,
        l2_error_skeleton: None,
        kappa: None,
        lambda_max: None,
        lambda_min: None,
        cg_iters: solution.cg.as_ref().map(|c| c.iterations),
        seconds: 0.0,
        p0,
        offset: None,
        c_scale: config.params.c_scale,
        status: "ok".into(),
    };
    if let Some(m) = &exact {
        let e: &dyn ExactSolution = m;
        row.energy_error = Some(energy_error(&disc, &system.layout, &solution.u, e, params));
        let l2 = l2_errors(&disc, &system.layout, &solution.u, e, params);
        row.l2_error = Some(l2.total);
        row.l2_error_skeleton = Some(l2.skeleton);
    }
    if let (true, Some(s)) = (opts.condition, &schur) {
        let c = estimate_condition_number(
            s,
            eigen_mode(config, s.dim()),
            h,
            part.min_subdomain_diameter(),
        )?;
        row.kappa = Some(c.kappa);
        row.lambda_max = Some(c.lambda_max);
        row.lambda_min = Some(c.lambda_min);
    }
    if opts.timing {
        row.seconds = start.elapsed().as_secs_f64();
    }
    drop(schur);
    Ok(Solved {
        disc,
        system,
        solution,
        row,
    })
}

fn failed_row(config: &Config, h: f64, c_scale: f64, offset: Option<f64>, e: &Error) -> StudyRow {
    StudyRow {
        h,
        p: config.degrees.bulk,
        dofs_bulk: 0,
        dofs_skeleton: 0,
        energy_error: None,
        l2_error: None,
        l2_error_skeleton: None,
        kappa: None,
        lambda_max: None,
        lambda_min: None,
        cg_iters: None,
        seconds: 0.0,
        p0: config.degrees.skeleton(),
        offset,
        c_scale,
        status: e.to_string(),
    }
}

fn sweep(kind: StudyKind, config: &Config, condition: bool, timing: bool) -> Result<StudyReport> {
    let part = config.build_partition()?;
    let params = config.method_params();
    let mut report = StudyReport::new(kind, config);
    let mut grids = config.grids.clone();
    grids.sort_unstable();
    for n in grids {
        let grid = config.grid(&part, n);
        match solve_one(config, &part, grid.clone(), &params, RowOptions { condition, timing }) {
            Ok(s) => report.rows.push(s.row),
            Err(e) => {
                report.rows.push(failed_row(config, grid.h, config.params.c_scale, None, &e));
                report.failure = Some(Failure::from(&e));
                break;
            }
        }
    }
    Ok(report.finish())
}

/// Errors per grid with fitted slopes; a failing row ends the sweep.
pub fn run_convergence(config: &Config, timing: bool) -> Result<StudyReport> {
    sweep(StudyKind::Convergence, config, false, timing)
}

/// Extreme eigenvalues of the Schur complement per grid with fitted slopes.
pub fn run_condnum_study(config: &Config, timing: bool) -> Result<StudyReport> {
    sweep(StudyKind::Condnum, config, true, timing)
}

/// Single solve on the finest grid.
pub fn run_solve(config: &Config, timing: bool) -> Result<(StudyReport, Option<Solved>)> {
    let part = config.build_partition()?;
    let params = config.method_params();
    let n = *config.grids.iter().max().expect("validated grids");
    let grid = config.grid(&part, n);
    let mut report = StudyReport::new(StudyKind::Solve, config);
    let solved = match solve_one(config, &part, grid.clone(), &params, RowOptions { condition: false, timing }) {
        Ok(s) => {
            report.rows.push(s.row.clone());
            Some(s)
        }
        Err(e) => {
            report.rows.push(failed_row(config, grid.h, config.params.c_scale, None, &e));
            report.failure = Some(Failure::from(&e));
            None
        }
    };
    Ok((report.finish(), solved))
}

/// Grid of spacing 1/n (n made odd) whose line nearest to x = 0.5 lies `offset * h` to its left.
///
/// With n odd the lines x = 0, 1 and y = 0, 1 fall at half-cell offsets, so the
/// interface is the only sliver cut.
pub fn offset_grid(n: usize, offset: f64, kind: crate::geometry::CellKind) -> BackgroundGrid {
    let n = if n % 2 == 0 { n + 1 } else { n };
    let h = 1.0 / n as f64;
    let m = n / 2;
    let origin = Point::new(0.5 - offset * h - (m + 1) as f64 * h, -0.5 * h);
    BackgroundGrid::new(origin, h, n + 2, n + 1, kind)
}

/// Interface-offset sweep on two halves with and without stabilization.
pub fn run_cut_robustness(config: &Config, timing: bool) -> Result<StudyReport> {
    match config.partition {
        PartitionSpec::TwoHalves { interface_x } if interface_x == 0.5 => {}
        _ => {
            return Err(Error::Config(
                "the robustness study needs two_halves with interface_x = 0.5".into(),
            ))
        }
    }
    let part = config.build_partition()?;
    let n = *config.grids.iter().max().expect("validated grids");
    let mut report = StudyReport::new(StudyKind::Robustness, config);
    let mut scales = vec![config.params.c_scale];
    if config.robustness.compare_unstabilized && config.params.c_scale != 0.0 {
        scales.push(0.0);
    }
    let mut failed = Vec::new();
    for &scale in &scales {
        let mut cfg = config.clone();
        cfg.params.c_scale = scale;
        let params = cfg.method_params();
        for &delta in &config.robustness.offsets {
            let grid = offset_grid(n, delta, config.cell_kind);
            let opts = RowOptions {
                condition: true,
                timing,
            };
            let row = match solve_one(&cfg, &part, grid.clone(), &params, opts) {
                Ok(s) => StudyRow {
                    offset: Some(delta),
                    ..s.row
                },
                Err(e) => {
                    if scale == config.params.c_scale {
                        failed.push(delta);
                        report.failure.get_or_insert_with(|| Failure::from(&e));
                    }
                    failed_row(&cfg, grid.h, scale, Some(delta), &e)
                }
            };
            report.rows.push(row);
        }
    }
    let ratio = |scale: f64, f: &dyn Fn(&StudyRow) -> Option<f64>| -> Option<f64> {
        let vals: Option<Vec<f64>> = report
            .rows
            .iter()
            .filter(|r| r.c_scale == scale)
            .map(|r| if r.ok() { f(r) } else { None })
            .collect();
        let vals = vals.filter(|v| !v.is_empty())?;
        let max = vals.iter().cloned().fold(f64::MIN, f64::max);
        let min = vals.iter().cloned().fold(f64::MAX, f64::min);
        Some(max / min)
    };
    let stab = config.params.c_scale;
    let unstabilized = scales.len() > 1;
    let growth = unstabilized
        .then(|| {
            let pick = |d: f64| {
                report
                    .rows
                    .iter()
                    .find(|r| r.c_scale == 0.0 && r.offset == Some(d) && r.ok())
                    .and_then(|r| r.kappa)
            };
            let offs = &config.robustness.offsets;
            let lo = offs.iter().cloned().fold(f64::MAX, f64::min);
            let hi = offs.iter().cloned().fold(f64::MIN, f64::max);
            Some(pick(lo)? / pick(hi)?)
        })
        .flatten();
    report.robustness = Some(RobustnessSummary {
        energy_ratio: ratio(stab, &|r| r.energy_error),
        kappa_ratio: ratio(stab, &|r| r.kappa),
        unstabilized_kappa_growth: growth,
        failed_offsets: failed,
    });
    let mut report = report.finish();
    report.slopes = Slopes::default();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(text: &str) -> Config {
        Config::from_json(text).unwrap()
    }

    #[test]
    fn slope_of_exact_power_law() {
        let h = [0.5, 0.25, 0.125, 0.0625];
        let e: Vec<f64> = h.iter().map(|x: &f64| 3.0 * x.powf(2.5)).collect();
        assert!((fit_loglog(&h, &e).unwrap() - 2.5).abs() < 1e-12);
        assert!(fit_loglog(&h[..2], &e[..2]).is_none());
    }

    #[test]
    fn offset_grid_puts_interface_past_a_line() {
        let g = offset_grid(8, 1e-2, Default::default());
        assert_eq!(g.nx, 11);
        let k = ((0.5 - g.origin.x) / g.h).floor();
        let frac = (0.5 - g.origin.x) / g.h - k;
        assert!((frac - 1e-2).abs() < 1e-9);
        let f0 = (0.0 - g.origin.x) / g.h;
        assert!((f0 - f0.floor() - 0.5).abs() < 0.02);
        assert!(g.origin.x + g.nx as f64 * g.h > 1.0);
    }

    #[test]
    fn manufactured_q1_converges() {
        let c = config(
            r#"{"partition": {"type": "two_halves"}, "exact": "manufactured", "rhs": "manufactured",
                "degrees": {"bulk": 1}, "grids": [4, 8, 16]}"#,
        );
        let r = run_convergence(&c, false).unwrap();
        assert!(r.failure.is_none());
        assert_eq!(r.rows.len(), 3);
        assert!(r.slopes.energy_error.unwrap() > 0.85, "{:?}", r.slopes);
        assert!(r.slopes.l2_error.unwrap() > 1.7, "{:?}", r.slopes);
        assert!(r.rows.iter().all(|row| row.seconds == 0.0 && row.cg_iters.is_some()));
    }

    #[test]
    fn condnum_rows_have_eigenvalues() {
        let c = config(r#"{"partition": {"type": "two_halves"}, "degrees": {"bulk": 1}, "grids": [4, 8]}"#);
        let r = run_condnum_study(&c, false).unwrap();
        for row in &r.rows {
            let (lmax, lmin) = (row.lambda_max.unwrap(), row.lambda_min.unwrap());
            assert!(lmax >= lmin && lmin > 0.0);
            assert!((row.kappa.unwrap() - lmax / lmin).abs() < 1e-9 * row.kappa.unwrap());
        }
    }

    #[test]
    fn failing_row_ends_sweep() {
        let c = config(
            r#"{"partition": {"type": "two_halves", "interface_x": 0.5375}, "degrees": {"bulk": 1},
                "grids": [8, 16], "params": {"beta": 0.01}}"#,
        );
        let r = run_convergence(&c, false).unwrap();
        assert_eq!(r.exit_code(), 2);
        assert_eq!(r.rows.len(), 1);
        assert!(!r.rows[0].ok());
    }

    #[test]
    fn plateau_is_detected() {
        let c = config(r#"{"partition": {"type": "single"}, "degrees": {"bulk": 1}, "grids": [4]}"#);
        let mut r = StudyReport::new(StudyKind::Convergence, &c);
        for (h, e) in [(0.5, 1.0), (0.25, 0.125), (0.125, 0.1), (0.0625, 0.09)] {
            let mut row = failed_row(&c, h, 1.0, None, &Error::Config(String::new()));
            row.status = "ok".into();
            row.l2_error = Some(e);
            r.rows.push(row);
        }
        let r = r.finish();
        assert_eq!(r.l2_ratios[0], 8.0);
        assert_eq!(r.plateau_h, Some(0.125));
    }
}
