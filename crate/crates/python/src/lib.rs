//! Python bindings: configurations, partitions, studies and solved fields.

use hycut::geometry::{Point, PolygonalPartition};
use hycut::harness::{self, output, StudyReport};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: hycut::Error) -> PyErr {
    match e {
        hycut::Error::Solver(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn json_value<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Study configuration, as read by the command-line tool.
#[pyclass(module = "hycut", skip_from_py_object)]
#[derive(Clone)]
struct Config {
    inner: harness::Config,
}

#[pymethods]
impl Config {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        harness::Config::from_json(text).map(|inner| Self { inner }).map_err(to_py)
    }

    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        harness::Config::load(&path).map(|inner| Self { inner }).map_err(to_py)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn grids(&self) -> Vec<usize> {
        self.inner.grids.clone()
    }

    #[setter]
    fn set_grids(&mut self, grids: Vec<usize>) -> PyResult<()> {
        let mut next = self.inner.clone();
        next.grids = grids;
        next.validate().map_err(to_py)?;
        self.inner = next;
        Ok(())
    }

    fn partition(&self) -> PyResult<Partition> {
        self.inner.build_partition().map(|inner| Partition { inner }).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Config({})", self.inner.to_json())
    }
}

/// Polygonal partition of the domain into subdomains.
#[pyclass(module = "hycut")]
struct Partition {
    inner: PolygonalPartition,
}

#[pymethods]
impl Partition {
    #[getter]
    fn num_subdomains(&self) -> usize {
        self.inner.num_subdomains()
    }

    #[getter]
    fn num_skeleton_components(&self) -> usize {
        self.inner.num_skeleton_components()
    }

    #[getter]
    fn coefficients(&self) -> Vec<f64> {
        self.inner.subdomains.iter().map(|s| s.coefficient).collect()
    }

    /// Counter-clockwise vertices of subdomain `i`.
    fn polygon(&self, i: usize) -> PyResult<Vec<(f64, f64)>> {
        let s = self
            .inner
            .subdomains
            .get(i)
            .ok_or_else(|| PyValueError::new_err(format!("no subdomain {i}")))?;
        Ok(s.polygon.vertices.iter().map(|p| (p.x, p.y)).collect())
    }

    /// Polyline of skeleton component `k` and the pair of subdomains it separates.
    fn skeleton(&self, k: usize) -> PyResult<(Vec<(f64, f64)>, (usize, usize))> {
        let c = self
            .inner
            .skeleton
            .get(k)
            .ok_or_else(|| PyValueError::new_err(format!("no skeleton component {k}")))?;
        Ok((c.points.iter().map(|p| (p.x, p.y)).collect(), c.pair))
    }

    fn locate(&self, x: f64, y: f64) -> Option<usize> {
        self.inner.locate(Point::new(x, y))
    }
}

/// Discrete solution on the finest configured grid.
#[pyclass(module = "hycut", unsendable)]
struct Solution {
    solved: harness::Solved,
    report: StudyReport,
}

#[pymethods]
impl Solution {
    #[getter]
    fn report<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        json_value(py, &self.report)
    }

    #[getter]
    fn coefficients(&self) -> Vec<f64> {
        self.solved.solution.u.clone()
    }

    #[getter]
    fn cg_iterations(&self) -> Option<usize> {
        self.solved.row.cg_iters
    }

    /// Samples (x, y, value, subdomain_id) at raster cell centres.
    #[pyo3(signature = (per_unit = 64))]
    fn field(&self, per_unit: usize) -> Vec<(f64, f64, f64, usize)> {
        output::field_raster(&self.solved, per_unit.max(1))
            .into_iter()
            .map(|s| (s.x, s.y, s.value, s.subdomain))
            .collect()
    }
}

fn report_or_raise<'py>(py: Python<'py>, report: StudyReport, strict: bool) -> PyResult<Bound<'py, PyAny>> {
    if strict {
        if let Some(f) = &report.failure {
            return Err(PyRuntimeError::new_err(f.message.clone()));
        }
    }
    json_value(py, &report)
}

/// Solve on the finest grid of `config`.
#[pyfunction]
#[pyo3(signature = (config, timing = true))]
fn solve(py: Python<'_>, config: &Config, timing: bool) -> PyResult<Solution> {
    let (report, solved) = py.detach(|| harness::run_solve(&config.inner, timing)).map_err(to_py)?;
    match solved {
        Some(solved) => Ok(Solution { solved, report }),
        None => Err(PyRuntimeError::new_err(
            report.failure.map_or_else(|| "solve failed".to_string(), |f| f.message),
        )),
    }
}

/// Error convergence study; returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (config, timing = true, strict = false))]
fn converge<'py>(py: Python<'py>, config: &Config, timing: bool, strict: bool) -> PyResult<Bound<'py, PyAny>> {
    let r = py.detach(|| harness::run_convergence(&config.inner, timing)).map_err(to_py)?;
    report_or_raise(py, r, strict)
}

/// Condition-number study; returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (config, timing = true, strict = false))]
fn condnum<'py>(py: Python<'py>, config: &Config, timing: bool, strict: bool) -> PyResult<Bound<'py, PyAny>> {
    let r = py.detach(|| harness::run_condnum_study(&config.inner, timing)).map_err(to_py)?;
    report_or_raise(py, r, strict)
}

/// Interface offset sweep; returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (config, timing = true, strict = false))]
fn robustness<'py>(py: Python<'py>, config: &Config, timing: bool, strict: bool) -> PyResult<Bound<'py, PyAny>> {
    let r = py.detach(|| harness::run_cut_robustness(&config.inner, timing)).map_err(to_py)?;
    report_or_raise(py, r, strict)
}

/// Least-squares slope of log(y) against log(x); None with fewer than three positive points.
#[pyfunction]
fn fit_loglog(x: Vec<f64>, y: Vec<f64>) -> Option<f64> {
    harness::fit_loglog(&x, &y)
}

#[pymodule]
fn _hycut(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Config>()?;
    m.add_class::<Partition>()?;
    m.add_class::<Solution>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(converge, m)?)?;
    m.add_function(wrap_pyfunction!(condnum, m)?)?;
    m.add_function(wrap_pyfunction!(robustness, m)?)?;
    m.add_function(wrap_pyfunction!(fit_loglog, m)?)?;
    Ok(())
}
