//! Python bindings for `hitting_core`.
//!
//! Structured results cross the boundary as JSON and come back as plain
//! dicts, so the Python side needs no extra classes for reports.

use hitting_core::harness::{run_experiment_with, to_json_string, RunOptions};
use hitting_core::laws::{self, LawParams};
use hitting_core::process::{self, Marginal};
use hitting_core::{estimators, Error, ExperimentConfig};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

fn to_py_err(e: Error) -> PyErr {
    if e.is_config_error() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn parse_marginal(name: &str) -> PyResult<Marginal> {
    serde_json::from_value(serde_json::Value::String(name.to_owned()))
        .map_err(|_| PyValueError::new_err(format!("unknown marginal `{name}`; expected UNIT_FRECHET or UNIFORM")))
}

/// Serializes through the report writer and parses with Python's `json`.
fn to_py_dict<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = to_json_string(value).map_err(to_py_err)?;
    py.import("json")?.call_method1("loads", (text,))
}

#[pyclass(name = "ProcessModel", frozen)]
struct PyProcessModel {
    inner: process::ProcessModel,
}

#[pymethods]
impl PyProcessModel {
    #[staticmethod]
    #[pyo3(signature = (marginal = "UNIT_FRECHET"))]
    fn iid(marginal: &str) -> PyResult<Self> {
        Ok(Self {
            inner: process::ProcessModel::iid(parse_marginal(marginal)?),
        })
    }

    #[staticmethod]
    #[pyo3(signature = (alpha, marginal = "UNIT_FRECHET"))]
    fn armax(alpha: f64, marginal: &str) -> PyResult<Self> {
        let inner = process::ProcessModel::armax_with_marginal(alpha, parse_marginal(marginal)?).map_err(to_py_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (m, marginal = "UNIT_FRECHET"))]
    fn moving_max(m: usize, marginal: &str) -> PyResult<Self> {
        let inner = process::ProcessModel::moving_max(m, parse_marginal(marginal)?).map_err(to_py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn true_theta(&self) -> f64 {
        self.inner.true_theta()
    }

    fn marginal_cdf(&self, x: f64) -> f64 {
        self.inner.marginal_cdf(x)
    }

    fn marginal_quantile(&self, p: f64) -> PyResult<f64> {
        self.inner.marginal_quantile(p).map_err(to_py_err)
    }

    /// One sample path of length `n`, deterministic in `(seed, replication_id)`.
    #[pyo3(signature = (n, seed, replication_id = 0))]
    fn simulate(&self, py: Python<'_>, n: usize, seed: u64, replication_id: u64) -> PyResult<Vec<f64>> {
        let model = self.inner;
        py.detach(move || process::simulate(model, n, seed, replication_id))
            .map(|path| path.values)
            .map_err(to_py_err)
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py_dict(py, &self.inner)
    }

    fn __repr__(&self) -> String {
        format!("ProcessModel({:?}, theta={})", self.inner.kind, self.inner.true_theta())
    }
}

#[pyclass(name = "ExceedanceSummary", frozen)]
struct PyExceedanceSummary {
    inner: hitting_core::exceedance::ExceedanceSummary,
}

#[pymethods]
impl PyExceedanceSummary {
    #[new]
    fn new(values: Vec<f64>, u: f64) -> Self {
        Self {
            inner: hitting_core::exceedance::ExceedanceSummary::from_values(&values, u),
        }
    }

    /// 1-based indices of observations strictly above the threshold.
    #[getter]
    fn indices(&self) -> Vec<usize> {
        self.inner.indices.clone()
    }

    #[getter]
    fn count(&self) -> usize {
        self.inner.count()
    }

    /// Index of the k-th exceedance, or `None` when censored.
    #[pyo3(signature = (k = 1))]
    fn hitting_time(&self, k: usize) -> PyResult<Option<usize>> {
        self.inner.hitting_time(k).map_err(to_py_err)
    }

    fn gaps(&self) -> Vec<usize> {
        self.inner.inter_exceedance_gaps()
    }

    fn __len__(&self) -> usize {
        self.inner.count()
    }
}

fn params(rho: f64, theta: f64) -> PyResult<LawParams> {
    LawParams::new(rho, theta).map_err(to_py_err)
}

/// `eta`, `c`, `rho_star`, `q` and `q_star` for `(rho, theta)`.
#[pyfunction]
fn normalization<'py>(py: Python<'py>, rho: f64, theta: f64) -> PyResult<Bound<'py, PyAny>> {
    to_py_dict(py, &laws::normalization(&params(rho, theta)?))
}

#[pyfunction]
fn t1_pmf_raw(rho: f64, theta: f64, j: usize) -> PyResult<f64> {
    Ok(laws::t1_pmf_raw(&params(rho, theta)?, j))
}

#[pyfunction]
fn t1_pmf_normalized(rho: f64, theta: f64, j: usize) -> PyResult<f64> {
    Ok(laws::t1_pmf_normalized(&params(rho, theta)?, j))
}

#[pyfunction]
fn tstar_pmf_asymptotic(rho: f64, theta: f64, j: usize) -> PyResult<f64> {
    Ok(laws::tstar_pmf_asymptotic(&params(rho, theta)?, j))
}

#[pyfunction]
fn tstar_pmf_normalized(rho: f64, theta: f64, j: usize) -> PyResult<f64> {
    Ok(laws::tstar_pmf_normalized(&params(rho, theta)?, j))
}

#[pyfunction]
fn tstar_pmf_limit_at_n(theta: f64, tau: f64, n: usize) -> PyResult<f64> {
    laws::tstar_pmf_limit_at_n(theta, tau, n).map_err(to_py_err)
}

#[pyfunction]
fn intervals_estimator<'py>(py: Python<'py>, gaps: Vec<usize>) -> PyResult<Bound<'py, PyAny>> {
    to_py_dict(py, &estimators::intervals_estimator(&gaps).map_err(to_py_err)?)
}

#[pyfunction]
fn blocks_estimator<'py>(py: Python<'py>, values: Vec<f64>, u: f64, block_len: usize) -> PyResult<Bound<'py, PyAny>> {
    to_py_dict(
        py,
        &estimators::blocks_estimator_values(&values, u, block_len).map_err(to_py_err)?,
    )
}

#[pyfunction]
#[pyo3(signature = (values, u, run_len = estimators::DEFAULT_RUN_LEN))]
fn runs_estimator<'py>(py: Python<'py>, values: Vec<f64>, u: f64, run_len: usize) -> PyResult<Bound<'py, PyAny>> {
    to_py_dict(
        py,
        &estimators::runs_estimator_values(&values, u, run_len).map_err(to_py_err)?,
    )
}

/// Runs one experiment from a JSON config and returns the summary as a dict.
#[pyfunction]
#[pyo3(signature = (config_json, threads = None))]
fn run_experiment<'py>(py: Python<'py>, config_json: &str, threads: Option<usize>) -> PyResult<Bound<'py, PyAny>> {
    let config = ExperimentConfig::from_json(config_json).map_err(to_py_err)?;
    let report = py
        .detach(|| run_experiment_with(&config, &RunOptions { threads }))
        .map_err(to_py_err)?;
    to_py_dict(py, &report)
}

#[pymodule]
fn hitting(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProcessModel>()?;
    m.add_class::<PyExceedanceSummary>()?;
    m.add_function(wrap_pyfunction!(normalization, m)?)?;
    m.add_function(wrap_pyfunction!(t1_pmf_raw, m)?)?;
    m.add_function(wrap_pyfunction!(t1_pmf_normalized, m)?)?;
    m.add_function(wrap_pyfunction!(tstar_pmf_asymptotic, m)?)?;
    m.add_function(wrap_pyfunction!(tstar_pmf_normalized, m)?)?;
    m.add_function(wrap_pyfunction!(tstar_pmf_limit_at_n, m)?)?;
    m.add_function(wrap_pyfunction!(intervals_estimator, m)?)?;
    m.add_function(wrap_pyfunction!(blocks_estimator, m)?)?;
    m.add_function(wrap_pyfunction!(runs_estimator, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
