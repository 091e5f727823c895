//! Python bindings. Reports come back as plain dicts and lists.

use std::path::PathBuf;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use pyo3::IntoPyObjectExt;
use serde::Serialize;
use serde_json::Value;

use fronts_lv_core::analysis::{classify_outcome, measure_speeds};
use fronts_lv_core::fbm::{self, SolverConfig};
use fronts_lv_core::io::{config::load_run, run::run_simulation};
use fronts_lv_core::logistic::DetectConfig;
use fronts_lv_core::model::{self, InitialProfile};
use fronts_lv_core::{semiwave, thresholds, Error};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::InvalidParameter { .. } | Error::Config(_) | Error::Regime(_) => PyValueError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn to_py<'py>(py: Python<'py>, value: &Value) -> PyResult<Bound<'py, PyAny>> {
    match value {
        Value::Null => Ok(py.None().into_bound(py)),
        Value::Bool(b) => b.into_bound_py_any(py),
        Value::Number(n) => match (n.as_i64(), n.as_f64()) {
            (Some(i), _) => i.into_bound_py_any(py),
            (None, Some(f)) => f.into_bound_py_any(py),
            _ => Err(PyValueError::new_err(format!("unrepresentable number {n}"))),
        },
        Value::String(s) => s.into_bound_py_any(py),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(to_py(py, item)?)?;
            }
            Ok(list.into_any())
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, v) in map {
                dict.set_item(k, to_py(py, v)?)?;
            }
            Ok(dict.into_any())
        }
    }
}

fn report<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    to_py(py, &v)
}

/// Model coefficients and initial fronts.
#[pyclass(name = "ModelParams", from_py_object)]
#[derive(Clone, Copy)]
struct PyModelParams {
    inner: model::ModelParams,
}

#[pymethods]
impl PyModelParams {
    #[new]
    #[pyo3(signature = (a, b, c, d, beta, mu, g0, h0))]
    #[allow(clippy::too_many_arguments)]
    fn new(a: f64, b: f64, c: f64, d: f64, beta: f64, mu: f64, g0: f64, h0: f64) -> PyResult<Self> {
        let inner = model::ModelParams {
            a,
            b,
            c,
            d,
            beta,
            mu,
            g0,
            h0,
        };
        inner.validate().map_err(py_err)?;
        Ok(PyModelParams { inner })
    }

    #[getter]
    fn a(&self) -> f64 {
        self.inner.a
    }
    #[getter]
    fn b(&self) -> f64 {
        self.inner.b
    }
    #[getter]
    fn c(&self) -> f64 {
        self.inner.c
    }
    #[getter]
    fn d(&self) -> f64 {
        self.inner.d
    }
    #[getter]
    fn beta(&self) -> f64 {
        self.inner.beta
    }
    #[getter]
    fn mu(&self) -> f64 {
        self.inner.mu
    }
    #[getter]
    fn g0(&self) -> f64 {
        self.inner.g0
    }
    #[getter]
    fn h0(&self) -> f64 {
        self.inner.h0
    }

    #[allow(clippy::wrong_self_convention)]
    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        report(py, &self.inner)
    }

    /// Derived constants for cosine initial data of the given amplitudes.
    #[pyo3(signature = (prey_amplitude = 1.0, predator_amplitude = 1.0))]
    fn derived<'py>(
        &self,
        py: Python<'py>,
        prey_amplitude: f64,
        predator_amplitude: f64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let (u0, v0) = profiles(&self.inner, prey_amplitude, predator_amplitude)?;
        report(py, &model::derive_constants(&self.inner, &u0, &v0))
    }

    fn speed_table<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        report(py, &semiwave::speed_table(&self.inner).map_err(py_err)?)
    }

    fn coexistence_bounds<'py>(&self, py: Python<'py>, rounds: usize) -> PyResult<Bound<'py, PyAny>> {
        report(
            py,
            &model::iterate_coexistence_bounds(&self.inner, rounds).map_err(py_err)?,
        )
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!(
            "ModelParams(a={}, b={}, c={}, d={}, beta={}, mu={}, g0={}, h0={})",
            p.a, p.b, p.c, p.d, p.beta, p.mu, p.g0, p.h0
        )
    }
}

fn profiles(p: &model::ModelParams, prey: f64, predator: f64) -> PyResult<(InitialProfile, InitialProfile)> {
    Ok((
        InitialProfile::cosine(p.g0, prey).map_err(py_err)?,
        InitialProfile::cosine(p.h0, predator).map_err(py_err)?,
    ))
}

type Column = (&'static str, fn(&fbm::Record) -> f64);

/// Result of `simulate`.
#[pyclass(name = "Trajectory")]
struct PyTrajectory {
    inner: fbm::Trajectory,
}

#[pymethods]
impl PyTrajectory {
    /// Records as a dict of equal-length columns.
    #[getter]
    fn records<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let r = &self.inner.records;
        let dict = PyDict::new(py);
        let cols: [Column; 11] = [
            ("t", |r| r.t),
            ("g", |r| r.g),
            ("h", |r| r.h),
            ("gdot", |r| r.gdot),
            ("hdot", |r| r.hdot),
            ("umax", |r| r.umax),
            ("vmax", |r| r.vmax),
            ("u_at_0", |r| r.u_at_0),
            ("v_at_0", |r| r.v_at_0),
            ("mass_u", |r| r.mass_u),
            ("mass_v", |r| r.mass_v),
        ];
        for (name, f) in cols {
            dict.set_item(name, r.iter().map(f).collect::<Vec<f64>>())?;
        }
        Ok(dict)
    }

    #[getter]
    fn snapshots<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        report(py, &self.inner.snapshots)
    }

    #[getter]
    fn monitor<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        report(py, &self.inner.monitor)
    }

    #[getter]
    fn final_g(&self) -> f64 {
        self.inner.final_state.g
    }

    #[getter]
    fn final_h(&self) -> f64 {
        self.inner.final_state.h
    }

    fn outcome<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        report(
            py,
            &classify_outcome(&self.inner, &self.inner.params, &DetectConfig::default()),
        )
    }

    fn speeds<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        report(py, &measure_speeds(&self.inner).map_err(py_err)?)
    }
}

/// Runs the coupled system from cosine initial data.
#[pyfunction]
#[pyo3(signature = (params, prey_amplitude = 1.0, predator_amplitude = 1.0, ny = 400, nxi = 400, t_max = 50.0, record_interval = 0.1, snapshot_interval = None))]
#[allow(clippy::too_many_arguments)]
fn simulate(
    py: Python<'_>,
    params: PyModelParams,
    prey_amplitude: f64,
    predator_amplitude: f64,
    ny: usize,
    nxi: usize,
    t_max: f64,
    record_interval: f64,
    snapshot_interval: Option<f64>,
) -> PyResult<PyTrajectory> {
    let p = params.inner;
    let (u0, v0) = profiles(&p, prey_amplitude, predator_amplitude)?;
    let cfg = SolverConfig {
        ny,
        nxi,
        t_max,
        record_interval,
        snapshot_interval,
        ..SolverConfig::default()
    };
    let inner = py.detach(|| fbm::simulate(&p, &u0, &v0, &cfg)).map_err(py_err)?;
    Ok(PyTrajectory { inner })
}

/// Semi-wave speed `k(nu, d, theta)`.
#[pyfunction]
#[pyo3(signature = (nu, d = 1.0, theta = 1.0))]
fn kappa(nu: f64, d: f64, theta: f64) -> PyResult<f64> {
    semiwave::kappa(nu, d, theta).map_err(py_err)
}

/// Semi-wave speed with its profile as `(y, q)` pairs.
#[pyfunction]
#[pyo3(signature = (nu, d = 1.0, theta = 1.0, tol = semiwave::DEFAULT_TOL))]
fn semiwave_profile<'py>(py: Python<'py>, nu: f64, d: f64, theta: f64, tol: f64) -> PyResult<Bound<'py, PyDict>> {
    let wave = semiwave::solve_semiwave(nu, d, theta, tol).map_err(py_err)?;
    let dict = PyDict::new(py);
    dict.set_item("k", wave.k)?;
    dict.set_item("slope_at_origin", wave.slope_at_origin)?;
    dict.set_item("profile", wave.profile)?;
    Ok(dict)
}

/// Critical Stefan coefficient of the scalar problem with cosine data.
#[pyfunction]
#[pyo3(signature = (rho0, d = 1.0, theta = 1.0, amplitude = 0.5, tol = 1e-3))]
fn critical_gamma<'py>(
    py: Python<'py>,
    rho0: f64,
    d: f64,
    theta: f64,
    amplitude: f64,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let z0 = InitialProfile::cosine(rho0, amplitude).map_err(py_err)?;
    let opts = thresholds::ThresholdOptions {
        tol,
        ..Default::default()
    };
    let t = py
        .detach(|| thresholds::critical_gamma(d, theta, rho0, &z0, &opts))
        .map_err(py_err)?;
    report(py, &t)
}

/// Evaluates the sufficient spreading/vanishing criteria.
#[pyfunction]
#[pyo3(signature = (params, prey_amplitude = 1.0, predator_amplitude = 1.0))]
fn check_criteria<'py>(
    py: Python<'py>,
    params: PyModelParams,
    prey_amplitude: f64,
    predator_amplitude: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let p = params.inner;
    let (u0, v0) = profiles(&p, prey_amplitude, predator_amplitude)?;
    let opts = thresholds::ThresholdOptions::default();
    let r = py
        .detach(|| thresholds::check_criteria(&p, &u0, &v0, &opts))
        .map_err(py_err)?;
    report(py, &r)
}

/// Runs a TOML configuration and writes its run directory to `out`.
#[pyfunction]
fn run_config<'py>(py: Python<'py>, path: PathBuf, out: PathBuf) -> PyResult<Bound<'py, PyAny>> {
    let summary = py
        .detach(|| load_run(&path).and_then(|run| run_simulation(&run, &out)))
        .map_err(py_err)?;
    report(py, &summary)
}

#[pymodule]
fn fronts_lv(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModelParams>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(kappa, m)?)?;
    m.add_function(wrap_pyfunction!(semiwave_profile, m)?)?;
    m.add_function(wrap_pyfunction!(critical_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(check_criteria, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    Ok(())
}
