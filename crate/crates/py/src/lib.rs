//! Python bindings for the `blockade` library.
//!
//! Closed forms take plain floats; sweeps take a TOML document and return
//! columns as Python lists.

use std::path::{Path, PathBuf};

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use blockade::analytic;
use blockade::atlas::{self, Suite, SweepConfig};
use blockade::fockspace::{JcParams, ModeSelector, PolParams};
use blockade::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Config(_) | Error::Domain(_) | Error::InvalidParameter { .. } => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn selector(mode: &str) -> PyResult<ModeSelector> {
    match mode {
        "cavity" => Ok(ModeSelector::Cavity),
        "matter" => Ok(ModeSelector::Matter),
        other => Err(PyValueError::new_err(format!("mode must be `cavity` or `matter`, got `{other}`"))),
    }
}

/// Vanishing-drive cavity `g2` of the Jaynes–Cummings model.
#[pyfunction]
#[pyo3(signature = (delta_a, delta_s, g, gamma_a, gamma_s, chi = 0.0, phi = 0.0))]
fn jc_g2(delta_a: f64, delta_s: f64, g: f64, gamma_a: f64, gamma_s: f64, chi: f64, phi: f64) -> PyResult<f64> {
    let p = JcParams { delta_a, delta_s, g, omega_a: 1e-4 * gamma_a.min(gamma_s), chi, phi, gamma_a, gamma_s };
    analytic::jc_g2(&p).map_err(py_err)
}

/// Vanishing-drive `g2` of the cavity or exciton of the polariton model.
#[pyfunction]
#[pyo3(signature = (delta_a, delta_b, g, u, gamma_a, gamma_b, chi = 0.0, phi = 0.0, mode = "cavity"))]
#[allow(clippy::too_many_arguments)]
fn pol_g2(
    delta_a: f64,
    delta_b: f64,
    g: f64,
    u: f64,
    gamma_a: f64,
    gamma_b: f64,
    chi: f64,
    phi: f64,
    mode: &str,
) -> PyResult<f64> {
    let p = PolParams { delta_a, delta_b, g, u, omega_a: 1e-4 * gamma_a.min(gamma_b), chi, phi, gamma_a, gamma_b };
    analytic::pol_g2(&p, selector(mode)?).map_err(py_err)
}

/// Population and `g^(N)` of resonance fluorescence mixed with a laser of
/// relative amplitude `f` and phase `phi`.
#[pyfunction]
#[pyo3(signature = (n, f, phi, omega, gamma, delta, t = 1.0))]
fn rf_homodyne_gn(n: u32, f: f64, phi: f64, omega: f64, gamma: f64, delta: f64, t: f64) -> PyResult<(f64, f64)> {
    let r = analytic::rf_homodyne_gn(n, f, phi, omega, gamma, delta, t).map_err(py_err)?;
    Ok((r.n_s, r.g))
}

/// Laser corrections `(F, φ)` that cancel `g2` of the anharmonic oscillator.
#[pyfunction]
fn ao_g2_zeros(u: f64, gamma: f64, delta: f64) -> PyResult<Vec<(f64, f64)>> {
    analytic::ao_g2_zeros(u, gamma, delta).map_err(py_err)
}

/// Smallest `g2` of a coherent state mixed with a squeezed vacuum of squeezing `r`.
#[pyfunction]
fn minimal_dst_g2(r: f64) -> PyResult<f64> {
    blockade::mixer::minimal_dst_g2(r).map_err(py_err)
}

/// Runs the sweep described by a TOML document.
///
/// Returns a dict with `columns`, `shape`, `coords`, `values`, `status` and
/// `detail`, one entry per cell in row-major order.
#[pyfunction]
fn sweep<'py>(py: Python<'py>, config: &str) -> PyResult<Bound<'py, PyDict>> {
    let cfg = SweepConfig::from_toml_str(config).map_err(py_err)?;
    let result = py.detach(|| atlas::run_sweep(&cfg)).map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("columns", atlas::sweep_columns(&cfg))?;
    out.set_item("shape", result.shape.clone())?;
    out.set_item("coords", result.cells.iter().map(|c| c.coords.clone()).collect::<Vec<_>>())?;
    out.set_item("values", result.cells.iter().map(|c| c.values.clone()).collect::<Vec<_>>())?;
    out.set_item("status", result.cells.iter().map(|c| c.status.name()).collect::<Vec<_>>())?;
    out.set_item("detail", result.cells.iter().map(|c| c.detail.clone()).collect::<Vec<_>>())?;
    Ok(out)
}

/// Runs the sweep of a config file and writes `<name>.csv` and
/// `<name>.meta.json`, returning both paths.
#[pyfunction]
#[pyo3(signature = (path, output_dir = None))]
fn write_sweep(py: Python<'_>, path: PathBuf, output_dir: Option<PathBuf>) -> PyResult<(PathBuf, PathBuf)> {
    let mut cfg = SweepConfig::load(Path::new(&path)).map_err(py_err)?;
    if let Some(dir) = output_dir {
        cfg.output_dir = dir;
    }
    let written = py
        .detach(|| atlas::run_sweep(&cfg).and_then(|r| atlas::write_sweep(&r, &cfg.output_dir)))
        .map_err(py_err)?;
    Ok((written.csv, written.meta))
}

/// Runs a verification suite and returns its JSON report.
#[pyfunction]
#[pyo3(signature = (suite, seed = 0, tol = None))]
fn verify(py: Python<'_>, suite: &str, seed: u64, tol: Option<f64>) -> PyResult<String> {
    let suite: Suite = suite.parse().map_err(py_err)?;
    let report = py.detach(|| atlas::verify(suite, seed, tol));
    serde_json::to_string(&report).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

#[pymodule(name = "blockade")]
fn blockade_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", atlas::VERSION)?;
    m.add_function(wrap_pyfunction!(jc_g2, m)?)?;
    m.add_function(wrap_pyfunction!(pol_g2, m)?)?;
    m.add_function(wrap_pyfunction!(rf_homodyne_gn, m)?)?;
    m.add_function(wrap_pyfunction!(ao_g2_zeros, m)?)?;
    m.add_function(wrap_pyfunction!(minimal_dst_g2, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(write_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
