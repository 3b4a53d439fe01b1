//! Python bindings. Matrices cross the boundary as nested lists of rows of
//! Python `complex` (or `float`) values; reports and certificates come back
//! as plain dicts.

use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::Serialize;

use grassmann_core::grassmann as g;
use grassmann_core::lab;
use grassmann_core::maps::GrassmannMap;
use grassmann_core::numerics::{CMatrix, Tolerance, C64};
use grassmann_core::sampling::{Conjugation, Seed};

fn err(e: grassmann_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_matrix(rows: Vec<Vec<C64>>) -> PyResult<CMatrix> {
    CMatrix::from_rows(&rows).map_err(err)
}

fn to_rows(m: &CMatrix) -> Vec<Vec<C64>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

fn tolerance(eps_angle: Option<f64>, eps_rank: Option<f64>) -> PyResult<Tolerance> {
    let mut tol = Tolerance::default();
    if let Some(e) = eps_angle {
        tol = tol.with_eps_angle(e).map_err(err)?;
    }
    if let Some(e) = eps_rank {
        tol = tol.with_eps_rank(e).map_err(err)?;
    }
    Ok(tol)
}

/// Serialize through JSON and hand back a Python object.
fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A subspace of C^d held as an orthonormal basis.
#[pyclass(name = "Subspace", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySubspace(g::Subspace);

#[pymethods]
impl PySubspace {
    /// Span of the columns of `rows` (a d x k nested list).
    #[new]
    #[pyo3(signature = (rows, eps_rank=None))]
    fn new(rows: Vec<Vec<C64>>, eps_rank: Option<f64>) -> PyResult<Self> {
        let tol = tolerance(None, eps_rank)?;
        g::Subspace::span(&to_matrix(rows)?, &tol).map(Self).map_err(err)
    }

    #[staticmethod]
    fn coordinate(d: usize, indices: Vec<usize>) -> PyResult<Self> {
        g::Subspace::coordinate(d, &indices).map(Self).map_err(err)
    }

    #[staticmethod]
    fn random(d: usize, n: usize, seed: u64) -> PyResult<Self> {
        Seed(seed).sampler().subspace(d, n).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(Self).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[getter]
    fn ambient_dim(&self) -> usize {
        self.0.ambient_dim()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn basis(&self) -> Vec<Vec<C64>> {
        to_rows(self.0.basis())
    }

    fn projection(&self) -> Vec<Vec<C64>> {
        to_rows(&self.0.projection_matrix())
    }

    fn complement(&self) -> PyResult<Option<Self>> {
        let tol = Tolerance::default();
        Ok(self.0.orthogonal_complement(&tol).map_err(err)?.map(Self))
    }

    fn __repr__(&self) -> String {
        format!("Subspace(dim={}, ambient_dim={})", self.0.dim(), self.0.ambient_dim())
    }
}

/// Principal angles in ascending order; ranks may differ.
#[pyfunction]
fn principal_angles(a: &PySubspace, b: &PySubspace) -> PyResult<Vec<f64>> {
    Ok(g::principal_angles_general(&a.0, &b.0).map_err(err)?.angles)
}

#[pyfunction]
fn min_angle(a: &PySubspace, b: &PySubspace) -> PyResult<f64> {
    g::min_angle_subspaces(&a.0, &b.0).map_err(err)
}

#[pyfunction]
fn gap(a: &PySubspace, b: &PySubspace) -> PyResult<f64> {
    g::gap_distance_subspaces(&a.0, &b.0).map_err(err)
}

/// tr(PQ) of the two orthogonal projections.
#[pyfunction]
fn trace_product(a: &PySubspace, b: &PySubspace) -> PyResult<f64> {
    g::trace_product_subspaces(&a.0, &b.0).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (a, b, eps_angle=None))]
fn intersection(a: &PySubspace, b: &PySubspace, eps_angle: Option<f64>) -> PyResult<Option<PySubspace>> {
    let tol = tolerance(eps_angle, None)?;
    Ok(g::intersection(&a.0, &b.0, &tol).map_err(err)?.map(PySubspace))
}

/// Haar-random unitary as nested rows, plus whether it acts antilinearly.
#[pyfunction]
#[pyo3(signature = (d, seed, conjugate=false))]
fn random_unitary(d: usize, seed: u64, conjugate: bool) -> PyResult<(Vec<Vec<C64>>, bool)> {
    let flag = if conjugate { Conjugation::Conjugate } else { Conjugation::Linear };
    let u = Seed(seed).sampler().unitary(d, flag).map_err(err)?;
    Ok((to_rows(u.matrix()), u.is_conjugate()))
}

/// Build `S -> U S` (or `S -> (U S)^perp` with `complement=True`) from a
/// random unitary and recover the isometry from the map's values alone.
#[pyfunction]
#[pyo3(signature = (d, n, seed, conjugate=false, complement=false, trials=20))]
fn recover_random_preserver<'py>(
    py: Python<'py>,
    d: usize,
    n: usize,
    seed: u64,
    conjugate: bool,
    complement: bool,
    trials: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let flag = if conjugate { Conjugation::Conjugate } else { Conjugation::Linear };
    let u = Seed(seed).sampler().unitary(d, flag).map_err(err)?;
    let phi = if complement {
        GrassmannMap::complement_standard(u, n)
    } else {
        GrassmannMap::standard(u, n)
    }
    .map_err(err)?;
    let r = lab::verify_preserver(&phi, trials, Seed(seed).derive(1), &Tolerance::default()).map_err(err)?;
    to_py(py, &r)
}

/// Run a named property suite and return its report as a dict.
#[pyfunction]
#[pyo3(signature = (name, seed=0, trials=None, d=None, n=None, n_blocks=2))]
fn run_suite<'py>(
    py: Python<'py>,
    name: &str,
    seed: u64,
    trials: Option<usize>,
    d: Option<usize>,
    n: Option<usize>,
    n_blocks: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let suite = lab::Suite::from_name(name).ok_or_else(|| PyKeyError::new_err(format!("unknown suite {name:?}")))?;
    let mut cfg = lab::SuiteConfig::new(Seed(seed), trials.unwrap_or(suite.default_trials())).with_dims(d, n);
    cfg.n_blocks = n_blocks;
    to_py(py, &lab::run_suite(suite, &cfg).map_err(err)?)
}

/// Build and validate a certificate: "two_by_two", "complement_cert" or "degenerate".
#[pyfunction]
#[pyo3(signature = (name, n=2, d=None, seed=0, samples=1000))]
fn certificate<'py>(
    py: Python<'py>,
    name: &str,
    n: usize,
    d: Option<usize>,
    seed: u64,
    samples: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let tol = Tolerance::default();
    let cert = match name {
        "two_by_two" => lab::certificate_two_by_two(),
        "complement_cert" => lab::certificate_complement_not_standard(n),
        "degenerate" => lab::certificate_degenerate_regime(n, d.unwrap_or(n + 1), Seed(seed), samples, &tol),
        other => return Err(PyKeyError::new_err(format!("unknown certificate {other:?}"))),
    }
    .map_err(err)?;
    let valid = cert.validate(&tol).is_ok();
    let out = to_py(py, &cert)?;
    let dict = PyDict::new(py);
    dict.set_item("valid", valid)?;
    dict.set_item("certificate", out)?;
    Ok(dict.into_any())
}

#[pymodule]
fn grassmann(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySubspace>()?;
    m.add_function(wrap_pyfunction!(principal_angles, m)?)?;
    m.add_function(wrap_pyfunction!(min_angle, m)?)?;
    m.add_function(wrap_pyfunction!(gap, m)?)?;
    m.add_function(wrap_pyfunction!(trace_product, m)?)?;
    m.add_function(wrap_pyfunction!(intersection, m)?)?;
    m.add_function(wrap_pyfunction!(random_unitary, m)?)?;
    m.add_function(wrap_pyfunction!(recover_random_preserver, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    m.add_function(wrap_pyfunction!(certificate, m)?)?;
    Ok(())
}
