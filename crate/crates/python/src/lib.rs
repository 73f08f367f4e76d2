use std::path::PathBuf;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use heavyperm::asymstats;
use heavyperm::certify::{self, BinaryMatrix, Certificate};
use heavyperm::harness::{self, ExperimentConfig};
use heavyperm::matrixgen::{self, LogMatrix};
use heavyperm::permcore::{self, Engine, PermResult};
use heavyperm::randsrc::{self, DistSpec, SeedSpec};
use heavyperm::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Refused(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse_dist(text: &str) -> PyResult<DistSpec> {
    text.parse().map_err(to_py)
}

/// Matrix of natural-log entries; `-inf` marks a zero.
#[pyclass(name = "LogMatrix", module = "pyheavyperm")]
struct PyLogMatrix {
    inner: LogMatrix,
}

#[pymethods]
impl PyLogMatrix {
    #[staticmethod]
    #[pyo3(signature = (m, n, dist="pareto:beta=2", seed=0, trial=0))]
    fn generate(m: usize, n: usize, dist: &str, seed: u64, trial: u64) -> PyResult<Self> {
        let d = parse_dist(dist)?;
        let inner = matrixgen::generate(m, n, &d, SeedSpec::new(seed, trial)).map_err(to_py)?;
        Ok(PyLogMatrix { inner })
    }

    #[staticmethod]
    fn from_log_rows(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(PyLogMatrix { inner: LogMatrix::from_log_rows(&rows).map_err(to_py)? })
    }

    #[staticmethod]
    fn from_linear_rows(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(PyLogMatrix { inner: LogMatrix::from_linear_rows(&rows).map_err(to_py)? })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(PyLogMatrix { inner: matrixgen::load(&path).map_err(to_py)? })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        matrixgen::save(&self.inner, &path).map_err(to_py)
    }

    fn to_json(&self) -> String {
        matrixgen::to_json(&self.inner)
    }

    #[getter]
    fn rows(&self) -> usize {
        self.inner.rows()
    }

    #[getter]
    fn cols(&self) -> usize {
        self.inner.cols()
    }

    #[getter]
    fn transposed(&self) -> bool {
        self.inner.was_transposed()
    }

    fn to_log_rows(&self) -> Vec<Vec<f64>> {
        self.inner.to_log_rows()
    }

    fn scaled(&self, log_lambda: f64) -> Self {
        PyLogMatrix { inner: self.inner.scaled(log_lambda) }
    }

    fn submatrix(&self, rows: Vec<usize>, cols: Vec<usize>) -> PyResult<Self> {
        let sel = matrixgen::SubmatrixSelector::new(rows, cols).map_err(to_py)?;
        Ok(PyLogMatrix { inner: matrixgen::extract(&self.inner, &sel).map_err(to_py)? })
    }

    fn __repr__(&self) -> String {
        format!("LogMatrix({}x{})", self.inner.rows(), self.inner.cols())
    }
}

#[pyclass(name = "PermResult", module = "pyheavyperm", frozen)]
struct PyPermResult {
    inner: PermResult,
}

#[pymethods]
impl PyPermResult {
    #[getter]
    fn log_perm(&self) -> f64 {
        self.inner.log_perm.ln()
    }

    #[getter]
    fn engine(&self) -> String {
        self.inner.engine.to_string()
    }

    #[getter]
    fn est_stderr_log(&self) -> Option<f64> {
        self.inner.est_stderr_log
    }

    #[getter]
    fn work(&self) -> u64 {
        self.inner.work
    }

    fn __repr__(&self) -> String {
        format!("PermResult(log_perm={}, engine={})", self.inner.log_perm.ln(), self.inner.engine)
    }
}

#[pyclass(name = "Certificate", module = "pyheavyperm", frozen)]
struct PyCertificate {
    inner: Certificate,
}

#[pymethods]
impl PyCertificate {
    #[getter]
    fn log_bound(&self) -> f64 {
        self.inner.log_bound
    }

    #[getter]
    fn method(&self) -> String {
        self.inner.method.to_string()
    }

    #[getter]
    fn side(&self) -> &'static str {
        match self.inner.side {
            certify::Side::Lower => "lower",
            certify::Side::Upper => "upper",
        }
    }

    #[getter]
    fn witness_digest(&self) -> String {
        self.inner.witness_digest()
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("serializable")
    }

    /// Recomputes the bound from the matrix and the witness.
    fn verify(&self, a: &PyLogMatrix) -> PyResult<f64> {
        certify::verify(&a.inner, &self.inner).map_err(to_py)
    }
}

/// Permanent by the named engine; `auto` picks Ryser for square input and
/// the subset DP otherwise.
#[pyfunction]
#[pyo3(signature = (a, engine="auto", samples=10_000, seed=0))]
fn perm(a: &PyLogMatrix, engine: &str, samples: u64, seed: u64) -> PyResult<PyPermResult> {
    let inner = if engine == "auto" {
        permcore::perm_exact(&a.inner)
    } else {
        let e: Engine = engine.parse().map_err(to_py)?;
        permcore::perm_with(e, &a.inner, samples, SeedSpec::new(seed, 0))
    }
    .map_err(to_py)?;
    Ok(PyPermResult { inner })
}

#[pyfunction]
#[pyo3(signature = (a, rho=0.5, log_q=None))]
fn lower_certificate(a: &PyLogMatrix, rho: f64, log_q: Option<f64>) -> PyResult<PyCertificate> {
    let q = log_q.unwrap_or_else(|| a.inner.log_quantile(0.25));
    Ok(PyCertificate { inner: certify::lower_certificate(&a.inner, rho, q).map_err(to_py)? })
}

#[pyfunction]
#[pyo3(signature = (a, tight=true))]
fn upper_certificate(a: &PyLogMatrix, tight: bool) -> PyCertificate {
    let inner = if tight {
        certify::tight_upper_certificate(&a.inner)
    } else {
        certify::upper_certificate(&a.inner)
    };
    PyCertificate { inner }
}

type HallTuple = (bool, Option<Vec<usize>>, Option<Vec<usize>>);

/// `(saturated, matching, violating_set)` for a 0-1 matrix given as rows.
#[pyfunction]
fn hall_check(rows: Vec<Vec<u8>>) -> PyResult<HallTuple> {
    let b = BinaryMatrix::from_rows(&rows).map_err(to_py)?;
    let r = certify::hall_check(&b);
    Ok((r.saturated, r.matching, r.violating_set))
}

#[pyfunction]
fn mann_ryser_bound(rows: Vec<Vec<u8>>) -> PyResult<f64> {
    let b = BinaryMatrix::from_rows(&rows).map_err(to_py)?;
    Ok(certify::mann_ryser_bound(&b).map_err(to_py)?.ln())
}

#[pyfunction]
fn expected_z(n: u64, k: u64) -> PyResult<f64> {
    if n == 0 || k == 0 {
        return Err(PyValueError::new_err("expected_z needs n >= 1 and k >= 1"));
    }
    Ok(asymstats::expected_z(n, k))
}

#[pyfunction]
fn max_perm_sum(a: &PyLogMatrix) -> PyResult<f64> {
    asymstats::max_perm_sum(&a.inner).map_err(to_py)
}

#[pyfunction]
fn tail_exponent(dist: &str, log_t: f64) -> PyResult<f64> {
    randsrc::tail_exponent(&parse_dist(dist)?, log_t).map_err(to_py)
}

#[pyfunction]
fn height_rule(n: usize, c: f64) -> usize {
    harness::height_rule(n, c)
}

/// Runs a square or rectangular convergence experiment from a JSON config
/// and returns the CSV text.
#[pyfunction]
fn run_converge(config_json: &str) -> PyResult<String> {
    let cfg = ExperimentConfig::from_json(config_json).map_err(to_py)?;
    let report = match cfg.kind {
        harness::Kind::ConvergeRect => harness::run_converge_rect(&cfg),
        _ => harness::run_converge(&cfg),
    }
    .map_err(to_py)?;
    Ok(report.to_csv())
}

#[pymodule]
fn pyheavyperm(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLogMatrix>()?;
    m.add_class::<PyPermResult>()?;
    m.add_class::<PyCertificate>()?;
    m.add_function(wrap_pyfunction!(perm, m)?)?;
    m.add_function(wrap_pyfunction!(lower_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(upper_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(hall_check, m)?)?;
    m.add_function(wrap_pyfunction!(mann_ryser_bound, m)?)?;
    m.add_function(wrap_pyfunction!(expected_z, m)?)?;
    m.add_function(wrap_pyfunction!(max_perm_sum, m)?)?;
    m.add_function(wrap_pyfunction!(tail_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(height_rule, m)?)?;
    m.add_function(wrap_pyfunction!(run_converge, m)?)?;
    Ok(())
}
