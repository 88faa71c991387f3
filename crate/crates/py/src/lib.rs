//! Python bindings. Matrices cross the boundary as lists of rows of ints.

use pir::analysis;
use pir::attack;
use pir::chaincode;
use pir::fixtures;
use pir::linalg::Matrix;
use pir::pir as proto;
use pir::pir_io::{MatrixFile, ParamsFile, SecretsFile};
use pir::zmod::Modulus;
use pir::PirError;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

type Rows = Vec<Vec<u64>>;

fn py_err(e: PirError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rng(seed: Option<u64>) -> ChaCha20Rng {
    seed.map_or_else(ChaCha20Rng::from_entropy, ChaCha20Rng::seed_from_u64)
}

fn to_matrix(rows: &Rows) -> PyResult<Matrix> {
    let cols = rows.first().map_or(0, Vec::len);
    Matrix::from_rows(rows, cols).map_err(py_err)
}

fn modulus(factors: &str) -> PyResult<Modulus> {
    Modulus::parse_factors(factors).map_err(py_err)
}

/// Secret client parameters: inner code, outer code and database shape.
#[pyclass(name = "Params", module = "ringpir")]
struct PyParams {
    inner: proto::PirParams,
}

#[pymethods]
impl PyParams {
    /// Random compliant instance.
    #[staticmethod]
    #[pyo3(signature = (m_factors, n, s, r, t, l, seed=None, attempts=proto::DEFAULT_SETUP_ATTEMPTS))]
    #[allow(clippy::too_many_arguments)]
    fn setup(m_factors: &str, n: usize, s: usize, r: usize, t: usize, l: usize, seed: Option<u64>, attempts: usize) -> PyResult<Self> {
        let shape = proto::Shape { t, l, r };
        let inner = proto::setup_random(&modulus(m_factors)?, n, s, shape, attempts, &mut rng(seed)).map_err(py_err)?;
        Ok(PyParams { inner })
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let inner = ParamsFile::parse(text).and_then(|f| f.to_params()).map_err(py_err)?;
        Ok(PyParams { inner })
    }

    /// The worked example with m = 15, n = 13.
    #[staticmethod]
    fn toy() -> PyResult<Self> {
        Ok(PyParams { inner: fixtures::params().map_err(py_err)? })
    }

    fn serialize(&self) -> String {
        ParamsFile::from_params(&self.inner).serialize()
    }

    fn public(&self) -> String {
        ParamsFile::from_params(&self.inner).public().serialize()
    }

    #[getter]
    fn m(&self) -> u64 {
        self.inner.modulus().m()
    }

    #[getter]
    fn m_prime(&self) -> u64 {
        self.inner.modulus().m_prime()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn s(&self) -> usize {
        self.inner.s()
    }

    /// `(t, L, r)`.
    #[getter]
    fn shape(&self) -> (usize, usize, usize) {
        let sh = self.inner.shape();
        (sh.t, sh.l, sh.r)
    }

    #[getter]
    fn compliant(&self) -> bool {
        self.inner.report().overall
    }

    fn failures(&self) -> Vec<String> {
        self.inner.report().failures()
    }

    /// Returns `(query_rows, secrets)` for file `d`.
    #[pyo3(signature = (d, seed=None))]
    fn query(&self, d: usize, seed: Option<u64>) -> PyResult<(Rows, PySecrets)> {
        let mut rng = rng(seed);
        let (q, secrets) = proto::gen_query(&self.inner, d, &mut proto::RngRandomness(&mut rng)).map_err(py_err)?;
        Ok((q.to_rows(), PySecrets { inner: SecretsFile::new(self.inner.n(), self.inner.modulus().m(), secrets) }))
    }

    /// The toy query built from the published random values.
    fn toy_query(&self) -> PyResult<(Rows, PySecrets)> {
        let (q, secrets) = proto::gen_query(&self.inner, fixtures::DESIRED, &mut fixtures::stream()).map_err(py_err)?;
        Ok((q.to_rows(), PySecrets { inner: SecretsFile::new(self.inner.n(), self.inner.modulus().m(), secrets) }))
    }

    fn recover(&self, secrets: &PySecrets, response: Rows) -> PyResult<Rows> {
        let r = to_matrix(&response)?;
        Ok(proto::recover(&self.inner, &secrets.inner.secrets, &r).map_err(py_err)?.to_rows())
    }

    fn __repr__(&self) -> String {
        let (t, l, r) = self.shape();
        format!("Params(m={}, n={}, s={}, t={t}, L={l}, r={r})", self.m(), self.n(), self.s())
    }
}

/// Per-query client state.
#[pyclass(name = "Secrets", module = "ringpir")]
struct PySecrets {
    inner: SecretsFile,
}

#[pymethods]
impl PySecrets {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PySecrets { inner: SecretsFile::parse(text).map_err(py_err)? })
    }

    fn serialize(&self) -> String {
        self.inner.serialize()
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.secrets.d
    }

    #[getter]
    fn gamma(&self) -> usize {
        self.inner.secrets.gamma
    }
}

/// Server data: `L x (t r)` over `Z_{m'}`.
#[pyclass(name = "Database", module = "ringpir")]
struct PyDatabase {
    inner: proto::Database,
}

#[pymethods]
impl PyDatabase {
    #[new]
    fn new(rows: Rows, t: usize, r: usize, m_prime: u64) -> PyResult<Self> {
        let inner = proto::Database::new(to_matrix(&rows)?, t, r, m_prime).map_err(py_err)?;
        Ok(PyDatabase { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (t, l, r, m_prime, seed=None))]
    fn random(t: usize, l: usize, r: usize, m_prime: u64, seed: Option<u64>) -> Self {
        PyDatabase { inner: proto::Database::random(proto::Shape { t, l, r }, m_prime, &mut rng(seed)) }
    }

    fn rows(&self) -> Rows {
        self.inner.entries().to_rows()
    }

    fn file(&self, d: usize) -> PyResult<Rows> {
        Ok(self.inner.file(d).map_err(py_err)?.to_rows())
    }

    /// `DB · Q` over `Z_m`.
    fn respond(&self, query: Rows, m: u64) -> PyResult<Rows> {
        Ok(proto::server_respond(&self.inner, &to_matrix(&query)?, m).map_err(py_err)?.to_rows())
    }
}

/// Rate figures as a dict; fractions are `(numerator, denominator)` or `None`.
#[pyfunction]
#[pyo3(signature = (m_factors, n, s, r, t=1, l=None))]
fn rate<'py>(py: Python<'py>, m_factors: &str, n: usize, s: usize, r: usize, t: usize, l: Option<usize>) -> PyResult<Bound<'py, PyDict>> {
    let rep = analysis::pir_rate(&modulus(m_factors)?, n, s, r, t, l).map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("rate", rep.exact_rate.map(|f| (*f.numer(), *f.denom())))?;
    out.set_item("rate_float", rep.exact_rate_f64)?;
    out.set_item("approx_rate", rep.approx_rate_exact.map(|f| (*f.numer(), *f.denom())))?;
    out.set_item("approx_rate_float", rep.approx_rate)?;
    out.set_item("upload_bits", rep.upload_bits)?;
    out.set_item("download_bits", rep.download_bits)?;
    out.set_item("file_bits", rep.file_bits)?;
    Ok(out)
}

/// `(log2 per code, log2 total, [(p, T_p), ...])`.
#[pyfunction]
fn work_factor(m_factors: &str, n: usize, s: usize) -> PyResult<(u64, u64, Vec<(u64, usize)>)> {
    let w = analysis::work_factor(&modulus(m_factors)?, n, s).map_err(py_err)?;
    Ok((w.log2_per_code(), w.log2_total(), w.cosets.clone()))
}

#[pyfunction]
fn cyclotomic_coset_count(n: usize, q: u64) -> PyResult<usize> {
    Ok(chaincode::cyclotomic_cosets(n, q).map_err(py_err)?.count())
}

/// Row-deletion scan: dict with `drops`, `identical` and `distinguished` (1-based or `None`).
#[pyfunction]
fn scan<'py>(py: Python<'py>, query: Rows, m_factors: &str, rows_per_file: usize) -> PyResult<Bound<'py, PyDict>> {
    let report = attack::row_deletion_scan(&to_matrix(&query)?, &modulus(m_factors)?, rows_per_file).map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("drops", report.drops.clone())?;
    out.set_item("identical", report.identical())?;
    out.set_item("distinguished", report.distinguished())?;
    out.set_item("full_bits", report.full.bits())?;
    Ok(out)
}

#[pyfunction]
fn encode_matrix<'py>(py: Python<'py>, rows: Rows, modulus: u64) -> PyResult<Bound<'py, PyBytes>> {
    let file = MatrixFile::new(to_matrix(&rows)?, modulus).map_err(py_err)?;
    Ok(PyBytes::new(py, &file.to_bytes()))
}

/// Returns `(rows, modulus)`.
#[pyfunction]
fn decode_matrix(data: &[u8]) -> PyResult<(Rows, u64)> {
    let file = MatrixFile::from_bytes(data).map_err(py_err)?;
    Ok((file.matrix.to_rows(), file.modulus))
}

#[pymodule]
fn ringpir(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyParams>()?;
    m.add_class::<PySecrets>()?;
    m.add_class::<PyDatabase>()?;
    m.add_function(wrap_pyfunction!(rate, m)?)?;
    m.add_function(wrap_pyfunction!(work_factor, m)?)?;
    m.add_function(wrap_pyfunction!(cyclotomic_coset_count, m)?)?;
    m.add_function(wrap_pyfunction!(scan, m)?)?;
    m.add_function(wrap_pyfunction!(encode_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(decode_matrix, m)?)?;
    Ok(())
}
