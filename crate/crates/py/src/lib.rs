//! Python bindings for `scpi-core`.

use num_bigint::BigInt;
use pyo3::exceptions::{PyArithmeticError, PyRuntimeError, PyValueError, PyZeroDivisionError};
use pyo3::prelude::*;
use pyo3::pyclass::CompareOp;

use scpi_core::corrector::{self, Checkpoint, TruncationPolicy};
use scpi_core::{dynamics, selftest as core_selftest, series, verifier, Error, Precision};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::DivisionByZero => PyZeroDivisionError::new_err(e.to_string()),
        Error::Parse(_)
        | Error::ArgumentOutOfRange(_)
        | Error::InvalidCheckpoint(_)
        | Error::SplitOutOfRange { .. } => PyValueError::new_err(e.to_string()),
        Error::NonConvergence { .. } => PyArithmeticError::new_err(e.to_string()),
        Error::InsufficientAccuracy { .. } | Error::ClassificationMismatch { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
    }
}

fn policy(name: &str) -> PyResult<TruncationPolicy> {
    name.parse().map_err(to_py)
}

fn precision(bits: u64) -> PyResult<Precision> {
    if bits == 0 {
        return Err(PyValueError::new_err("bits must be positive"));
    }
    Ok(Precision::new(bits))
}

/// Binary fixed-point number `mantissa · 2^-scale`.
#[pyclass(name = "FixedReal", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyFixedReal(scpi_core::FixedReal);

impl From<scpi_core::FixedReal> for PyFixedReal {
    fn from(x: scpi_core::FixedReal) -> Self {
        PyFixedReal(x)
    }
}

#[pymethods]
impl PyFixedReal {
    #[new]
    fn new(mantissa: BigInt, scale: u64) -> Self {
        scpi_core::FixedReal::new(mantissa, scale).into()
    }

    /// Parses a decimal at `bits` fractional bits (plus guard).
    #[staticmethod]
    fn from_decimal(s: &str, bits: u64) -> PyResult<Self> {
        scpi_core::FixedReal::from_decimal(s, precision(bits)?)
            .map(Into::into)
            .map_err(to_py)
    }

    #[getter]
    fn mantissa(&self) -> BigInt {
        self.0.mantissa().clone()
    }

    #[getter]
    fn scale(&self) -> u64 {
        self.0.scale()
    }

    /// Truncated to `digits` decimals.
    fn to_decimal(&self, digits: usize) -> String {
        self.0.to_decimal(digits)
    }

    fn log2_abs(&self) -> f64 {
        self.0.log2_abs()
    }

    fn mul(&self, other: &Self, bits: u64) -> PyResult<Self> {
        Ok(self.0.mul(&other.0, precision(bits)?).into())
    }

    fn div(&self, other: &Self, bits: u64) -> PyResult<Self> {
        self.0
            .div(&other.0, precision(bits)?)
            .map(Into::into)
            .map_err(to_py)
    }

    fn __add__(&self, other: &Self) -> Self {
        (&self.0 + &other.0).into()
    }

    fn __sub__(&self, other: &Self) -> Self {
        (&self.0 - &other.0).into()
    }

    fn __neg__(&self) -> Self {
        (-&self.0).into()
    }

    fn __abs__(&self) -> Self {
        self.0.abs().into()
    }

    fn __float__(&self) -> f64 {
        self.0.to_f64()
    }

    fn __richcmp__(&self, other: &Self, op: CompareOp) -> bool {
        op.matches(self.0.cmp(&other.0))
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("FixedReal({}, {})", self.0.mantissa(), self.0.scale())
    }
}

#[pyclass(name = "LadderStep", frozen)]
struct PyLadderStep(corrector::LadderStep);

#[pymethods]
impl PyLadderStep {
    #[getter]
    fn k(&self) -> u32 {
        self.0.k
    }

    #[getter]
    fn bits(&self) -> u64 {
        self.0.precision.bits()
    }

    #[getter]
    fn alpha_in(&self) -> PyFixedReal {
        self.0.alpha_in.clone().into()
    }

    #[getter]
    fn alpha_out(&self) -> PyFixedReal {
        self.0.alpha_out.clone().into()
    }

    #[getter]
    fn eps_bound(&self) -> PyFixedReal {
        self.0.eps_bound.clone().into()
    }

    #[getter]
    fn wall_ms(&self) -> f64 {
        self.0.wall_time.as_secs_f64() * 1e3
    }

    #[getter]
    fn proven_bits(&self) -> u64 {
        self.0.proven_bits()
    }

    fn __repr__(&self) -> String {
        format!(
            "LadderStep(k={}, bits={})",
            self.0.k,
            self.0.precision.bits()
        )
    }
}

#[pyclass(name = "Ladder", frozen)]
struct PyLadder(corrector::Ladder);

#[pymethods]
impl PyLadder {
    #[getter]
    fn alpha(&self) -> PyFixedReal {
        self.0.alpha.clone().into()
    }

    #[getter]
    fn eps_bound(&self) -> PyFixedReal {
        self.0.eps_bound.clone().into()
    }

    #[getter]
    fn proven_bits(&self) -> u64 {
        self.0.proven_bits()
    }

    #[getter]
    fn steps(&self) -> Vec<PyLadderStep> {
        self.0.steps.iter().cloned().map(PyLadderStep).collect()
    }

    fn trace_csv(&self) -> String {
        self.0.trace_csv()
    }

    /// Checkpoint in its text form.
    fn checkpoint(&self) -> String {
        self.0.checkpoint().to_text()
    }
}

#[pyclass(name = "VerifyReport", frozen)]
struct PyVerifyReport(verifier::VerifyReport);

#[pymethods]
impl PyVerifyReport {
    #[getter]
    fn n_digits(&self) -> usize {
        self.0.n_digits
    }

    #[getter]
    fn m(&self) -> usize {
        self.0.m
    }

    #[getter]
    fn alpha_h(&self) -> PyFixedReal {
        self.0.alpha_h.clone().into()
    }

    #[getter]
    fn recomputed(&self) -> PyFixedReal {
        self.0.recomputed.clone().into()
    }

    #[getter]
    fn verified_prefix(&self) -> usize {
        self.0.verified_prefix
    }

    #[getter]
    fn first_mismatch(&self) -> Option<usize> {
        self.0.first_mismatch
    }

    /// `"accept"`, `"reject"` or `"inconclusive"`.
    #[getter]
    fn verdict(&self) -> String {
        self.0.verdict.to_string()
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    fn __repr__(&self) -> String {
        format!(
            "VerifyReport(verdict={}, verified_prefix={})",
            self.0.verdict, self.0.verified_prefix
        )
    }
}

#[pyclass(name = "Orbit", frozen)]
struct PyOrbit(dynamics::Orbit);

#[pymethods]
impl PyOrbit {
    /// `(k, a_k, sin a_k)` for every iterate.
    #[getter]
    fn records(&self) -> Vec<(usize, PyFixedReal, PyFixedReal)> {
        self.0
            .records
            .iter()
            .map(|r| (r.k, r.a_k.clone().into(), r.step.clone().into()))
            .collect()
    }

    #[getter]
    fn final_value(&self) -> PyFixedReal {
        self.0.last().a_k.clone().into()
    }

    #[getter]
    fn n(&self) -> i64 {
        self.0.class.n
    }

    #[getter]
    fn odd_multiple(&self) -> i64 {
        self.0.class.odd_multiple
    }

    #[getter]
    fn degenerate(&self) -> bool {
        self.0.class.degenerate
    }

    #[getter]
    fn near_degenerate(&self) -> bool {
        self.0.near_degenerate
    }

    fn to_csv(&self) -> String {
        self.0.to_csv()
    }

    fn __repr__(&self) -> String {
        format!(
            "Orbit(iterations={}, odd_multiple={})",
            self.0.records.len(),
            self.0.class.odd_multiple
        )
    }
}

/// First `digits` decimals of π from the ladder.
#[pyfunction]
#[pyo3(signature = (digits, policy = "third"))]
fn pi_digits(py: Python<'_>, digits: usize, policy: &str) -> PyResult<String> {
    let policy = self::policy(policy)?;
    Ok(py.detach(|| corrector::compute_digits(digits, policy).0))
}

#[pyfunction]
fn sin_full(x: &PyFixedReal, bits: u64) -> PyResult<PyFixedReal> {
    series::sin_full(&x.0, precision(bits)?)
        .map(Into::into)
        .map_err(to_py)
}

/// `alpha + sin(alpha)` at `bits` bits.
#[pyfunction]
fn correct_step(alpha: &PyFixedReal, bits: u64) -> PyResult<PyFixedReal> {
    corrector::correct_step(&alpha.0, precision(bits)?)
        .map(Into::into)
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (n_bits, policy = "third"))]
fn run_ladder(py: Python<'_>, n_bits: u64, policy: &str) -> PyResult<PyLadder> {
    if n_bits == 0 {
        return Err(PyValueError::new_err("n_bits must be positive"));
    }
    let policy = self::policy(policy)?;
    Ok(PyLadder(
        py.detach(|| corrector::run_ladder(n_bits, policy)),
    ))
}

/// Continues a ladder from checkpoint text.
#[pyfunction]
#[pyo3(signature = (checkpoint, n_bits, policy = "third"))]
fn resume(py: Python<'_>, checkpoint: &str, n_bits: u64, policy: &str) -> PyResult<PyLadder> {
    let cp = Checkpoint::parse(checkpoint).map_err(to_py)?;
    let policy = self::policy(policy)?;
    py.detach(|| corrector::resume(&cp, n_bits, policy))
        .map(PyLadder)
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (digits, m = None))]
fn verify_digits(py: Python<'_>, digits: &str, m: Option<usize>) -> PyResult<PyVerifyReport> {
    py.detach(|| verifier::verify_digits(digits, m))
        .map(PyVerifyReport)
        .map_err(to_py)
}

/// Starts may be decimals or multiples of π (`"7"`, `"2pi"`).
#[pyfunction]
#[pyo3(signature = (a0, tol_bits = dynamics::DEFAULT_TOL_BITS, max_iter = dynamics::DEFAULT_MAX_ITER))]
fn iterate_orbit(py: Python<'_>, a0: &str, tol_bits: u64, max_iter: usize) -> PyResult<PyOrbit> {
    let p = precision(tol_bits + 32)?;
    let start = dynamics::parse_start(a0, p).map_err(to_py)?;
    py.detach(|| dynamics::iterate_orbit(&start, p, max_iter, tol_bits))
        .map(PyOrbit)
        .map_err(to_py)
}

/// π by Machin's formula, within `2^-bits`.
#[pyfunction]
fn pi_oracle(py: Python<'_>, bits: u64) -> PyResult<PyFixedReal> {
    let p = precision(bits)?;
    Ok(py.detach(|| series::pi_oracle(p)).into())
}

/// `(name, passed, detail)` for every built-in check.
#[pyfunction]
fn selftest(py: Python<'_>) -> Vec<(String, bool, String)> {
    py.detach(core_selftest::run)
        .into_iter()
        .map(|c| (c.name, c.passed, c.detail))
        .collect()
}

#[pymodule]
fn scpi(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFixedReal>()?;
    m.add_class::<PyLadderStep>()?;
    m.add_class::<PyLadder>()?;
    m.add_class::<PyVerifyReport>()?;
    m.add_class::<PyOrbit>()?;
    m.add_function(wrap_pyfunction!(pi_digits, m)?)?;
    m.add_function(wrap_pyfunction!(sin_full, m)?)?;
    m.add_function(wrap_pyfunction!(correct_step, m)?)?;
    m.add_function(wrap_pyfunction!(run_ladder, m)?)?;
    m.add_function(wrap_pyfunction!(resume, m)?)?;
    m.add_function(wrap_pyfunction!(verify_digits, m)?)?;
    m.add_function(wrap_pyfunction!(iterate_orbit, m)?)?;
    m.add_function(wrap_pyfunction!(pi_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(selftest, m)?)?;
    Ok(())
}
