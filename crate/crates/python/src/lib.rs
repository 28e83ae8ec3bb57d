//! Python bindings for the `qcoin` simulation laboratory.
//!
//! Randomised operations take an explicit integer `seed`, so a Python
//! session reproduces exactly what the Rust API and the CLI would produce.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict};

use qcoin::bills::{self, EstimationMode, Submission};
use qcoin::blindverify::{self, BlindOptions, Channel, Merchant};
use qcoin::coin::{self, Provenance};
use qcoin::forgery::{self, Bb84CoinSpec, ForgeBoundParams, SplitStrategy};
use qcoin::{Error, Pauli, Seed, Stream};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Parameter(_) | Error::Format(_) | Error::UndefinedLabel(_) | Error::IssuanceCap { .. } => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

trait OrPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for qcoin::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

/// Normalised pure state of `n` qubits. Qubit 0 is the most significant bit
/// of the amplitude index. Gate methods return a new state.
#[pyclass(frozen, skip_from_py_object, name = "QuantumState")]
#[derive(Clone)]
struct PyState(qcoin::QuantumState);

#[pymethods]
impl PyState {
    #[new]
    fn new(amplitudes: Vec<Complex64>) -> PyResult<Self> {
        qcoin::QuantumState::from_amplitudes(amplitudes).py().map(PyState)
    }

    #[staticmethod]
    fn normalized(amplitudes: Vec<Complex64>) -> PyResult<Self> {
        qcoin::QuantumState::normalized(amplitudes).py().map(PyState)
    }

    #[staticmethod]
    fn basis(n: usize, index: usize) -> PyResult<Self> {
        qcoin::QuantumState::basis(n, index).py().map(PyState)
    }

    #[staticmethod]
    fn uniform(n: usize) -> PyResult<Self> {
        qcoin::QuantumState::uniform(n).py().map(PyState)
    }

    #[staticmethod]
    #[pyo3(signature = (n, seed = 0))]
    fn haar_random(n: usize, seed: u64) -> PyResult<Self> {
        qcoin::QuantumState::haar_random(n, &mut Seed(seed).rng(Stream::Trial)).py().map(PyState)
    }

    #[staticmethod]
    fn from_bytes(data: &[u8]) -> PyResult<Self> {
        qcoin::QuantumState::from_bytes(data).py().map(PyState)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn amplitudes(&self) -> Vec<Complex64> {
        self.0.amplitudes().to_vec()
    }

    fn inner(&self, other: &PyState) -> PyResult<Complex64> {
        self.0.inner(&other.0).py()
    }

    fn fidelity(&self, other: &PyState) -> PyResult<f64> {
        self.0.fidelity(&other.0).py()
    }

    fn tensor(&self, other: &PyState) -> PyResult<PyState> {
        self.0.tensor(&other.0).py().map(PyState)
    }

    fn hadamard(&self, qubit: usize) -> PyResult<PyState> {
        let mut s = self.0.clone();
        s.apply_hadamard(qubit).py()?;
        Ok(PyState(s))
    }

    /// `which` is `"x"` or `"z"`.
    fn pauli(&self, qubit: usize, which: &str) -> PyResult<PyState> {
        let p = match which.to_ascii_lowercase().as_str() {
            "x" => Pauli::X,
            "z" => Pauli::Z,
            other => return Err(PyValueError::new_err(format!("unknown Pauli `{other}`"))),
        };
        let mut s = self.0.clone();
        s.apply_pauli(qubit, p).py()?;
        Ok(PyState(s))
    }

    #[pyo3(signature = (epsilon, seed = 0))]
    fn perturb(&self, epsilon: f64, seed: u64) -> PyResult<PyState> {
        self.0.perturb(epsilon, &mut Seed(seed).rng(Stream::Noise)).py().map(PyState)
    }

    fn to_bytes<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &self.0.to_bytes())
    }

    fn __eq__(&self, other: &PyState) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        format!("QuantumState(n={})", self.0.n())
    }
}

#[pyclass(frozen, skip_from_py_object, name = "Coin")]
#[derive(Clone)]
struct PyCoin(coin::Coin);

#[pymethods]
impl PyCoin {
    #[getter]
    fn state(&self) -> PyState {
        PyState(self.0.state.clone())
    }

    /// `"minted"`, `"forged"` or `"external"`.
    #[getter]
    fn provenance(&self) -> &'static str {
        match self.0.provenance() {
            Provenance::Minted { .. } => "minted",
            Provenance::Forged => "forged",
            Provenance::External => "external",
        }
    }

    #[getter]
    fn serial(&self) -> Option<u64> {
        match self.0.provenance() {
            Provenance::Minted { serial } => Some(*serial),
            _ => None,
        }
    }

    fn __repr__(&self) -> String {
        format!("Coin(n={}, provenance={})", self.0.state.n(), self.provenance())
    }
}

/// Bank-side coin scheme holding the secret state.
#[pyclass(frozen, name = "CoinScheme")]
struct PyCoinScheme(coin::CoinScheme);

#[pymethods]
impl PyCoinScheme {
    #[new]
    #[pyo3(signature = (n, seed = 0, cap = None))]
    fn new(n: usize, seed: u64, cap: Option<u64>) -> PyResult<Self> {
        let scheme = coin::CoinScheme::new(n, Seed(seed)).py()?;
        Ok(PyCoinScheme(match cap {
            Some(c) => scheme.with_cap(c),
            None => scheme,
        }))
    }

    #[staticmethod]
    fn from_state(state: &PyState) -> Self {
        PyCoinScheme(coin::CoinScheme::from_state(state.0.clone()))
    }

    #[staticmethod]
    fn from_bytes(data: &[u8]) -> PyResult<Self> {
        coin::CoinScheme::from_fixture_bytes(data).py().map(PyCoinScheme)
    }

    fn to_bytes<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &self.0.to_fixture_bytes())
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn cap(&self) -> u64 {
        self.0.cap()
    }

    #[getter]
    fn issued(&self) -> u64 {
        self.0.issued_count()
    }

    fn mint(&self) -> PyResult<PyCoin> {
        self.0.mint().py().map(PyCoin)
    }

    fn reveal_secret(&self) -> PyState {
        PyState(self.0.reveal_secret().clone())
    }

    /// One run of the verification circuit: `(accepted, post_state)`.
    #[pyo3(signature = (state, seed = 0))]
    fn verify(&self, state: &PyState, seed: u64) -> PyResult<(bool, PyState)> {
        let r = coin::verify(&self.0.oracle(), &state.0, &mut Seed(seed).rng(Stream::Measurement)).py()?;
        Ok((r.accepted, PyState(r.post_state)))
    }

    fn accept_probability(&self, state: &PyState) -> PyResult<f64> {
        Ok(coin::verify_analytic(&self.0, &state.0).py()?.accept_probability)
    }

    fn __repr__(&self) -> String {
        format!("CoinScheme(n={}, cap={}, issued={})", self.0.n(), self.0.cap(), self.0.issued_count())
    }
}

fn forger_dict<'py>(py: Python<'py>, r: &forgery::ForgerReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("n", r.n)?;
    d.set_item("k", r.k)?;
    d.set_item("target_p", r.target_p)?;
    d.set_item("queries", r.queries)?;
    d.set_item("trials", r.trials)?;
    d.set_item("achieved_overlap", r.achieved_overlap)?;
    d.set_item("succeeded", r.succeeded)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (scheme, max_tries = 1_000_000, seed = 0))]
fn retry_forger<'py>(py: Python<'py>, scheme: &PyCoinScheme, max_tries: u64, seed: u64) -> PyResult<Bound<'py, PyDict>> {
    let (report, coin) = forgery::run_retry_forger(&scheme.0, max_tries, Seed(seed)).py()?;
    let d = forger_dict(py, &report)?;
    d.set_item("coin", coin.map(PyCoin))?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (scheme, target_p = 0.5, seed = 0))]
fn grover_forger<'py>(py: Python<'py>, scheme: &PyCoinScheme, target_p: f64, seed: u64) -> PyResult<Bound<'py, PyDict>> {
    let (report, outcome) = forgery::run_grover_forger(&scheme.0, target_p, Seed(seed)).py()?;
    let d = forger_dict(py, &report)?;
    d.set_item("predicted_overlap", outcome.predicted_overlap)?;
    d.set_item("iterations", outcome.iterations)?;
    Ok(d)
}

/// Lower bound on the oracle queries needed to forge with success `p`
/// while holding `k` coins of `n` qubits.
#[pyfunction]
fn theoretical_bound(n: usize, k: u64, p: f64) -> PyResult<f64> {
    Ok(forgery::theoretical_bound(ForgeBoundParams::new(n, k, p).py()?))
}

#[pyfunction]
#[pyo3(signature = (n, copies = 16, strategy = "adaptive", forged = 100, seed = 0))]
fn bb84_attack<'py>(
    py: Python<'py>,
    n: usize,
    copies: usize,
    strategy: &str,
    forged: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let strategy = match strategy {
        "even" => SplitStrategy::Even,
        "adaptive" => SplitStrategy::Adaptive,
        other => return Err(PyValueError::new_err(format!("unknown strategy `{other}`"))),
    };
    let spec = Bb84CoinSpec::random(n, &mut Seed(seed).rng(Stream::Scheme)).py()?;
    let r = forgery::bb84_attack(&spec, copies, strategy, forged, Seed(seed)).py()?;
    let d = PyDict::new(py);
    d.set_item("success", r.success)?;
    d.set_item("wrong_positions", r.wrong_positions)?;
    d.set_item("forged", r.forged)?;
    d.set_item("forged_pass_rate", r.forged_pass_rate)?;
    Ok(d)
}

#[pyclass(frozen, skip_from_py_object, name = "Bill")]
#[derive(Clone)]
struct PyBill(bills::Bill);

#[pymethods]
impl PyBill {
    #[new]
    fn new(k: u64, state: &PyState) -> Self {
        PyBill(bills::Bill { k, state: state.0.clone() })
    }

    #[getter]
    fn k(&self) -> u64 {
        self.0.k
    }

    #[getter]
    fn state(&self) -> PyState {
        PyState(self.0.state.clone())
    }

    fn __repr__(&self) -> String {
        format!("Bill(k={}, n={})", self.0.k, self.0.state.n())
    }
}

/// Bill scheme over a cyclic group of order `m` with `t` precision qubits.
#[pyclass(frozen, name = "BillScheme")]
struct PyBillScheme(bills::BillScheme);

#[pymethods]
impl PyBillScheme {
    #[new]
    #[pyo3(signature = (m = 8, t = 3, seed = 0, windowed = false))]
    fn new(m: u64, t: usize, seed: u64, windowed: bool) -> PyResult<Self> {
        let mode = if windowed { EstimationMode::Windowed } else { EstimationMode::Exact };
        bills::BillScheme::with_mode(m, t, mode, Seed(seed)).py().map(PyBillScheme)
    }

    #[getter]
    fn m(&self) -> u64 {
        self.0.m()
    }

    #[getter]
    fn label_width(&self) -> usize {
        self.0.label_width()
    }

    #[getter]
    fn valid_list(&self) -> Vec<u64> {
        self.0.valid_list().snapshot()
    }

    #[pyo3(signature = (seed = 0))]
    fn mint(&self, seed: u64) -> PyResult<PyBill> {
        bills::mint_bill(&self.0, &mut Seed(seed).rng(Stream::Trial)).py().map(PyBill)
    }

    /// `(accepted, post_bill, readout)`; `readout` is `None` when the bill
    /// was rejected before estimation.
    #[pyo3(signature = (bill, seed = 0))]
    fn verify(&self, bill: &PyBill, seed: u64) -> PyResult<(bool, PyBill, Option<u64>)> {
        let v = bills::verify_bill(&self.0, &bill.0, &mut Seed(seed).rng(Stream::Measurement)).py()?;
        Ok((v.accepted, PyBill(v.post_bill), v.readout))
    }

    /// Pass rate of Haar-random label states claiming `k`.
    #[pyo3(signature = (k, trials = 1000, seed = 0))]
    fn forge_pass_rate(&self, k: u64, trials: usize, seed: u64) -> PyResult<f64> {
        let verifier = bills::BillVerifier::new(&self.0);
        Ok(bills::forge_bill_attempt(&verifier, k, &Submission::HaarRandom, trials, Seed(seed)).py()?.pass_rate)
    }
}

fn outcome_dict<'py>(py: Python<'py>, o: blindverify::ProtocolOutcome) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("accepted", o.accepted)?;
    d.set_item("post_state", PyState(o.post_coin.state))?;
    d.set_item("bank_gates", o.transcript.bank_gates().total())?;
    d.set_item("transcript", o.transcript.to_text())?;
    Ok(d)
}

/// Baseline flow: the coin is sent to the bank and back.
#[pyfunction]
#[pyo3(signature = (scheme, state, seed = 0))]
fn online_verify<'py>(py: Python<'py>, scheme: &PyCoinScheme, state: &PyState, seed: u64) -> PyResult<Bound<'py, PyDict>> {
    let bank = blindverify::Bank::new(&scheme.0);
    let merchant = Merchant { coin: coin::Coin::external(state.0.clone()) };
    let o = blindverify::run_online_verification(&bank, merchant, &mut Channel::new(), Seed(seed)).py()?;
    outcome_dict(py, o)
}

/// Pad-assisted flow in which the bank only sees one-time-padded states.
#[pyfunction]
#[pyo3(signature = (scheme, state, seed = 0, anonymous = false))]
fn blind_verify<'py>(
    py: Python<'py>,
    scheme: &PyCoinScheme,
    state: &PyState,
    seed: u64,
    anonymous: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let bank = blindverify::Bank::new(&scheme.0);
    let merchant = Merchant { coin: coin::Coin::external(state.0.clone()) };
    let options = BlindOptions { anonymous_sender: anonymous, ..Default::default() };
    let o = blindverify::run_blind_verification_with(&bank, merchant, &mut Channel::new(), Seed(seed), &options).py()?;
    outcome_dict(py, o)
}

/// Largest trace distances seen by a party without the merchant pad.
/// Returns `(max_from_mixed, max_between)`.
#[pyfunction]
#[pyo3(signature = (a, b, runs = 1, seed = 0))]
fn blindness_check(a: &PyCoinScheme, b: &PyCoinScheme, runs: usize, seed: u64) -> PyResult<(Option<f64>, Option<f64>)> {
    let r = blindverify::blindness_check(&a.0, &b.0, runs, Seed(seed)).py()?;
    Ok((r.max_distance_from_mixed, r.max_distance_between))
}

#[pymodule]
pub fn pyqcoin(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyState>()?;
    m.add_class::<PyCoin>()?;
    m.add_class::<PyCoinScheme>()?;
    m.add_class::<PyBill>()?;
    m.add_class::<PyBillScheme>()?;
    m.add_function(wrap_pyfunction!(retry_forger, m)?)?;
    m.add_function(wrap_pyfunction!(grover_forger, m)?)?;
    m.add_function(wrap_pyfunction!(theoretical_bound, m)?)?;
    m.add_function(wrap_pyfunction!(bb84_attack, m)?)?;
    m.add_function(wrap_pyfunction!(online_verify, m)?)?;
    m.add_function(wrap_pyfunction!(blind_verify, m)?)?;
    m.add_function(wrap_pyfunction!(blindness_check, m)?)?;
    Ok(())
}
