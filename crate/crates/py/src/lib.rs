//! Python bindings for `seqclone`.
//!
//! Domain errors raise `ValueError`; numeric failures raise `RuntimeError`.
//! States are returned as lists of Python `complex` amplitudes with qubit 0
//! as the most significant bit.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use seqclone::cloning;
use seqclone::protocol::{self, BranchPolicy, CloneRunReport, Mode, ProtocolConfig};
use seqclone::qstate::{self, PureState};
use seqclone::report::TableDump;
use seqclone::verify::{run_verify, ModeSelection, VerifyConfig};
use seqclone::{ComplexVector, Error, C64};

fn to_py(e: Error) -> PyErr {
    if e.is_numeric() {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn parse_mode(mode: &str) -> PyResult<Mode> {
    match mode {
        "universal" => Ok(Mode::Universal),
        "phase-covariant" | "phase_covariant" => Ok(Mode::PhaseCovariant),
        _ => Err(PyValueError::new_err(format!("unknown mode {mode:?}; expected 'universal' or 'phase-covariant'"))),
    }
}

fn parse_branch(branch: &str) -> PyResult<BranchPolicy> {
    match branch {
        "auto" => Ok(BranchPolicy::Random),
        "0" => Ok(BranchPolicy::Forced0),
        "1" => Ok(BranchPolicy::Forced1),
        _ => Err(PyValueError::new_err(format!("unknown branch {branch:?}; expected 'auto', '0' or '1'"))),
    }
}

fn amplitudes(s: &PureState) -> Vec<C64> {
    s.amplitudes().as_slice().to_vec()
}

fn state_from(amps: Vec<C64>) -> PyResult<PureState> {
    PureState::from_amplitudes(amps).map_err(to_py)
}

/// A pure qubit on the Bloch sphere, `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
#[pyclass(name = "BlochQubit", frozen, from_py_object)]
#[derive(Clone)]
struct PyBlochQubit {
    inner: cloning::BlochQubit,
}

#[pymethods]
impl PyBlochQubit {
    #[new]
    #[pyo3(signature = (theta, phi=0.0))]
    fn new(theta: f64, phi: f64) -> PyResult<Self> {
        Ok(Self { inner: cloning::BlochQubit::new(theta, phi).map_err(to_py)? })
    }

    #[getter]
    fn theta(&self) -> f64 {
        self.inner.theta()
    }

    #[getter]
    fn phi(&self) -> f64 {
        self.inner.phi()
    }

    fn amplitudes(&self) -> (C64, C64) {
        self.inner.amplitudes()
    }

    fn __repr__(&self) -> String {
        format!("BlochQubit(theta={}, phi={})", self.inner.theta(), self.inner.phi())
    }
}

/// Result of one protocol run.
#[pyclass(name = "CloneReport", frozen)]
struct PyCloneReport {
    inner: CloneRunReport,
    output: Vec<C64>,
}

#[pymethods]
impl PyCloneReport {
    #[getter]
    fn mode(&self) -> &'static str {
        self.inner.mode.name()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m
    }

    #[getter]
    fn d_single(&self) -> usize {
        self.inner.d_single
    }

    #[getter]
    fn d_total(&self) -> usize {
        self.inner.d_total
    }

    #[getter]
    fn branch_probabilities(&self) -> (f64, f64) {
        (self.inner.branch_probabilities[0], self.inner.branch_probabilities[1])
    }

    #[getter]
    fn branch_taken(&self) -> u8 {
        self.inner.branch_taken
    }

    #[getter]
    fn per_clone_fidelity(&self) -> Vec<f64> {
        self.inner.per_clone_fidelity.clone()
    }

    #[getter]
    fn theory_fidelity(&self) -> f64 {
        self.inner.theory_fidelity
    }

    #[getter]
    fn output_overlap_modulus(&self) -> f64 {
        self.inner.output_overlap_modulus
    }

    #[getter]
    fn ancilla_purity_final(&self) -> f64 {
        self.inner.ancilla_purity_final
    }

    #[getter]
    fn max_isometry_defect(&self) -> f64 {
        self.inner.max_isometry_defect
    }

    #[getter]
    fn chi_observed(&self) -> usize {
        self.inner.chi_observed
    }

    /// Emitted state after measurement and correction.
    #[getter]
    fn output(&self) -> Vec<C64> {
        self.output.clone()
    }

    fn all_passed(&self) -> bool {
        self.inner.all_passed()
    }

    /// `(name, value, threshold, passed)` for every check.
    fn checks(&self) -> Vec<(String, f64, f64, bool)> {
        self.inner.checks.iter().map(|c| (c.name.clone(), c.value, c.threshold, c.passed)).collect()
    }

    fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.inner).expect("report serializes")
    }

    fn __repr__(&self) -> String {
        format!(
            "CloneReport(mode={:?}, m={}, d_total={}, branch_taken={}, all_passed={})",
            self.inner.mode.name(),
            self.inner.m,
            self.inner.d_total,
            self.inner.branch_taken,
            self.inner.all_passed()
        )
    }
}

/// Runs the sequential cloning protocol on `q`.
#[pyfunction]
#[pyo3(name = "clone", signature = (q, m, mode="universal", branch="auto", seed=42, tol=1e-10))]
fn clone_py(q: PyBlochQubit, m: usize, mode: &str, branch: &str, seed: u64, tol: f64) -> PyResult<PyCloneReport> {
    let config =
        ProtocolConfig { mode: parse_mode(mode)?, m, branch_policy: parse_branch(branch)?, rng_seed: seed, tol };
    let (inner, out) = protocol::clone_with_output(&config, &q.inner).map_err(to_py)?;
    Ok(PyCloneReport { inner, output: amplitudes(&out) })
}

#[pyfunction]
fn alpha_coeffs(m: usize) -> PyResult<Vec<f64>> {
    Ok(cloning::alpha_coeffs(m).map_err(to_py)?.values().to_vec())
}

#[pyfunction]
fn gamma_coeffs(k: usize) -> PyResult<Vec<f64>> {
    Ok(cloning::gamma_coeffs(k).map_err(to_py)?.values().to_vec())
}

#[pyfunction]
fn gm_fidelity(m: usize) -> f64 {
    cloning::gm_fidelity(m)
}

/// Universal cloning state over `2m − 1` qubits.
#[pyfunction]
fn gm_state(q: PyBlochQubit, m: usize) -> PyResult<Vec<C64>> {
    Ok(amplitudes(&cloning::gm_state(&q.inner, m).map_err(to_py)?))
}

/// Phase-covariant cloning state over `m` (odd) qubits.
#[pyfunction]
fn pc_state(phi: f64, m: usize) -> PyResult<Vec<C64>> {
    Ok(amplitudes(&cloning::pc_state(phi, m).map_err(to_py)?))
}

#[pyfunction]
fn dicke(n: usize, ones: usize) -> PyResult<Vec<C64>> {
    Ok(amplitudes(&qstate::dicke(n, ones).map_err(to_py)?))
}

/// Largest Schmidt rank over all contiguous cuts.
#[pyfunction]
#[pyo3(signature = (state, tol=1e-10))]
fn max_chi(state: Vec<C64>, tol: f64) -> PyResult<usize> {
    qstate::max_chi(&state_from(state)?, tol).map_err(to_py)
}

/// Schmidt coefficients across the cut after the first `a` qubits.
#[pyfunction]
fn schmidt_values(state: Vec<C64>, a: usize) -> PyResult<Vec<f64>> {
    qstate::schmidt_values(&state_from(state)?, a).map_err(to_py)
}

/// Fidelity of qubit `index` of `state` with the pure qubit `q`.
#[pyfunction]
fn clone_fidelity(state: Vec<C64>, index: usize, q: PyBlochQubit) -> PyResult<f64> {
    let s = state_from(state)?;
    let rho = qstate::reduced_density(&s, &[index]).map_err(to_py)?;
    qstate::fidelity_pure(&rho, &q.inner.psi()).map_err(to_py)
}

/// Closed-form isometry chain as a JSON document.
#[pyfunction]
#[pyo3(signature = (m, mode="universal"))]
fn table(m: usize, mode: &str) -> PyResult<String> {
    let config = ProtocolConfig::new(parse_mode(mode)?, m);
    config.validate(None).map_err(to_py)?;
    let coeffs = config.coefficients().map_err(to_py)?;
    let steps = protocol::table1_isometries(&coeffs).map_err(to_py)?;
    let dump = TableDump::new(config.mode, m, coeffs.values().to_vec(), &steps);
    Ok(serde_json::to_string_pretty(&dump).expect("dump serializes"))
}

/// Invariant sweep; returns `(all_passed, summary_json)`.
#[pyfunction]
#[pyo3(signature = (m_min=2, m_max=6, mode="both", samples=10, seed=42, tol=1e-10))]
fn verify(m_min: usize, m_max: usize, mode: &str, samples: usize, seed: u64, tol: f64) -> PyResult<(bool, String)> {
    let modes = match mode {
        "both" => ModeSelection::Both,
        "universal" => ModeSelection::Universal,
        "phase-covariant" | "phase_covariant" => ModeSelection::PhaseCovariant,
        _ => return Err(PyValueError::new_err(format!("unknown mode {mode:?}"))),
    };
    let summary = run_verify(&VerifyConfig { m_min, m_max, modes, samples, seed, tol }).map_err(to_py)?;
    Ok((summary.all_passed, serde_json::to_string_pretty(&summary).expect("summary serializes")))
}

/// Normalizes a list of amplitudes (helper for building inputs).
#[pyfunction]
fn normalize(state: Vec<C64>) -> Vec<C64> {
    ComplexVector::new(state).normalized().into_vec()
}

#[pymodule]
fn seqclone_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBlochQubit>()?;
    m.add_class::<PyCloneReport>()?;
    m.add_function(wrap_pyfunction!(clone_py, m)?)?;
    m.add_function(wrap_pyfunction!(alpha_coeffs, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_coeffs, m)?)?;
    m.add_function(wrap_pyfunction!(gm_fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(gm_state, m)?)?;
    m.add_function(wrap_pyfunction!(pc_state, m)?)?;
    m.add_function(wrap_pyfunction!(dicke, m)?)?;
    m.add_function(wrap_pyfunction!(max_chi, m)?)?;
    m.add_function(wrap_pyfunction!(schmidt_values, m)?)?;
    m.add_function(wrap_pyfunction!(clone_fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(table, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(normalize, m)?)?;
    m.add("MAX_CLONES", seqclone::MAX_CLONES)?;
    Ok(())
}
