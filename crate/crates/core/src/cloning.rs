//! Target states of symmetric 1→M cloning.
//!
//! * Universal cloning: `M` clones and `M − 1` anticlones,
//!   `Σ_j α_j |(M−j)ψ, jψ⊥⟩_S ⊗ |(M−j−1)ψ*, jψ*⊥⟩_S` with
//!   `α_j = √(2(M−j)/(M(M+1)))`.
//! * Economical phase-covariant cloning (odd `M = 2k + 1`, equatorial input):
//!   `(|(k+1)0, k1⟩_S + e^{iφ}|k0, (k+1)1⟩_S)/√2`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::protocol::binomial;
use crate::qstate::{dicke, qubit, tensor, PureState};
use crate::MAX_CLONES;

/// Input qubit on the Bloch sphere, `ψ = cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
///
/// The companions use these fixed phases:
///
/// ```text
/// ψ⊥  = sin(θ/2)|0⟩ − e^{iφ}  cos(θ/2)|1⟩
/// ψ*  = e^{−iφ} sin(θ/2)|0⟩ + cos(θ/2)|1⟩
/// ψ*⊥ = −e^{−iφ} cos(θ/2)|0⟩ + sin(θ/2)|1⟩
/// ```
///
/// With this choice the universal cloning state is linear in the input:
/// `gm_state(ψ) = α·gm_state(|0⟩) + β·gm_state(|1⟩)` up to a global phase.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochQubit {
    theta: f64,
    phi: f64,
}

impl BlochQubit {
    /// `theta` must lie in `[0, π]`; `phi` is reduced modulo 2π.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidArgument("Bloch angles must be finite".into()));
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidArgument(format!("theta = {theta} outside [0, pi]")));
        }
        Ok(Self { theta, phi: phi.rem_euclid(2.0 * PI) })
    }

    pub fn zero() -> Self {
        Self { theta: 0.0, phi: 0.0 }
    }

    pub fn one() -> Self {
        Self { theta: PI, phi: 0.0 }
    }

    /// Equatorial state `(|0⟩ + e^{iφ}|1⟩)/√2`.
    pub fn equatorial(phi: f64) -> Result<Self> {
        Self::new(PI / 2.0, phi)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// `(α, β)` with `ψ = α|0⟩ + β|1⟩`.
    pub fn amplitudes(&self) -> (C64, C64) {
        let (s, c) = (self.theta / 2.0).sin_cos();
        (C64::new(c, 0.0), C64::from_polar(s, self.phi))
    }

    pub fn psi(&self) -> PureState {
        let (a, b) = self.amplitudes();
        qubit(a, b)
    }

    pub fn psi_perp(&self) -> PureState {
        let (s, c) = (self.theta / 2.0).sin_cos();
        qubit(C64::new(s, 0.0), -C64::from_polar(c, self.phi))
    }

    pub fn psi_star(&self) -> PureState {
        let (s, c) = (self.theta / 2.0).sin_cos();
        qubit(C64::from_polar(s, -self.phi), C64::new(c, 0.0))
    }

    pub fn psi_star_perp(&self) -> PureState {
        let (s, c) = (self.theta / 2.0).sin_cos();
        qubit(-C64::from_polar(c, -self.phi), C64::new(s, 0.0))
    }
}

/// Positive weights `c_0 … c_{m_eff−1}` of the Gisin–Massar structure, with
/// unit 2-norm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSequence {
    m_eff: usize,
    values: Vec<f64>,
}

impl CoefficientSequence {
    /// Validates positivity and normalization (within 1e-12).
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("empty coefficient sequence".into()));
        }
        if values.iter().any(|&v| v.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) || !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("coefficients must be positive: {values:?}")));
        }
        let norm2: f64 = values.iter().map(|v| v * v).sum();
        if (norm2 - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(norm2.sqrt()));
        }
        Ok(Self { m_eff: values.len(), values })
    }

    pub fn m_eff(&self) -> usize {
        self.m_eff
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sum_of_squares(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }
}

fn check_clone_count(m: usize) -> Result<()> {
    if m < 1 {
        return Err(Error::InvalidArgument("the clone count must be at least 1".into()));
    }
    if m > MAX_CLONES {
        return Err(Error::TooManyClones { m, cap: MAX_CLONES });
    }
    Ok(())
}

/// `α_j = √(2(m−j)/(m(m+1)))`, `j = 0 … m−1`.
pub fn alpha_coeffs(m: usize) -> Result<CoefficientSequence> {
    check_clone_count(m)?;
    let mf = m as f64;
    let values = (0..m).map(|j| (2.0 * (mf - j as f64) / (mf * (mf + 1.0))).sqrt()).collect();
    CoefficientSequence::new(values)
}

/// `γ_j = √(C(k+1, k+1−j)·C(k, j) / C(2k+1, k+1))`, `j = 0 … k`.
pub fn gamma_coeffs(k: usize) -> Result<CoefficientSequence> {
    check_clone_count(2 * k + 1)?;
    let (kk, denom) = (k as i64, binomial(2 * k as i64 + 1, k as i64 + 1)? as f64);
    let values = (0..=kk)
        .map(|j| Ok((binomial(kk + 1, kk + 1 - j)? as f64 * binomial(kk, j)? as f64 / denom).sqrt()))
        .collect::<Result<Vec<_>>>()?;
    CoefficientSequence::new(values)
}

/// Symmetric register `|a·u0, b·u1⟩_S`: the single-qubit change of basis
/// `|0⟩ → u0, |1⟩ → u1` applied to every qubit of `dicke(a + b, b)`.
pub fn symmetric_register(a: usize, b: usize, u0: &PureState, u1: &PureState) -> Result<PureState> {
    let (x, y) = (u0.amplitudes(), u1.amplitudes());
    let basis_change = ComplexMatrix::from_rows(&[vec![x[0], y[0]], vec![x[1], y[1]]])?;
    dicke(a + b, b)?.apply_uniform(&basis_change)
}

/// Universal cloning state over `2m − 1` qubits: clones on qubits `0..m`,
/// anticlones on `m..2m−1`.
pub fn gm_state(q: &BlochQubit, m: usize) -> Result<PureState> {
    let alpha = alpha_coeffs(m)?;
    let (psi, psi_perp) = (q.psi(), q.psi_perp());
    let (psi_star, psi_star_perp) = (q.psi_star(), q.psi_star_perp());
    let mut acc: Option<PureState> = None;
    for (j, &a) in alpha.values().iter().enumerate() {
        let clones = symmetric_register(m - j, j, &psi, &psi_perp)?;
        let anti = symmetric_register(m - j - 1, j, &psi_star, &psi_star_perp)?;
        let term = tensor(&clones, &anti).scale(C64::new(a, 0.0));
        acc = Some(match acc {
            None => term,
            Some(s) => s.superpose(C64::new(1.0, 0.0), &term, C64::new(1.0, 0.0))?,
        });
    }
    Ok(acc.expect("m >= 1"))
}

/// Economical phase-covariant cloning output for the equatorial input with
/// phase `phi`, over `m` (odd) qubits.
pub fn pc_state(phi: f64, m: usize) -> Result<PureState> {
    check_clone_count(m)?;
    if m.is_multiple_of(2) {
        return Err(Error::EvenCloneCount(m));
    }
    let k = (m - 1) / 2;
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    dicke(m, k)?.superpose(h, &dicke(m, k + 1)?, C64::from_polar(FRAC_1_SQRT_2, phi))
}

/// Optimal universal single-clone fidelity `(2m+1)/(3m)`.
pub fn gm_fidelity(m: usize) -> f64 {
    let mf = m as f64;
    (2.0 * mf + 1.0) / (3.0 * mf)
}

/// One term `weight · left ⊗ right` of a branch decomposition.
#[derive(Clone, Debug)]
pub struct BranchTerm {
    pub weight: f64,
    pub left: PureState,
    pub right: PureState,
}

/// Terms `γ_j |(k+1−j)0, j1⟩_S ⊗ |(k−j)1, j0⟩_S`, `j = 0 … k`, whose sum is
/// `dicke(2k+1, k)`.
pub fn pc_branch_decomposition(k: usize) -> Result<Vec<BranchTerm>> {
    let gamma = gamma_coeffs(k)?;
    gamma
        .values()
        .iter()
        .enumerate()
        .map(|(j, &w)| Ok(BranchTerm { weight: w, left: dicke(k + 1, j)?, right: dicke(k, k - j)? }))
        .collect()
}

/// Sums a branch decomposition back into a state.
pub fn reconstruct_branch(terms: &[BranchTerm]) -> Result<PureState> {
    let mut acc: Option<PureState> = None;
    for t in terms {
        let term = tensor(&t.left, &t.right).scale(C64::new(t.weight, 0.0));
        acc = Some(match acc {
            None => term,
            Some(s) => s.superpose(C64::new(1.0, 0.0), &term, C64::new(1.0, 0.0))?,
        });
    }
    acc.ok_or_else(|| Error::InvalidArgument("empty branch decomposition".into()))
}
