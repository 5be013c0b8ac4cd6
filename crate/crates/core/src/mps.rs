//! Vidal-form matrix product states.
//!
//! ```text
//! c_{i₁…i_n} = Γ[1]^{i₁} λ[1] Γ[2]^{i₂} λ[2] ⋯ λ[n−1] Γ[n]^{i_n}
//! ```
//!
//! [`decompose`] builds the form by a left-to-right sweep of SVDs,
//! [`reconstruct`] contracts it back, and [`to_isometries`] turns it into the
//! step matrices of a sequential qubit-ancilla chain. The latter is the
//! independent route used to cross-check the closed-form cloning isometries.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{svd, ComplexMatrix, ComplexVector, C64};
use crate::protocol::IsometryStep;
use crate::qstate::PureState;

/// Default relative truncation threshold of [`decompose`].
pub const DECOMPOSE_TOL: f64 = 1e-12;

/// One site: `matrices[i]` is `Γ^i`, of shape `left × right`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SiteTensor {
    pub left: usize,
    pub right: usize,
    pub matrices: [ComplexMatrix; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MpsForm {
    pub n: usize,
    pub gammas: Vec<SiteTensor>,
    /// `lambdas[l]` are the Schmidt coefficients on the bond between sites
    /// `l` and `l + 1`, descending.
    pub lambdas: Vec<Vec<f64>>,
    pub chi: usize,
}

impl MpsForm {
    pub fn bond_dims(&self) -> Vec<usize> {
        self.lambdas.iter().map(Vec::len).collect()
    }
}

/// Vidal decomposition of a normalized state. Singular values at or below
/// `tol × (largest singular value of that cut)` are discarded.
pub fn decompose(s: &PureState, tol: f64) -> Result<MpsForm> {
    let n = s.n_qubits();
    if n == 0 {
        return Err(Error::InvalidArgument("cannot decompose a zero-qubit state".into()));
    }
    s.check_normalized()?;

    let mut gammas = Vec::with_capacity(n);
    let mut lambdas: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    let mut prev_lambda = vec![1.0];
    // remainder = diag(λ_prev) · (right Schmidt vectors), bond × 2^(sites left)
    let mut rem = ComplexMatrix::from_vec(1, 1 << n, s.amplitudes().as_slice().to_vec())?;

    for _ in 0..n - 1 {
        let (r, cols) = rem.shape();
        let mat = ComplexMatrix::from_vec(r * 2, cols / 2, rem.into_vec())?;
        let dec = svd(&mat)?;
        let smax = dec.s[0];
        let keep = dec.s.iter().take_while(|&&x| x > tol * smax && x > 0.0).count().max(1);

        let mut site = [ComplexMatrix::zeros(r, keep), ComplexMatrix::zeros(r, keep)];
        for a in 0..r {
            for (i, m) in site.iter_mut().enumerate() {
                for b in 0..keep {
                    m[(a, b)] = dec.u[(a * 2 + i, b)] / prev_lambda[a];
                }
            }
        }
        gammas.push(SiteTensor { left: r, right: keep, matrices: site });

        let lam: Vec<f64> = dec.s[..keep].to_vec();
        let rest = dec.vdag.cols();
        rem = ComplexMatrix::from_fn(keep, rest, |a, c| dec.vdag[(a, c)] * lam[a]);
        lambdas.push(lam.clone());
        prev_lambda = lam;
    }

    let r = rem.rows();
    let mut last = [ComplexMatrix::zeros(r, 1), ComplexMatrix::zeros(r, 1)];
    for a in 0..r {
        for (i, m) in last.iter_mut().enumerate() {
            m[(a, 0)] = rem[(a, i)] / prev_lambda[a];
        }
    }
    gammas.push(SiteTensor { left: r, right: 1, matrices: last });

    let chi = lambdas.iter().map(Vec::len).max().unwrap_or(1);
    Ok(MpsForm { n, gammas, lambdas, chi })
}

fn check_form(f: &MpsForm) -> Result<()> {
    let mismatch = |detail: String| Error::DimensionMismatch { op: "MpsForm", detail };
    if f.gammas.len() != f.n || f.lambdas.len() + 1 != f.n.max(1) {
        return Err(mismatch(format!("{} sites and {} bonds for n = {}", f.gammas.len(), f.lambdas.len(), f.n)));
    }
    for (l, g) in f.gammas.iter().enumerate() {
        let left = if l == 0 { 1 } else { f.lambdas[l - 1].len() };
        let right = if l + 1 == f.n { 1 } else { f.lambdas[l].len() };
        if g.left != left || g.right != right || g.matrices.iter().any(|m| m.shape() != (left, right)) {
            return Err(mismatch(format!("site {l}: expected {left}x{right}, found {}x{}", g.left, g.right)));
        }
    }
    Ok(())
}

/// Contracts the form back into a state vector. Returns the renormalized
/// state and `|‖c‖ − 1|` of the raw contraction.
pub fn reconstruct(f: &MpsForm) -> Result<(PureState, f64)> {
    check_form(f)?;
    // rows: bit strings of the sites contracted so far; columns: open bond
    let mut acc = ComplexMatrix::from_vec(1, 1, vec![C64::new(1.0, 0.0)])?;
    for (l, g) in f.gammas.iter().enumerate() {
        let weights: Vec<f64> = if l + 1 < f.n { f.lambdas[l].clone() } else { vec![1.0] };
        let p0 = acc.matmul(&g.matrices[0])?;
        let p1 = acc.matmul(&g.matrices[1])?;
        acc = ComplexMatrix::from_fn(acc.rows() * 2, g.right, |row, b| {
            let p = if row % 2 == 0 { &p0 } else { &p1 };
            p[(row / 2, b)] * weights[b]
        });
    }
    let amps = ComplexVector::new(acc.into_vec());
    let norm = amps.norm();
    let state = PureState::new(f.n, amps)?;
    Ok((state.normalized(), (norm - 1.0).abs()))
}

/// Sequential chain for the state held in `f`, with every step embedded in an
/// ancilla of dimension `d`.
///
/// Step `l` is `V[l]^i = (Γ[l]^i · diag(λ[l]))ᵀ` (the last site has no λ);
/// rows index the outgoing ancilla, columns the incoming one. Ancilla
/// directions the state never reaches are completed so that the sum rule
/// holds on all of `C^d`. Started from the first basis vector, the chain
/// emits the state exactly and leaves the ancilla in the returned vector
/// (always the first basis vector).
pub fn to_isometries(f: &MpsForm, d: usize) -> Result<(Vec<IsometryStep>, ComplexVector)> {
    check_form(f)?;
    if d < f.chi {
        return Err(Error::AncillaTooSmall { d, chi: f.chi });
    }
    let mut steps = Vec::with_capacity(f.n);
    for (l, g) in f.gammas.iter().enumerate() {
        let weights: Vec<f64> = if l + 1 < f.n { f.lambdas[l].clone() } else { vec![1.0; g.right] };
        let branch = |i: usize| {
            // (Γ^i diag λ)ᵀ : right × left
            ComplexMatrix::from_fn(g.right, g.left, |r, c| g.matrices[i][(c, r)] * weights[r])
        };
        steps.push(IsometryStep::from_partial(&branch(0), &branch(1), d)?);
    }
    Ok((steps, ComplexVector::basis(d, 0)))
}

/// Schmidt coefficients padded with zeros, for comparing spectra of
/// different lengths.
pub fn padded(values: &[f64], len: usize) -> Vec<f64> {
    let mut v = values.to_vec();
    v.resize(len.max(values.len()), 0.0);
    v
}
