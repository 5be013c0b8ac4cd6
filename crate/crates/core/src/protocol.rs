//! Sequential cloning machine.
//!
//! The machine runs in five stages:
//!
//! 1. the input `α|0⟩ + β|1⟩` is loaded into a control qubit of the ancilla,
//!    `|φ_I⟩ = (α, β) ⊗ e₀`;
//! 2. every output qubit interacts once with the ancilla through the
//!    block-diagonal step `|0⟩⟨0| ⊗ V₀[k]^i + |1⟩⟨1| ⊗ V₁[k]^i`, where the
//!    `V₀` chain emits the cloning state of `|0⟩` and `V₁` (the bit-flipped
//!    chain) that of `|1⟩`;
//! 3. a generalized Hadamard rotates the two final ancilla states
//!    `|0⟩⊗φ_F⁰`, `|1⟩⊗φ_F¹` into their symmetric and antisymmetric
//!    combinations;
//! 4. the ancilla is measured in `{|0⟩⊗φ_F⁰, |1⟩⊗φ_F¹}`;
//! 5. on the second outcome a `Z` on every emitted qubit restores the target.
//!
//! Both outcomes have probability 1/2 and both deliver `α·GM(0) + β·GM(1)`.
//!
//! The single-branch matrices `V₀[k]` are given in closed form by
//! [`table1_isometries`] (four families: first step, intermediate clone steps,
//! last clone step, anticlone steps). [`crate::mps::to_isometries`] derives an
//! equivalent chain from an SVD sweep and is used as the cross-check.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cloning::{alpha_coeffs, gamma_coeffs, gm_fidelity, gm_state, pc_state, BlochQubit, CoefficientSequence};
use crate::error::{Error, Result};
use crate::linalg::{gram_schmidt_extend, orthonormal_completion, svd, ComplexMatrix, ComplexVector, C64, ONE, ZERO};
use crate::qstate::{
    apply_local_phase_gate, dicke, fidelity_pure, max_chi, overlap, reduced_density, DensityMatrix, PureState,
};
use crate::MAX_CLONES;

/// Sum-rule tolerance for a step to count as an isometry.
pub const ISOMETRY_TOL: f64 = 1e-10;
/// Allowed distance of θ from π/2 for phase-covariant inputs.
pub const EQUATOR_TOL: f64 = 1e-12;

/// One qubit-ancilla interaction: the pair `(V^0, V^1)` of `d × d` matrices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsometryStep {
    d: usize,
    v0: ComplexMatrix,
    v1: ComplexMatrix,
}

impl IsometryStep {
    pub fn new(v0: ComplexMatrix, v1: ComplexMatrix) -> Result<Self> {
        let d = v0.rows();
        if v0.shape() != (d, d) || v1.shape() != (d, d) || d == 0 {
            return Err(Error::DimensionMismatch {
                op: "IsometryStep::new",
                detail: format!("v0 {:?}, v1 {:?} must be equal square matrices", v0.shape(), v1.shape()),
            });
        }
        Ok(Self { d, v0, v1 })
    }

    /// Embeds `out × in` blocks into `d × d` and completes the unused input
    /// columns so that the sum rule holds on all of `C^d`.
    ///
    /// Each missing column is taken from `(e_j ⊕ e_j)/√2` (a `1/√2` diagonal
    /// in both branches) when that is orthogonal to the columns already
    /// present, and otherwise by Gram–Schmidt over the standard basis of the
    /// stacked `2d` space.
    pub fn from_partial(v0: &ComplexMatrix, v1: &ComplexMatrix, d: usize) -> Result<Self> {
        if v0.shape() != v1.shape() {
            return Err(Error::DimensionMismatch {
                op: "IsometryStep::from_partial",
                detail: format!("{:?} vs {:?}", v0.shape(), v1.shape()),
            });
        }
        let in_dim = v0.cols();
        let (v0, v1) = (v0.embed(d, d)?, v1.embed(d, d)?);
        let stacked = |j: usize| ComplexVector::new(v0.column(j).iter().chain(v1.column(j).iter()).copied().collect());
        let mut cols: Vec<ComplexVector> = (0..in_dim).map(stacked).collect();
        for j in in_dim..d {
            let h = C64::new(FRAC_1_SQRT_2, 0.0);
            let mut preferred = ComplexVector::zeros(2 * d);
            preferred[j] = h;
            preferred[d + j] = h;
            let candidates = std::iter::once(preferred).chain((0..2 * d).map(|i| ComplexVector::basis(2 * d, i)));
            let next = gram_schmidt_extend(&cols, candidates, 1);
            cols.push(next.into_iter().next().ok_or_else(|| {
                Error::InvalidArgument("isometry completion failed: the given columns are not orthonormal".into())
            })?);
        }
        let split = |offset: usize| ComplexMatrix::from_fn(d, d, |r, c| cols[c][offset + r]);
        Ok(Self { d, v0: split(0), v1: split(d) })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn v0(&self) -> &ComplexMatrix {
        &self.v0
    }

    pub fn v1(&self) -> &ComplexMatrix {
        &self.v1
    }

    pub fn branch(&self, i: usize) -> &ComplexMatrix {
        if i == 0 {
            &self.v0
        } else {
            &self.v1
        }
    }

    /// `V^0†V^0 + V^1†V^1 − I`.
    pub fn gram_residual(&self) -> ComplexMatrix {
        let g = self.v0.adjoint().matmul(&self.v0).expect("square");
        let g = g.add(&self.v1.adjoint().matmul(&self.v1).expect("square")).expect("square");
        g.sub(&ComplexMatrix::identity(self.d)).expect("square")
    }

    pub fn defect(&self) -> f64 {
        isometry_defect(self)
    }

    pub fn swapped(&self) -> Self {
        Self { d: self.d, v0: self.v1.clone(), v1: self.v0.clone() }
    }
}

/// `‖V^0†V^0 + V^1†V^1 − I‖_F`.
pub fn isometry_defect(step: &IsometryStep) -> f64 {
    step.gram_residual().frobenius_norm()
}

/// `C(p, q)`, zero when `q > p`.
pub fn binomial(p: i64, q: i64) -> Result<u64> {
    if p < 0 || q < 0 {
        return Err(Error::InvalidArgument(format!("binomial({p}, {q}) with a negative argument")));
    }
    if q > p {
        return Ok(0);
    }
    let q = q.min(p - q) as u64;
    let p = p as u64;
    // exact: each partial product is itself a binomial coefficient
    Ok((1..=q).fold(1u64, |acc, i| acc * (p - q + i) / i))
}

fn binom_f(p: usize, q: usize) -> f64 {
    binomial(p as i64, q as i64).expect("non-negative") as f64
}

/// Norm of one specific bit string with `i` zeros and `j` ones on the first
/// `i + j` clone qubits:
///
/// ```text
/// C(i, j) = sqrt( 1/C(i+j, i) · Σ_{k=j}^{M−1} |c_k|² C(M−k, i) C(k, j) / C(M, i+j) )
/// ```
///
/// with `M = coeffs.m_eff()` and `c_k = coeffs.values()[k]`.
pub fn c_coefficient(i: usize, j: usize, coeffs: &CoefficientSequence) -> Result<f64> {
    let m = coeffs.m_eff();
    if i + j > m {
        return Err(Error::InvalidArgument(format!("C({i}, {j}) needs i + j <= {m}")));
    }
    let sum: f64 = (j..m)
        .map(|k| {
            let c = coeffs.values()[k];
            c * c * binom_f(m - k, i) * binom_f(k, j) / binom_f(m, i + j)
        })
        .sum();
    Ok((sum / binom_f(i + j, i)).sqrt())
}

/// Explicit cells of one branch matrix of a table row, 1-based, plus the
/// region the row's conditions cover (cells inside it default to zero).
struct TableBranch {
    cells: Vec<(usize, usize, f64)>,
    region: Box<dyn Fn(usize, usize) -> bool>,
}

impl TableBranch {
    /// Dense `d × d` matrix. The `1/√2 δ_ij` "otherwise" padding goes on a
    /// diagonal cell only if that cell lies outside the covered region and
    /// neither its row nor its column carries an explicit nonzero entry.
    fn fill(&self, d: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(d, d);
        for &(i, j, v) in &self.cells {
            m[(i - 1, j - 1)] = C64::new(v, 0.0);
        }
        for i in 1..=d {
            let claimed = (self.region)(i, i) || self.cells.iter().any(|&(r, c, v)| v != 0.0 && (r == i || c == i));
            if !claimed {
                m[(i - 1, i - 1)] = C64::new(FRAC_1_SQRT_2, 0.0);
            }
        }
        m
    }
}

/// Closed-form single-branch steps (ancilla dimension `m_eff`) emitting
/// `Σ_j c_j |(M−j)0, j1⟩_S ⊗ |(M−j−1)1, j0⟩_S` from the first ancilla basis
/// vector, `M = m_eff`. The chain has `2M − 1` steps and ends with the
/// ancilla back in the first basis vector.
///
/// Step families (1-based cells):
///
/// * step 1: `V^0 = diag(C(1,0), C(0,1))`, `V^1` antidiagonal with the same
///   entries (`(1,2) = C(1,0)`, `(2,1) = C(0,1)`);
/// * step `n`, `1 < n < M`: `V^0_{ii} = C(n+1−i, i−1)/C(n−i, i−1)` for
///   `i ≤ n`; `V^1_{j+1,j} = C(n−j, j)/C(n−j, j−1)` for `j ≤ n` and
///   `V^1_{1,n+1} = 1/√2`;
/// * step `M`: `V^0_{ii} = c_{i−1}/(C(M−i, i−1)·√C(M, i−1))`,
///   `V^1_{j+1,j} = c_j/(C(M−j, j−1)·√C(M, j))`;
/// * step `M + n`: `V^0_{i,i+1} = √(i/(M−n))`, `V^1_{ii} = √((M−n+1−i)/(M−n))`
///   for `i ≤ M−n`, row `M−n+1` zero in both.
///
/// Remaining diagonal cells get `1/√2` as described in `TableBranch::fill`.
pub fn table1_isometries(coeffs: &CoefficientSequence) -> Result<Vec<IsometryStep>> {
    let m = coeffs.m_eff();
    let c = |i: usize, j: usize| c_coefficient(i, j, coeffs);
    let vals = coeffs.values();
    let mut steps = Vec::with_capacity(2 * m - 1);

    for step in 1..2 * m {
        let (b0, b1) = if step == m {
            let mut c0 = Vec::new();
            let mut c1 = Vec::new();
            for i in 1..=m {
                c0.push((i, i, vals[i - 1] / (c(m - i, i - 1)? * binom_f(m, i - 1).sqrt())));
            }
            for (j, &v) in vals.iter().enumerate().skip(1) {
                c1.push((j + 1, j, v / (c(m - j, j - 1)? * binom_f(m, j).sqrt())));
            }
            let all = move |i: usize, j: usize| i <= m && j <= m;
            (TableBranch { cells: c0, region: Box::new(all) }, TableBranch { cells: c1, region: Box::new(all) })
        } else if step == 1 {
            let mut c0 = Vec::new();
            let mut c1 = Vec::new();
            for i in 1..=2 {
                let v = c(2 - i, i - 1)?;
                c0.push((i, i, v));
                c1.push((i, 3 - i, v));
            }
            let block = |i: usize, j: usize| i <= 2 && j <= 2;
            (TableBranch { cells: c0, region: Box::new(block) }, TableBranch { cells: c1, region: Box::new(block) })
        } else if step < m {
            let n = step;
            let mut c0 = Vec::new();
            let mut c1 = vec![(1, n + 1, FRAC_1_SQRT_2)];
            for i in 1..=n {
                c0.push((i, i, c(n + 1 - i, i - 1)? / c(n - i, i - 1)?));
            }
            for j in 1..=n {
                c1.push((j + 1, j, c(n - j, j)? / c(n - j, j - 1)?));
            }
            let r0 = move |i: usize, j: usize| i <= n && j <= n;
            let r1 = move |i: usize, j: usize| (i == 1 && j == n + 1) || ((2..=n + 1).contains(&i) && j <= n);
            (TableBranch { cells: c0, region: Box::new(r0) }, TableBranch { cells: c1, region: Box::new(r1) })
        } else {
            let n = step - m;
            let rest = (m - n) as f64;
            let mut c0 = Vec::new();
            let mut c1 = Vec::new();
            for i in 1..=m - n {
                c0.push((i, i + 1, (i as f64 / rest).sqrt()));
                c1.push((i, i, ((m - n + 1 - i) as f64 / rest).sqrt()));
            }
            let r0 = move |i: usize, j: usize| (i <= m - n && (2..=m - n + 1).contains(&j)) || i == m - n + 1;
            let r1 = move |i: usize, j: usize| (i <= m - n && j <= m - n) || i == m - n + 1;
            (TableBranch { cells: c0, region: Box::new(r0) }, TableBranch { cells: c1, region: Box::new(r1) })
        };
        let s = IsometryStep::new(b0.fill(m), b1.fill(m))?;
        check_sum_rule(&s, step)?;
        steps.push(s);
    }
    Ok(steps)
}

fn check_sum_rule(s: &IsometryStep, step: usize) -> Result<()> {
    let residual = s.gram_residual();
    let defect = residual.frobenius_norm();
    if defect < ISOMETRY_TOL {
        return Ok(());
    }
    let mut cells: Vec<(usize, usize, f64)> = (0..s.d)
        .flat_map(|i| (0..s.d).map(move |j| (i, j)))
        .map(|(i, j)| (i + 1, j + 1, residual[(i, j)].norm()))
        .filter(|&(_, _, v)| v > ISOMETRY_TOL)
        .collect();
    cells.sort_by(|a, b| b.2.total_cmp(&a.2));
    Err(Error::SumRuleViolation { step, defect, entries: cells.into_iter().take(8).map(|(i, j, _)| (i, j)).collect() })
}

/// Swaps `V^0` and `V^1` in every step (the chain for the flipped input).
pub fn flipped_isometries(steps: &[IsometryStep]) -> Vec<IsometryStep> {
    steps.iter().map(IsometryStep::swapped).collect()
}

/// Block-diagonal steps `|0⟩⟨0| ⊗ A + |1⟩⟨1| ⊗ B` on a `2d` ancilla; the
/// control qubit is the more significant factor.
pub fn doubled_isometries(steps0: &[IsometryStep], steps1: &[IsometryStep]) -> Result<Vec<IsometryStep>> {
    if steps0.len() != steps1.len() {
        return Err(Error::DimensionMismatch {
            op: "doubled_isometries",
            detail: format!("{} vs {} steps", steps0.len(), steps1.len()),
        });
    }
    steps0
        .iter()
        .zip(steps1)
        .map(|(a, b)| {
            if a.d != b.d {
                return Err(Error::DimensionMismatch {
                    op: "doubled_isometries",
                    detail: format!("ancilla dimensions {} vs {}", a.d, b.d),
                });
            }
            let p0 = ComplexMatrix::diag(&[ONE, ZERO]);
            let p1 = ComplexMatrix::diag(&[ZERO, ONE]);
            let block = |i: usize| p0.kron(a.branch(i)).add(&p1.kron(b.branch(i)));
            IsometryStep::new(block(0)?, block(1)?)
        })
        .collect()
}

/// Ancilla ⊗ qubits state, stored as a `d × 2^n` matrix (ancilla rows).
#[derive(Clone, Debug, PartialEq)]
pub struct JointState {
    n_qubits: usize,
    amps: ComplexMatrix,
}

impl JointState {
    pub fn ancilla_dim(&self) -> usize {
        self.amps.rows()
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.frobenius_norm()
    }

    /// Reduced state of the ancilla (normalized by the joint norm).
    pub fn ancilla_density(&self) -> DensityMatrix {
        let n2 = self.norm().powi(2);
        let rho = self.amps.matmul(&self.amps.adjoint()).expect("shapes agree").scale(C64::new(1.0 / n2, 0.0));
        DensityMatrix::new(rho).expect("square")
    }

    pub fn ancilla_purity(&self) -> f64 {
        self.ancilla_density().purity()
    }

    /// Applies a unitary on the ancilla.
    pub fn apply_ancilla(&self, u: &ComplexMatrix) -> Result<Self> {
        Ok(Self { n_qubits: self.n_qubits, amps: u.matmul(&self.amps)? })
    }

    /// `(⟨v| ⊗ 1)|joint⟩`, unnormalized.
    pub fn project_ancilla(&self, v: &ComplexVector) -> Result<PureState> {
        if v.dim() != self.ancilla_dim() {
            return Err(Error::DimensionMismatch {
                op: "project_ancilla",
                detail: format!("vector dim {} vs ancilla dim {}", v.dim(), self.ancilla_dim()),
            });
        }
        let row = ComplexMatrix::from_vec(1, v.dim(), v.iter().map(|z| z.conj()).collect())?;
        PureState::new(self.n_qubits, ComplexVector::new(row.matmul(&self.amps)?.into_vec()))
    }

    /// The joint state as a flat amplitude vector (ancilla index most significant).
    pub fn to_vector(&self) -> ComplexVector {
        ComplexVector::new(self.amps.as_slice().to_vec())
    }
}

/// Every intermediate joint state of the chain, one per step.
pub fn run_chain_trace(steps: &[IsometryStep], ancilla_init: &ComplexVector) -> Result<Vec<JointState>> {
    let d = ancilla_init.dim();
    let n = ancilla_init.norm();
    if (n - 1.0).abs() > 1e-12 {
        return Err(Error::NotNormalized(n));
    }
    let mut joint = JointState { n_qubits: 0, amps: ComplexMatrix::from_vec(d, 1, ancilla_init.as_slice().to_vec())? };
    let mut trace = Vec::with_capacity(steps.len());
    for (k, step) in steps.iter().enumerate() {
        if step.d != d {
            return Err(Error::DimensionMismatch {
                op: "run_chain",
                detail: format!("step {} has ancilla dimension {}, expected {d}", k + 1, step.d),
            });
        }
        let p0 = step.v0.matmul(&joint.amps)?;
        let p1 = step.v1.matmul(&joint.amps)?;
        let cols = joint.amps.cols();
        // the new qubit is the least significant one
        let amps = ComplexMatrix::from_fn(d, cols * 2, |r, c| if c % 2 == 0 { p0[(r, c / 2)] } else { p1[(r, c / 2)] });
        joint = JointState { n_qubits: joint.n_qubits + 1, amps };
        trace.push(joint.clone());
    }
    Ok(trace)
}

/// Runs the chain `V[n] ⋯ V[1] |ancilla_init⟩`, emitting one qubit per step.
pub fn run_chain(steps: &[IsometryStep], ancilla_init: &ComplexVector) -> Result<JointState> {
    match run_chain_trace(steps, ancilla_init)?.pop() {
        Some(j) => Ok(j),
        None => Ok(JointState {
            n_qubits: 0,
            amps: ComplexMatrix::from_vec(ancilla_init.dim(), 1, ancilla_init.as_slice().to_vec())?,
        }),
    }
}

/// Splits a decoupled joint state into `φ_F ⊗ emitted`.
///
/// `φ_F` is the dominant ancilla direction with its largest entry made real
/// and positive; `emitted = (⟨φ_F| ⊗ 1)|joint⟩`. Fails when the ancilla purity
/// is below `1 − tol`.
pub fn extract_final_ancilla(joint: &JointState, tol: f64) -> Result<(ComplexVector, PureState)> {
    let purity = joint.ancilla_purity();
    if purity < 1.0 - tol {
        return Err(Error::NotDecoupled { purity });
    }
    let dec = svd(&joint.amps)?;
    let phi = dec.u.column(0).fix_phase();
    let emitted = joint.project_ancilla(&phi)?;
    Ok((phi, emitted))
}

fn check_unit(v: &ComplexVector) -> Result<()> {
    let n = v.norm();
    if (n - 1.0).abs() > 1e-12 {
        return Err(Error::NotNormalized(n));
    }
    Ok(())
}

/// The two doubled-ancilla measurement vectors `|0⟩⊗φ_F⁰` and `|1⟩⊗φ_F¹`.
pub fn branch_vectors(phi_f0: &ComplexVector, phi_f1: &ComplexVector) -> Result<(ComplexVector, ComplexVector)> {
    check_unit(phi_f0)?;
    check_unit(phi_f1)?;
    if phi_f0.dim() != phi_f1.dim() {
        return Err(Error::DimensionMismatch {
            op: "branch_vectors",
            detail: format!("{} vs {}", phi_f0.dim(), phi_f1.dim()),
        });
    }
    Ok((ComplexVector::basis(2, 0).kron(phi_f0), ComplexVector::basis(2, 1).kron(phi_f1)))
}

/// Unitary on the doubled ancilla with
/// `|0⟩⊗φ_F⁰ ↦ (|0⟩⊗φ_F⁰ + |1⟩⊗φ_F¹)/√2` and
/// `|1⟩⊗φ_F¹ ↦ (|0⟩⊗φ_F⁰ − |1⟩⊗φ_F¹)/√2`, identity on the orthogonal
/// complement (spanned by Gram–Schmidt over the standard basis).
pub fn generalized_hadamard(phi_f0: &ComplexVector, phi_f1: &ComplexVector) -> Result<ComplexMatrix> {
    let (b0, b1) = branch_vectors(phi_f0, phi_f1)?;
    let dim = b0.dim();
    let mut basis = vec![b0, b1];
    let rest = orthonormal_completion(&basis, dim, dim - 2);
    basis.extend(rest);
    let mut q = ComplexMatrix::zeros(dim, dim);
    for (j, v) in basis.iter().enumerate() {
        q.set_column(j, v);
    }
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    let mut core = ComplexMatrix::identity(dim);
    core[(0, 0)] = h;
    core[(0, 1)] = h;
    core[(1, 0)] = h;
    core[(1, 1)] = -h;
    q.matmul(&core)?.matmul(&q.adjoint())
}

/// How the measurement outcome of stage 4 is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchPolicy {
    /// Sample from the Born probabilities with the run's seeded generator.
    Random,
    Forced0,
    Forced1,
}

#[derive(Clone, Debug)]
pub struct Measurement {
    pub branch: u8,
    /// Normalized emitted state after the phase correction.
    pub emitted: PureState,
    pub probabilities: [f64; 2],
}

/// Measures the doubled ancilla in `{|0⟩⊗φ_F⁰, |1⟩⊗φ_F¹}` and applies `Z` to
/// every emitted qubit on outcome 1.
pub fn measure_and_correct(
    joint: &JointState,
    phi_f0: &ComplexVector,
    phi_f1: &ComplexVector,
    policy: BranchPolicy,
    rng: &mut impl Rng,
    tol: f64,
) -> Result<Measurement> {
    let (b0, b1) = branch_vectors(phi_f0, phi_f1)?;
    let n2 = joint.norm().powi(2);
    let outcomes = [joint.project_ancilla(&b0)?, joint.project_ancilla(&b1)?];
    let probabilities = [outcomes[0].norm().powi(2) / n2, outcomes[1].norm().powi(2) / n2];
    let sum = probabilities[0] + probabilities[1];
    if (sum - 1.0).abs() > tol {
        return Err(Error::ProbabilityLeak { sum });
    }
    let branch: u8 = match policy {
        BranchPolicy::Forced0 => 0,
        BranchPolicy::Forced1 => 1,
        BranchPolicy::Random => u8::from(rng.gen::<f64>() >= probabilities[0]),
    };
    if probabilities[branch as usize] <= 0.0 {
        return Err(Error::InvalidArgument(format!("measurement branch {branch} has zero probability")));
    }
    let mut emitted = outcomes[branch as usize].normalized();
    if branch == 1 {
        let all: Vec<usize> = (0..emitted.n_qubits()).collect();
        emitted = apply_local_phase_gate(&emitted, &all)?;
    }
    Ok(Measurement { branch, emitted, probabilities })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Universal,
    PhaseCovariant,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Universal => "universal",
            Mode::PhaseCovariant => "phase-covariant",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub mode: Mode,
    pub m: usize,
    pub branch_policy: BranchPolicy,
    pub rng_seed: u64,
    /// Rank and decoupling tolerance.
    pub tol: f64,
}

impl ProtocolConfig {
    pub fn new(mode: Mode, m: usize) -> Self {
        Self { mode, m, branch_policy: BranchPolicy::Random, rng_seed: 42, tol: crate::DEFAULT_TOL }
    }

    pub fn with_policy(mut self, policy: BranchPolicy) -> Self {
        self.branch_policy = policy;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn validate(&self, q: Option<&BlochQubit>) -> Result<()> {
        if self.m < 1 {
            return Err(Error::InvalidArgument("the clone count must be at least 1".into()));
        }
        if self.m > MAX_CLONES {
            return Err(Error::TooManyClones { m: self.m, cap: MAX_CLONES });
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::InvalidArgument(format!("tolerance {} outside (0, 1)", self.tol)));
        }
        if self.mode == Mode::PhaseCovariant {
            if self.m.is_multiple_of(2) {
                return Err(Error::EvenCloneCount(self.m));
            }
            if let Some(q) = q {
                if (q.theta() - PI / 2.0).abs() > EQUATOR_TOL {
                    return Err(Error::NotEquatorial(q.theta()));
                }
            }
        }
        Ok(())
    }

    /// Coefficients of the single-branch structure: `α` for universal
    /// cloning, `γ` (with `m_eff = (M+1)/2`) for phase-covariant cloning.
    pub fn coefficients(&self) -> Result<CoefficientSequence> {
        match self.mode {
            Mode::Universal => alpha_coeffs(self.m),
            Mode::PhaseCovariant => gamma_coeffs((self.m - 1) / 2),
        }
    }

    /// Directly constructed outputs of the two branches (inputs `|0⟩`, `|1⟩`).
    pub fn branch_targets(&self) -> Result<(PureState, PureState)> {
        match self.mode {
            Mode::Universal => Ok((gm_state(&BlochQubit::zero(), self.m)?, gm_state(&BlochQubit::one(), self.m)?)),
            Mode::PhaseCovariant => {
                let k = (self.m - 1) / 2;
                Ok((dicke(self.m, k)?, dicke(self.m, k + 1)?))
            }
        }
    }
}

/// One named check with its measured value and pinned threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub relation: Relation,
    pub passed: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    AtMost,
    AtLeast,
    Equal,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value, threshold, relation: Relation::AtMost, passed: value <= threshold }
    }

    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value, threshold, relation: Relation::AtLeast, passed: value >= threshold }
    }

    pub fn equal(name: impl Into<String>, value: usize, expected: usize) -> Self {
        Self {
            name: name.into(),
            value: value as f64,
            threshold: expected as f64,
            relation: Relation::Equal,
            passed: value == expected,
        }
    }
}

/// Everything measured during one protocol execution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CloneRunReport {
    pub mode: Mode,
    pub m: usize,
    pub theta: f64,
    pub phi: f64,
    pub branch_policy: BranchPolicy,
    pub rng_seed: u64,
    pub tol: f64,
    /// Ancilla dimension of a single branch.
    pub d_single: usize,
    /// Dimension of the doubled ancilla.
    pub d_total: usize,
    pub branch_probabilities: [f64; 2],
    pub branch_taken: u8,
    pub per_clone_fidelity: Vec<f64>,
    /// `(2M+1)/(3M)` for universal cloning; for phase-covariant cloning the
    /// single-qubit fidelity of the directly constructed target.
    pub theory_fidelity: f64,
    /// `|⟨α·T₀ + β·T₁ | output⟩|` with directly constructed targets `T₀, T₁`.
    pub output_overlap_modulus: f64,
    /// `|⟨output after outcome 0 | output after outcome 1⟩|`.
    pub branch_agreement: f64,
    /// Smallest final ancilla purity of the two single-branch chains.
    pub ancilla_purity_final: f64,
    /// Ancilla purity right after the clone qubits were emitted
    /// (absent when the chain has a single step).
    pub ancilla_purity_mid: Option<f64>,
    pub max_isometry_defect: f64,
    pub max_norm_deviation: f64,
    pub hadamard_unitarity_defect: f64,
    /// Bond dimension of the branch-0 target.
    pub chi_observed: usize,
    /// Bond dimension of the protocol output.
    pub chi_output: usize,
    pub phi_f0: ComplexVector,
    pub phi_f1: ComplexVector,
    pub checks: Vec<Check>,
}

impl CloneRunReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Thresholds pinned for the per-run checks.
pub mod thresholds {
    pub const FIDELITY: f64 = 1e-9;
    pub const OUTPUT_OVERLAP: f64 = 1e-9;
    pub const BRANCH_PROBABILITY: f64 = 1e-10;
    pub const BRANCH_AGREEMENT: f64 = 1e-10;
    pub const FINAL_PURITY: f64 = 1e-10;
    pub const MID_PURITY_GAP: f64 = 1e-3;
    pub const ISOMETRY: f64 = 1e-10;
    pub const NORM: f64 = 1e-10;
    pub const UNITARITY: f64 = 1e-11;
}

fn chi_of(s: &PureState, tol: f64) -> Result<usize> {
    if s.n_qubits() < 2 {
        Ok(1)
    } else {
        max_chi(s, tol)
    }
}

/// Executes the whole protocol on input `q` and measures every invariant.
pub fn clone(config: &ProtocolConfig, q: &BlochQubit) -> Result<CloneRunReport> {
    Ok(clone_with_output(config, q)?.0)
}

/// Like [`clone`], also returning the corrected emitted state.
pub fn clone_with_output(config: &ProtocolConfig, q: &BlochQubit) -> Result<(CloneRunReport, PureState)> {
    config.validate(Some(q))?;
    let tol = config.tol;
    let coeffs = config.coefficients()?;
    let d_single = coeffs.m_eff();
    let (target0, target1) = config.branch_targets()?;

    let steps0 = table1_isometries(&coeffs)?;
    let steps1 = flipped_isometries(&steps0);
    let e0 = ComplexVector::basis(d_single, 0);

    let trace0 = run_chain_trace(&steps0, &e0)?;
    let trace1 = run_chain_trace(&steps1, &e0)?;
    let last = |t: &[JointState]| t.last().cloned().expect("at least one step");
    let (phi_f0, _) = extract_final_ancilla(&last(&trace0), tol)?;
    let (phi_f1, _) = extract_final_ancilla(&last(&trace1), tol)?;
    let ancilla_purity_final = last(&trace0).ancilla_purity().min(last(&trace1).ancilla_purity());
    let ancilla_purity_mid = (d_single >= 2).then(|| trace0[d_single - 1].ancilla_purity());

    let doubled = doubled_isometries(&steps0, &steps1)?;
    let max_isometry_defect = doubled.iter().map(isometry_defect).fold(0.0, f64::max);
    let (alpha, beta) = q.amplitudes();
    let init = ComplexVector::new(vec![alpha, beta]).kron(&e0);
    let trace = run_chain_trace(&doubled, &init)?;
    let max_norm_deviation = trace.iter().map(|j| (j.norm() - 1.0).abs()).fold(0.0, f64::max);
    let joint = last(&trace);

    let hadamard = generalized_hadamard(&phi_f0, &phi_f1)?;
    let hadamard_unitarity_defect =
        hadamard.adjoint().matmul(&hadamard)?.sub(&ComplexMatrix::identity(hadamard.rows()))?.frobenius_norm();
    let joint = joint.apply_ancilla(&hadamard)?;

    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let meas = measure_and_correct(&joint, &phi_f0, &phi_f1, config.branch_policy, &mut rng, tol)?;
    let other_policy = if meas.branch == 0 { BranchPolicy::Forced1 } else { BranchPolicy::Forced0 };
    let other = measure_and_correct(&joint, &phi_f0, &phi_f1, other_policy, &mut rng, tol)?;
    let branch_agreement = overlap(&meas.emitted, &other.emitted)?.norm();

    let expected = target0.superpose(alpha, &target1, beta)?.normalized();
    let output_overlap_modulus = overlap(&expected, &meas.emitted)?.norm();

    let psi = q.psi();
    let per_clone_fidelity = (0..config.m)
        .map(|c| fidelity_pure(&reduced_density(&meas.emitted, &[c])?, &psi))
        .collect::<Result<Vec<_>>>()?;
    let theory_fidelity = match config.mode {
        Mode::Universal => gm_fidelity(config.m),
        Mode::PhaseCovariant => {
            let direct = pc_state(q.phi(), config.m)?;
            fidelity_pure(&reduced_density(&direct, &[0])?, &psi)?
        }
    };

    let chi_observed = chi_of(&target0, tol)?;
    let chi_output = chi_of(&meas.emitted, tol)?;
    let d_total = 2 * d_single;
    let expected_d_total = match config.mode {
        Mode::Universal => 2 * config.m,
        Mode::PhaseCovariant => config.m + 1,
    };

    use thresholds as t;
    let fidelity_error = per_clone_fidelity.iter().map(|f| (f - theory_fidelity).abs()).fold(0.0, f64::max);
    let half_error = meas.probabilities.iter().map(|p| (p - 0.5).abs()).fold(0.0, f64::max);
    let mut checks = vec![
        Check::at_most("clone_fidelity_error", fidelity_error, t::FIDELITY),
        Check::at_most("output_overlap_gap", 1.0 - output_overlap_modulus, t::OUTPUT_OVERLAP),
        Check::at_most(
            "branch_probability_sum_error",
            (meas.probabilities[0] + meas.probabilities[1] - 1.0).abs(),
            t::BRANCH_PROBABILITY,
        ),
        Check::at_most("branch_probability_half_error", half_error, t::BRANCH_PROBABILITY),
        Check::at_most("branch_agreement_gap", 1.0 - branch_agreement, t::BRANCH_AGREEMENT),
        Check::at_most("final_ancilla_purity_gap", 1.0 - ancilla_purity_final, t::FINAL_PURITY),
        Check::at_most("max_isometry_defect", max_isometry_defect, t::ISOMETRY),
        Check::at_most("max_norm_deviation", max_norm_deviation, t::NORM),
        Check::at_most("hadamard_unitarity_defect", hadamard_unitarity_defect, t::UNITARITY),
        Check::equal("d_total", d_total, expected_d_total),
        Check::equal("chi_observed", chi_observed, d_single),
    ];
    if let Some(p) = ancilla_purity_mid {
        checks.push(Check::at_most("mid_chain_ancilla_purity", p, 1.0 - t::MID_PURITY_GAP));
    }

    let report = CloneRunReport {
        mode: config.mode,
        m: config.m,
        theta: q.theta(),
        phi: q.phi(),
        branch_policy: config.branch_policy,
        rng_seed: config.rng_seed,
        tol,
        d_single,
        d_total,
        branch_probabilities: meas.probabilities,
        branch_taken: meas.branch,
        per_clone_fidelity,
        theory_fidelity,
        output_overlap_modulus,
        branch_agreement,
        ancilla_purity_final,
        ancilla_purity_mid,
        max_isometry_defect,
        max_norm_deviation,
        hadamard_unitarity_defect,
        chi_observed,
        chi_output,
        phi_f0,
        phi_f1,
        checks,
    };
    Ok((report, meas.emitted))
}
