//! Multiqubit pure states.
//!
//! Bit ordering: qubit 0 is the most significant bit of the amplitude index,
//! so for `n` qubits the basis string `|b₀ b₁ … b_{n-1}⟩` sits at index
//! `Σ b_k 2^{n-1-k}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{numeric_rank, svd, ComplexMatrix, ComplexVector, C64, ONE, ZERO};

/// Tolerance on the norm of states that claim to be normalized.
pub const NORM_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: ComplexVector,
}

/// A density matrix over `dim` levels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl PureState {
    /// Wraps an amplitude vector of length `2^n_qubits`. The vector is taken
    /// as given; see [`PureState::normalized`] and [`PureState::check_normalized`].
    pub fn new(n_qubits: usize, amplitudes: ComplexVector) -> Result<Self> {
        if amplitudes.dim() != 1usize << n_qubits {
            return Err(Error::DimensionMismatch {
                op: "PureState::new",
                detail: format!("{} amplitudes for {n_qubits} qubits", amplitudes.dim()),
            });
        }
        Ok(Self { n_qubits, amplitudes })
    }

    /// Infers the qubit count from the amplitude count, which must be a power of two.
    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Result<Self> {
        let len = amplitudes.len();
        if !len.is_power_of_two() {
            return Err(Error::InvalidArgument(format!("{len} amplitudes is not a power of two")));
        }
        Self::new(len.trailing_zeros() as usize, ComplexVector::new(amplitudes))
    }

    /// The zero-qubit state (the scalar 1), the identity for [`tensor`].
    pub fn vacuum() -> Self {
        Self { n_qubits: 0, amplitudes: ComplexVector::basis(1, 0) }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amplitudes[index]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn normalized(&self) -> Self {
        Self { n_qubits: self.n_qubits, amplitudes: self.amplitudes.normalized() }
    }

    pub fn check_normalized(&self) -> Result<()> {
        let n = self.norm();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(n));
        }
        Ok(())
    }

    pub fn scale(&self, k: C64) -> Self {
        Self { n_qubits: self.n_qubits, amplitudes: self.amplitudes.scale(k) }
    }

    /// Unnormalized sum `a·self + b·other`.
    pub fn superpose(&self, a: C64, other: &Self, b: C64) -> Result<Self> {
        check_same_qubits(self, other, "superpose")?;
        Ok(Self { n_qubits: self.n_qubits, amplitudes: self.amplitudes.scale(a).add(&other.amplitudes.scale(b))? })
    }

    /// Applies `X` to every qubit.
    pub fn flip_all(&self) -> Self {
        let mask = (1usize << self.n_qubits) - 1;
        let mut out = ComplexVector::zeros(self.amplitudes.dim());
        for (i, z) in self.amplitudes.iter().enumerate() {
            out[i ^ mask] = *z;
        }
        Self { n_qubits: self.n_qubits, amplitudes: out }
    }

    /// Applies the same single-qubit matrix to every qubit.
    pub fn apply_uniform(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.shape() != (2, 2) {
            return Err(Error::DimensionMismatch {
                op: "apply_uniform",
                detail: format!("single-qubit gate must be 2x2, got {:?}", u.shape()),
            });
        }
        let mut amps = self.amplitudes.clone().into_vec();
        for q in 0..self.n_qubits {
            let bit = 1usize << (self.n_qubits - 1 - q);
            for i in 0..amps.len() {
                if i & bit == 0 {
                    let (a0, a1) = (amps[i], amps[i | bit]);
                    amps[i] = u[(0, 0)] * a0 + u[(0, 1)] * a1;
                    amps[i | bit] = u[(1, 0)] * a0 + u[(1, 1)] * a1;
                }
            }
        }
        Ok(Self { n_qubits: self.n_qubits, amplitudes: ComplexVector::new(amps) })
    }
}

fn check_same_qubits(a: &PureState, b: &PureState, op: &'static str) -> Result<()> {
    if a.n_qubits != b.n_qubits {
        return Err(Error::DimensionMismatch { op, detail: format!("{} vs {} qubits", a.n_qubits, b.n_qubits) });
    }
    Ok(())
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.rows() != matrix.cols() || matrix.rows() == 0 {
            return Err(Error::DimensionMismatch {
                op: "DensityMatrix::new",
                detail: format!("not square: {:?}", matrix.shape()),
            });
        }
        Ok(Self { matrix })
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn pure(psi: &PureState) -> Self {
        let a = psi.amplitudes();
        let d = a.dim();
        Self { matrix: ComplexMatrix::from_fn(d, d, |i, j| a[i] * a[j].conj()) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.matrix.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// Frobenius norm of `ρ − ρ†`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.matrix.sub(&self.matrix.adjoint()).expect("square").frobenius_norm()
    }
}

/// Computational basis state; `bits[k]` is the value of qubit `k`.
pub fn basis_state(n: usize, bits: &[u8]) -> Result<PureState> {
    if bits.len() != n {
        return Err(Error::InvalidArgument(format!("{} bits given for {n} qubits", bits.len())));
    }
    let mut index = 0usize;
    for &b in bits {
        if b > 1 {
            return Err(Error::InvalidArgument(format!("bit value {b} is not 0 or 1")));
        }
        index = (index << 1) | b as usize;
    }
    PureState::new(n, ComplexVector::basis(1 << n, index))
}

/// Dicke state: uniform superposition of all `n`-bit strings with exactly
/// `ones` bits set.
pub fn dicke(n: usize, ones: usize) -> Result<PureState> {
    if ones > n {
        return Err(Error::InvalidArgument(format!("dicke({n}, {ones}): ones exceeds qubit count")));
    }
    let count = (0..1usize << n).filter(|i| i.count_ones() as usize == ones).count();
    let amp = C64::new(1.0 / (count as f64).sqrt(), 0.0);
    let amps = (0..1usize << n).map(|i| if i.count_ones() as usize == ones { amp } else { ZERO }).collect();
    PureState::new(n, ComplexVector::new(amps))
}

/// `a ⊗ b` with `a` on the leading qubits.
pub fn tensor(a: &PureState, b: &PureState) -> PureState {
    PureState { n_qubits: a.n_qubits + b.n_qubits, amplitudes: a.amplitudes.kron(&b.amplitudes) }
}

/// Coefficient matrix of the cut after the first `a` qubits: rows are indexed
/// by qubits `0..a`, columns by qubits `a..n`.
pub fn coefficient_matrix(s: &PureState, a: usize) -> Result<ComplexMatrix> {
    if a == 0 || a >= s.n_qubits {
        return Err(Error::InvalidArgument(format!(
            "cut position {a} outside 1..={} for a {}-qubit state",
            s.n_qubits.saturating_sub(1),
            s.n_qubits
        )));
    }
    // Row-major storage of the amplitude vector is exactly this matrix.
    ComplexMatrix::from_vec(1 << a, 1 << (s.n_qubits - a), s.amplitudes.as_slice().to_vec())
}

/// Schmidt coefficients (singular values of the coefficient matrix) at cut `a`.
pub fn schmidt_values(s: &PureState, a: usize) -> Result<Vec<f64>> {
    Ok(svd(&coefficient_matrix(s, a)?)?.s)
}

pub fn schmidt_rank(s: &PureState, a: usize, tol: f64) -> Result<usize> {
    Ok(numeric_rank(&schmidt_values(s, a)?, tol))
}

/// Largest Schmidt rank over the contiguous cuts `1..n`.
pub fn max_chi(s: &PureState, tol: f64) -> Result<usize> {
    if s.n_qubits < 2 {
        return Err(Error::InvalidArgument(format!("max_chi needs at least 2 qubits, got {}", s.n_qubits)));
    }
    let mut best = 0;
    for a in 1..s.n_qubits {
        best = best.max(schmidt_rank(s, a, tol)?);
    }
    Ok(best)
}

/// Reduced density matrix of the qubits in `keep` (0-based, any order; the
/// kept qubits keep their relative order from the state, sorted ascending).
pub fn reduced_density(s: &PureState, keep: &[usize]) -> Result<DensityMatrix> {
    let n = s.n_qubits;
    if keep.is_empty() {
        return Err(Error::InvalidArgument("reduced_density: empty qubit set".into()));
    }
    let mut kept = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() || kept.iter().any(|&q| q >= n) {
        return Err(Error::InvalidArgument(format!("reduced_density: invalid qubit set {keep:?} for {n} qubits")));
    }
    let traced: Vec<usize> = (0..n).filter(|q| !kept.contains(q)).collect();
    let k = kept.len();
    let dim = 1usize << k;

    // Split each amplitude index into (kept bits, traced bits).
    let compose = |kept_bits: usize, env_bits: usize| -> usize {
        let mut idx = 0usize;
        for (pos, &q) in kept.iter().enumerate() {
            idx |= ((kept_bits >> (k - 1 - pos)) & 1) << (n - 1 - q);
        }
        for (pos, &q) in traced.iter().enumerate() {
            idx |= ((env_bits >> (traced.len() - 1 - pos)) & 1) << (n - 1 - q);
        }
        idx
    };

    let env_dim = 1usize << traced.len();
    let mut rho = ComplexMatrix::zeros(dim, dim);
    for e in 0..env_dim {
        let col: Vec<C64> = (0..dim).map(|r| s.amplitudes[compose(r, e)]).collect();
        for i in 0..dim {
            if col[i] == ZERO {
                continue;
            }
            for j in 0..dim {
                rho[(i, j)] += col[i] * col[j].conj();
            }
        }
    }
    DensityMatrix::new(rho)
}

/// `⟨ψ|ρ|ψ⟩`.
pub fn fidelity_pure(rho: &DensityMatrix, psi: &PureState) -> Result<f64> {
    if rho.dim() != psi.amplitudes.dim() {
        return Err(Error::DimensionMismatch {
            op: "fidelity_pure",
            detail: format!("density matrix dim {} vs state dim {}", rho.dim(), psi.amplitudes.dim()),
        });
    }
    let rp = rho.matrix.mul_vec(&psi.amplitudes)?;
    Ok(psi.amplitudes.dot(&rp)?.re)
}

/// `⟨a|b⟩`.
pub fn overlap(a: &PureState, b: &PureState) -> Result<C64> {
    check_same_qubits(a, b, "overlap")?;
    a.amplitudes.dot(&b.amplitudes)
}

/// Applies `Z` on each listed qubit: every amplitude picks up
/// `(−1)^(number of set bits among those qubits)`.
pub fn apply_local_phase_gate(s: &PureState, qubits: &[usize]) -> Result<PureState> {
    if let Some(&q) = qubits.iter().find(|&&q| q >= s.n_qubits) {
        return Err(Error::InvalidArgument(format!("qubit {q} out of range for {} qubits", s.n_qubits)));
    }
    let mask = qubits.iter().fold(0usize, |m, &q| m | 1 << (s.n_qubits - 1 - q));
    let amps =
        s.amplitudes.iter().enumerate().map(|(i, z)| if (i & mask).count_ones() % 2 == 1 { -z } else { *z }).collect();
    PureState::new(s.n_qubits, ComplexVector::new(amps))
}

/// Single-qubit state `a|0⟩ + b|1⟩`.
pub fn qubit(a: C64, b: C64) -> PureState {
    PureState { n_qubits: 1, amplitudes: ComplexVector::new(vec![a, b]) }
}

/// Value of qubit `qubit` in basis index `index` of an `n`-qubit register.
pub fn bit_at(index: usize, qubit: usize, n: usize) -> usize {
    (index >> (n - 1 - qubit)) & 1
}

/// GHZ state `(|0…0⟩ + |1…1⟩)/√2`.
pub fn ghz(n: usize) -> PureState {
    let mut v = ComplexVector::zeros(1 << n);
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    v[0] = h;
    v[(1 << n) - 1] = if n == 0 { ONE } else { h };
    PureState { n_qubits: n, amplitudes: v }
}
