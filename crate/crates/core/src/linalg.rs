//! Dense complex linear algebra.
//!
//! Everything here is small and dense: isometries of dimension ≤ 2·12,
//! coefficient matrices of at most 2^23 entries, density matrices of a few
//! qubits. Storage is row-major `Vec<C64>`.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Maximum number of Jacobi sweeps before [`svd`] gives up.
pub const SVD_MAX_SWEEPS: usize = 60;
/// Convergence threshold of the Jacobi sweeps.
pub const SVD_OFFDIAG_TOL: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ComplexVector {
    data: Vec<C64>,
}

/// Thin singular value decomposition `a = u · diag(s) · vdag`.
///
/// For an `m × n` input with `k = min(m, n)`, `u` is `m × k` with orthonormal
/// columns, `s` has `k` non-negative entries in descending order and `vdag`
/// is `k × n` with orthonormal rows.
#[derive(Clone, Debug)]
pub struct SvdResult {
    pub u: ComplexMatrix,
    pub s: Vec<f64>,
    pub vdag: ComplexMatrix,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                op: "ComplexMatrix::from_vec",
                detail: format!("{} entries for a {rows}x{cols} matrix", data.len()),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from nested rows. All rows must have equal length.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch { op: "ComplexMatrix::from_rows", detail: "ragged rows".into() });
        }
        Ok(Self { rows: rows.len(), cols, data: rows.concat() })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diag(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        ComplexVector::new((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    pub fn set_column(&mut self, j: usize, v: &ComplexVector) {
        for i in 0..self.rows {
            self[(i, j)] = v[i];
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn scale(&self, k: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * k).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, op: &'static str, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        check_same_shape(self, other, op)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        matmul(self, other)
    }

    pub fn mul_vec(&self, v: &ComplexVector) -> Result<ComplexVector> {
        if v.dim() != self.cols {
            return Err(Error::DimensionMismatch {
                op: "mul_vec",
                detail: format!("{}x{} matrix times vector of dim {}", self.rows, self.cols, v.dim()),
            });
        }
        Ok(ComplexVector::new(
            (0..self.rows).map(|i| self.row(i).iter().zip(v.as_slice()).map(|(a, b)| a * b).sum()).collect(),
        ))
    }

    /// Kronecker product; `self` is the more significant factor.
    pub fn kron(&self, other: &Self) -> Self {
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        Self::from_fn(r, c, |i, j| self[(i / other.rows, j / other.cols)] * other[(i % other.rows, j % other.cols)])
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Embeds `self` into the top-left corner of a `rows × cols` zero matrix.
    pub fn embed(&self, rows: usize, cols: usize) -> Result<Self> {
        if rows < self.rows || cols < self.cols {
            return Err(Error::DimensionMismatch {
                op: "embed",
                detail: format!("cannot embed {}x{} into {rows}x{cols}", self.rows, self.cols),
            });
        }
        let mut out = Self::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)];
            }
        }
        Ok(out)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl ComplexVector {
    pub fn new(data: Vec<C64>) -> Self {
        Self { data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { data: vec![ZERO; dim] }
    }

    /// Standard basis vector `e_index` of dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.data[index] = ONE;
        v
    }

    pub fn from_real(data: &[f64]) -> Self {
        Self { data: data.iter().map(|&x| C64::new(x, 0.0)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, C64> {
        self.data.iter()
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Returns `self / ‖self‖`. A zero vector is returned unchanged.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            return self.clone();
        }
        self.scale(C64::new(1.0 / n, 0.0))
    }

    pub fn scale(&self, k: C64) -> Self {
        Self { data: self.data.iter().map(|z| z * k).collect() }
    }

    /// Inner product `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn dot(&self, other: &Self) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { op: "dot", detail: format!("{} vs {}", self.dim(), other.dim()) });
        }
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { op: "add", detail: format!("{} vs {}", self.dim(), other.dim()) });
        }
        Ok(Self { data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() })
    }

    /// Kronecker product; `self` is the more significant factor.
    pub fn kron(&self, other: &Self) -> Self {
        let mut data = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.data {
            data.extend(other.data.iter().map(|b| a * b));
        }
        Self { data }
    }

    /// Multiplies by a unit phase so that the largest-magnitude entry (first
    /// one on ties) is real and positive.
    pub fn fix_phase(&self) -> Self {
        let mut best = 0;
        for (i, z) in self.data.iter().enumerate() {
            if z.norm() > self.data[best].norm() * (1.0 + 1e-12) {
                best = i;
            }
        }
        match self.data.get(best) {
            Some(z) if z.norm() > 0.0 => self.scale(z.conj() / z.norm()),
            _ => self.clone(),
        }
    }
}

impl Index<usize> for ComplexVector {
    type Output = C64;

    fn index(&self, i: usize) -> &C64 {
        &self.data[i]
    }
}

impl IndexMut<usize> for ComplexVector {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.data[i]
    }
}

fn check_same_shape(a: &ComplexMatrix, b: &ComplexMatrix, op: &'static str) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch { op, detail: format!("{:?} vs {:?}", a.shape(), b.shape()) });
    }
    Ok(())
}

pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch {
            op: "matmul",
            detail: format!("{}x{} times {}x{}", a.rows, a.cols, b.rows, b.cols),
        });
    }
    let mut out = ComplexMatrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        let out_row = &mut out.data[i * b.cols..(i + 1) * b.cols];
        for (k, aik) in a.row(i).iter().enumerate() {
            if *aik == ZERO {
                continue;
            }
            for (o, bkj) in out_row.iter_mut().zip(b.row(k)) {
                *o += aik * bkj;
            }
        }
    }
    Ok(out)
}

pub fn adjoint(a: &ComplexMatrix) -> ComplexMatrix {
    a.adjoint()
}

pub fn frobenius_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    Ok(a.sub(b)?.frobenius_norm())
}

/// Number of singular values strictly above `tol × max(s₀, 1)`.
pub fn numeric_rank(s: &[f64], tol: f64) -> usize {
    let scale = s.first().copied().unwrap_or(0.0).max(1.0);
    s.iter().filter(|&&x| x > tol * scale).count()
}

/// Singular value decomposition by one-sided (Hestenes) Jacobi rotations.
///
/// Wide matrices are handled through the adjoint. The column pass stops once
/// every pair of working columns satisfies
/// `|⟨a_p|a_q⟩| ≤ SVD_OFFDIAG_TOL · ‖a_p‖‖a_q‖`, pairs whose product of norms
/// falls below `(SVD_OFFDIAG_TOL · ‖A‖_F)²` being treated as converged.
pub fn svd(a: &ComplexMatrix) -> Result<SvdResult> {
    if a.rows == 0 || a.cols == 0 {
        return Err(Error::InvalidArgument(format!("svd of an empty {}x{} matrix", a.rows, a.cols)));
    }
    if !a.is_finite() {
        return Err(Error::InvalidArgument("svd input contains non-finite entries".into()));
    }
    if a.rows < a.cols {
        let t = svd_tall(&a.adjoint())?;
        return Ok(SvdResult { u: t.vdag.adjoint(), s: t.s, vdag: t.u.adjoint() });
    }
    svd_tall(a)
}

fn svd_tall(a: &ComplexMatrix) -> Result<SvdResult> {
    let (m, n) = a.shape();
    // Work on columns: store the transpose so each column is contiguous.
    let mut w: Vec<Vec<C64>> = (0..n).map(|j| (0..m).map(|i| a[(i, j)]).collect()).collect();
    let mut v: Vec<Vec<C64>> = (0..n).map(|j| ComplexVector::basis(n, j).into_vec()).collect();
    let floor = (SVD_OFFDIAG_TOL * a.frobenius_norm()).powi(2);

    let mut converged = n < 2;
    let mut residual = 0.0_f64;
    for _ in 0..SVD_MAX_SWEEPS {
        if converged {
            break;
        }
        residual = 0.0;
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let alpha: f64 = w[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = w[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: C64 = w[p].iter().zip(&w[q]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                let scale = (alpha * beta).sqrt();
                if scale <= floor || g <= SVD_OFFDIAG_TOL * scale {
                    continue;
                }
                residual = residual.max(g / scale);
                rotated = true;
                // Rotate column q by the phase of gamma so the pair has a real
                // positive overlap, then apply a real Jacobi rotation.
                let phase = gamma.conj() / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_pair(&mut w, p, q, phase, c, s);
                rotate_pair(&mut v, p, q, phase, c, s);
            }
        }
        if !rotated {
            converged = true;
        }
    }
    if !converged {
        return Err(Error::SvdNoConvergence { sweeps: SVD_MAX_SWEEPS, residual });
    }

    let norms: Vec<f64> = w.iter().map(|col| col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let s: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let smax = s[0];
    let mut u_cols: Vec<ComplexVector> = Vec::with_capacity(n);
    let mut zero_slots = Vec::new();
    for (k, &j) in order.iter().enumerate() {
        // Columns whose norm is at rounding level carry no direction; they
        // are replaced by an orthonormal completion below.
        if norms[j] > smax * f64::EPSILON * (m as f64) && norms[j] > 0.0 {
            let inv = C64::new(1.0 / norms[j], 0.0);
            u_cols.push(ComplexVector::new(w[j].iter().map(|z| z * inv).collect()));
        } else {
            u_cols.push(ComplexVector::zeros(m));
            zero_slots.push(k);
        }
    }
    if !zero_slots.is_empty() {
        let kept: Vec<ComplexVector> =
            u_cols.iter().enumerate().filter(|(k, _)| !zero_slots.contains(k)).map(|(_, c)| c.clone()).collect();
        let completion = orthonormal_completion(&kept, m, zero_slots.len());
        for (slot, col) in zero_slots.iter().zip(completion) {
            u_cols[*slot] = col;
        }
    }

    let mut u = ComplexMatrix::zeros(m, n);
    for (k, col) in u_cols.iter().enumerate() {
        u.set_column(k, col);
    }
    let mut vdag = ComplexMatrix::zeros(n, n);
    for (k, &j) in order.iter().enumerate() {
        for (i, z) in v[j].iter().enumerate() {
            vdag[(k, i)] = z.conj();
        }
    }
    Ok(SvdResult { u, s, vdag })
}

fn rotate_pair(cols: &mut [Vec<C64>], p: usize, q: usize, phase: C64, c: f64, s: f64) {
    let (left, right) = cols.split_at_mut(q);
    let (cp, cq) = (&mut left[p], &mut right[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let yp = *y * phase;
        let xp = *x;
        *x = xp * c - yp * s;
        *y = xp * s + yp * c;
    }
}

/// Extends the orthonormal set `basis` (vectors of dimension `dim`) by
/// `count` further orthonormal vectors, obtained by Gram–Schmidt on the
/// standard basis in index order.
pub fn orthonormal_completion(basis: &[ComplexVector], dim: usize, count: usize) -> Vec<ComplexVector> {
    let candidates = (0..dim).map(|i| ComplexVector::basis(dim, i));
    gram_schmidt_extend(basis, candidates, count)
}

/// Gram–Schmidt extension of `basis` using `candidates` in order; candidates
/// that are (numerically) dependent on what is already present are skipped.
pub fn gram_schmidt_extend(
    basis: &[ComplexVector],
    candidates: impl IntoIterator<Item = ComplexVector>,
    count: usize,
) -> Vec<ComplexVector> {
    let mut all: Vec<ComplexVector> = basis.to_vec();
    let mut out = Vec::with_capacity(count);
    for cand in candidates {
        if out.len() == count {
            break;
        }
        let mut r = cand;
        // Two passes of classical Gram-Schmidt keep orthogonality at rounding level.
        for _ in 0..2 {
            for b in &all {
                let c = b.dot(&r).expect("equal dimensions");
                for (ri, bi) in r.as_mut_slice().iter_mut().zip(b.iter()) {
                    *ri -= c * bi;
                }
            }
        }
        let nrm = r.norm();
        if nrm > 1e-8 {
            let r = r.scale(C64::new(1.0 / nrm, 0.0));
            all.push(r.clone());
            out.push(r);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn reconstruct(r: &SvdResult) -> ComplexMatrix {
        let s: Vec<C64> = r.s.iter().map(|&x| c(x, 0.0)).collect();
        r.u.matmul(&ComplexMatrix::diag(&s)).unwrap().matmul(&r.vdag).unwrap()
    }

    // Independent triple-loop product used to re-check hand-multiplied values.
    fn naive_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::from_fn(a.rows(), b.cols(), |i, j| (0..a.cols()).map(|k| a[(i, k)] * b[(k, j)]).sum())
    }

    #[test]
    fn matmul_identity_and_pauli_x() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(matmul(&i2, &i2).unwrap(), i2);
        let x = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        assert_eq!(matmul(&x, &x).unwrap(), i2);
    }

    #[test]
    fn matmul_hand_example() {
        let a = ComplexMatrix::from_rows(&[vec![c(1., 0.), c(0., 1.)], vec![c(0., 0.), c(1., 0.)]]).unwrap();
        let b = ComplexMatrix::from_rows(&[vec![c(1., 0.), c(0., 0.)], vec![c(0., 1.), c(1., 0.)]]).unwrap();
        let expected = ComplexMatrix::from_rows(&[vec![c(0., 0.), c(0., 1.)], vec![c(0., 1.), c(1., 0.)]]).unwrap();
        assert_eq!(matmul(&a, &b).unwrap(), expected);
        assert_eq!(naive_product(&a, &b), expected);
    }

    #[test]
    fn matmul_shape_mismatch() {
        let a = ComplexMatrix::zeros(2, 3);
        assert!(matches!(matmul(&a, &a), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn adjoint_cases() {
        let a = ComplexMatrix::from_vec(1, 1, vec![c(0., 1.)]).unwrap();
        assert_eq!(adjoint(&a)[(0, 0)], c(0., -1.));
        let sym = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 2.0, 5.0]).unwrap();
        assert_eq!(adjoint(&sym), sym);
    }

    #[test]
    fn frobenius_cases() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(frobenius_distance(&i2, &i2).unwrap(), 0.0);
        assert!((frobenius_distance(&i2, &ComplexMatrix::zeros(2, 2)).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        let a = ComplexMatrix::from_real(2, 2, &[1., 0., 0., 0.]).unwrap();
        let b = ComplexMatrix::from_real(2, 2, &[0., 0., 0., 1.]).unwrap();
        assert!((frobenius_distance(&a, &b).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!(frobenius_distance(&a, &ComplexMatrix::zeros(3, 2)).is_err());
    }

    #[test]
    fn svd_identity() {
        let r = svd(&ComplexMatrix::identity(3)).unwrap();
        for s in &r.s {
            assert!((s - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn svd_swapped_diagonal() {
        let a = ComplexMatrix::from_real(2, 2, &[0.0, 4.0, 3.0, 0.0]).unwrap();
        let r = svd(&a).unwrap();
        assert!((r.s[0] - 4.0).abs() < 1e-14 && (r.s[1] - 3.0).abs() < 1e-14);
        assert!(frobenius_distance(&reconstruct(&r), &a).unwrap() < 1e-13);
    }

    #[test]
    fn svd_rank_one() {
        let a = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 1.0, 1.0]).unwrap();
        let r = svd(&a).unwrap();
        assert!((r.s[0] - 2.0).abs() < 1e-14);
        assert!(r.s[1].abs() < 1e-14);
        // the completed left vector must still be orthonormal
        let g = r.u.adjoint().matmul(&r.u).unwrap();
        assert!(frobenius_distance(&g, &ComplexMatrix::identity(2)).unwrap() < 1e-12);
        assert_eq!(numeric_rank(&r.s, 1e-10), 1);
    }

    #[test]
    fn svd_zero_and_wide() {
        let r = svd(&ComplexMatrix::zeros(2, 5)).unwrap();
        assert_eq!(r.s, vec![0.0, 0.0]);
        assert_eq!(numeric_rank(&r.s, 1e-10), 0);
        assert_eq!(r.u.shape(), (2, 2));
        assert_eq!(r.vdag.shape(), (2, 5));
    }

    #[test]
    fn svd_rejects_empty_and_nan() {
        assert!(svd(&ComplexMatrix::zeros(0, 3)).is_err());
        let a = ComplexMatrix::from_real(1, 1, &[f64::NAN]).unwrap();
        assert!(svd(&a).is_err());
    }

    #[test]
    fn numeric_rank_threshold() {
        assert_eq!(numeric_rank(&[1.0, 1e-15], 1e-10), 1);
        assert_eq!(numeric_rank(&[0.0, 0.0, 0.0], 1e-10), 0);
        assert_eq!(numeric_rank(&[], 1e-10), 0);
        // relative to the largest value once it exceeds one
        assert_eq!(numeric_rank(&[1e6, 1e-5], 1e-10), 1);
    }

    #[test]
    fn kron_of_vectors_puts_left_factor_high() {
        let e0 = ComplexVector::basis(2, 0);
        let e1 = ComplexVector::basis(2, 1);
        assert_eq!(e0.kron(&e1), ComplexVector::basis(4, 1));
        assert_eq!(e1.kron(&e0), ComplexVector::basis(4, 2));
    }

    #[test]
    fn completion_is_orthonormal() {
        let v = ComplexVector::from_real(&[1.0, 1.0, 0.0]).normalized();
        let rest = orthonormal_completion(std::slice::from_ref(&v), 3, 2);
        assert_eq!(rest.len(), 2);
        for r in &rest {
            assert!(v.dot(r).unwrap().norm() < 1e-14);
            assert!((r.norm() - 1.0).abs() < 1e-14);
        }
        assert!(rest[0].dot(&rest[1]).unwrap().norm() < 1e-14);
    }
}
