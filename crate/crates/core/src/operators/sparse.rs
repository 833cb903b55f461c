//! Compressed-sparse-row complex matrices.

use faer::Mat;
use num_complex::Complex64;
use rand::Rng;

use crate::basis::StateVector;
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    values: Vec<Complex64>,
    hermitian: bool,
    unitary: bool,
}

impl SparseOperator {
    /// Builds from `(row, col, value)` triplets; duplicates are summed and
    /// exact zeros dropped.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(u32, u32, Complex64)>) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<Complex64> = Vec::with_capacity(triplets.len());
        let mut rows: Vec<u32> = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            if let (Some(&lr), Some(&lc)) = (rows.last(), col_idx.last()) {
                if lr == r && lc == c {
                    *values.last_mut().unwrap() += v;
                    continue;
                }
            }
            rows.push(r);
            col_idx.push(c);
            values.push(v);
        }
        let mut keep_cols = Vec::with_capacity(col_idx.len());
        let mut keep_vals = Vec::with_capacity(values.len());
        for ((r, c), v) in rows.iter().zip(&col_idx).zip(&values) {
            if *v != ZERO {
                row_ptr[*r as usize + 1] += 1;
                keep_cols.push(*c);
                keep_vals.push(*v);
            }
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            dim,
            row_ptr,
            col_idx: keep_cols,
            values: keep_vals,
            hermitian: false,
            unitary: false,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![Complex64::new(1.0, 0.0); dim])
    }

    pub fn diagonal(diag: &[Complex64]) -> Self {
        let triplets = diag
            .iter()
            .enumerate()
            .map(|(i, &v)| (i as u32, i as u32, v))
            .collect();
        let mut op = Self::from_triplets(diag.len(), triplets);
        op.hermitian = diag.iter().all(|z| z.im == 0.0);
        op
    }

    pub fn zeros(dim: usize) -> Self {
        let mut op = Self::from_triplets(dim, Vec::new());
        op.hermitian = true;
        op
    }

    pub fn from_dense(m: &Mat<Complex64>) -> Self {
        let n = m.nrows();
        let mut t = Vec::new();
        for r in 0..n {
            for c in 0..n {
                if m[(r, c)] != ZERO {
                    t.push((r as u32, c as u32, m[(r, c)]));
                }
            }
        }
        Self::from_triplets(n, t)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    /// Sets the Hermitian flag after checking it entrywise.
    pub fn mark_hermitian(mut self, tol: f64) -> Result<Self> {
        let err = self.hermiticity_error();
        if err > tol {
            return Err(Error::InvalidParameter(format!(
                "operator is not Hermitian (max |A - A^dag| = {err:e})"
            )));
        }
        self.hermitian = true;
        Ok(self)
    }

    /// Sets the unitary flag; callers vouch for the property.
    pub fn mark_unitary(mut self) -> Self {
        self.unitary = true;
        self
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[span.clone()]
            .iter()
            .zip(&self.values[span])
            .map(|(&c, &v)| (c as usize, v))
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.col_idx[span.clone()].binary_search(&(c as u32)) {
            Ok(k) => self.values[span.start + k],
            Err(_) => ZERO,
        }
    }

    /// `y = A x`
    pub fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        for (r, yr) in y.iter_mut().enumerate() {
            let mut acc = ZERO;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.col_idx[k] as usize];
            }
            *yr = acc;
        }
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![ZERO; self.dim];
        self.apply_into(x, &mut y);
        y
    }

    pub fn apply_state(&self, psi: &StateVector) -> Result<StateVector> {
        if psi.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: psi.dim(),
            });
        }
        Ok(StateVector::from_amplitudes(self.apply(psi.amplitudes())))
    }

    pub fn adjoint(&self) -> Self {
        let t = self
            .triplets()
            .map(|(r, c, v)| (c as u32, r as u32, v.conj()))
            .collect();
        let mut out = Self::from_triplets(self.dim, t);
        out.hermitian = self.hermitian;
        out.unitary = self.unitary;
        out
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= s;
        }
        out.hermitian = self.hermitian && s.im == 0.0;
        out.unitary = self.unitary && (s.norm() - 1.0).abs() < 1e-15;
        out
    }

    /// `self + s * other`
    pub fn add_scaled(&self, other: &SparseOperator, s: Complex64) -> Result<Self> {
        self.check_same_dim(other)?;
        let t = self
            .triplets()
            .map(|(r, c, v)| (r as u32, c as u32, v))
            .chain(other.triplets().map(|(r, c, v)| (r as u32, c as u32, s * v)))
            .collect();
        let mut out = Self::from_triplets(self.dim, t);
        out.hermitian = self.hermitian && other.hermitian && s.im == 0.0;
        Ok(out)
    }

    /// Sparse product `self * other`.
    pub fn matmul(&self, other: &SparseOperator) -> Result<Self> {
        self.check_same_dim(other)?;
        let mut t = Vec::new();
        let mut acc = vec![ZERO; self.dim];
        let mut seen = vec![false; self.dim];
        let mut touched: Vec<usize> = Vec::new();
        for r in 0..self.dim {
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    if !seen[c] {
                        seen[c] = true;
                        touched.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            for &c in &touched {
                t.push((r as u32, c as u32, acc[c]));
                acc[c] = ZERO;
                seen[c] = false;
            }
            touched.clear();
        }
        let mut out = Self::from_triplets(self.dim, t);
        out.unitary = self.unitary && other.unitary;
        Ok(out)
    }

    /// `self * other * self^dag`
    pub fn conjugate(&self, other: &SparseOperator) -> Result<Self> {
        let mut out = self.matmul(other)?.matmul(&self.adjoint())?;
        out.hermitian = other.hermitian;
        Ok(out)
    }

    pub fn commutator(&self, other: &SparseOperator) -> Result<Self> {
        let ab = self.matmul(other)?;
        let ba = other.matmul(self)?;
        ab.add_scaled(&ba, Complex64::new(-1.0, 0.0))
    }

    pub fn anticommutator(&self, other: &SparseOperator) -> Result<Self> {
        let ab = self.matmul(other)?;
        let ba = other.matmul(self)?;
        ab.add_scaled(&ba, Complex64::new(1.0, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn diagonal_values(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `A - A^dag`.
    pub fn hermiticity_error(&self) -> f64 {
        self.triplets()
            .map(|(r, c, v)| (v - self.get(c, r).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise difference to another operator.
    pub fn max_difference(&self, other: &SparseOperator) -> Result<f64> {
        Ok(self.add_scaled(other, Complex64::new(-1.0, 0.0))?.max_abs())
    }

    /// `max_j || A^dag A v_j - v_j ||` over `samples` random unit vectors.
    pub fn unitarity_residual<R: Rng>(&self, rng: &mut R, samples: usize) -> f64 {
        let adj = self.adjoint();
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let v = random_unit_vector(rng, self.dim);
            let w = adj.apply(&self.apply(&v));
            worst = worst.max(crate::linalg::distance(&v, &w));
        }
        worst
    }

    pub fn to_dense(&self) -> Mat<Complex64> {
        let mut m = Mat::zeros(self.dim, self.dim);
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v;
        }
        m
    }

    fn check_same_dim(&self, other: &SparseOperator) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }
}

/// Uniformly random unit vector (Gaussian components, normalized).
pub fn random_unit_vector<R: Rng>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..dim)
        .map(|_| {
            // Box-Muller
            let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
            let u2: f64 = rng.random();
            let r = (-2.0 * u1.ln()).sqrt();
            Complex64::from_polar(r, 2.0 * std::f64::consts::PI * u2)
        })
        .collect();
    let n = crate::linalg::norm(&v);
    for z in &mut v {
        *z /= n;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed_and_zeros_dropped() {
        let one = Complex64::new(1.0, 0.0);
        let op = SparseOperator::from_triplets(2, vec![(0, 1, one), (0, 1, one), (1, 0, one), (1, 0, -one)]);
        assert_eq!(op.nnz(), 1);
        assert_eq!(op.get(0, 1), Complex64::new(2.0, 0.0));
    }

    #[test]
    fn product_and_adjoint() {
        let i = Complex64::new(0.0, 1.0);
        let a = SparseOperator::from_triplets(2, vec![(0, 1, i)]);
        let p = a.matmul(&a.adjoint()).unwrap();
        assert_eq!(p.get(0, 0), Complex64::new(1.0, 0.0));
        assert_eq!(p.nnz(), 1);
        let c = a.commutator(&a.adjoint()).unwrap();
        assert_eq!(c.get(1, 1), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn exact_cancellation_in_product() {
        let one = Complex64::new(1.0, 0.0);
        let a = SparseOperator::from_triplets(2, vec![(0, 0, one), (0, 1, one)]);
        let b = SparseOperator::from_triplets(2, vec![(0, 0, one), (1, 0, -one)]);
        assert_eq!(a.matmul(&b).unwrap().nnz(), 0);
    }
}
