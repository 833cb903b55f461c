//! Dense linear-algebra helpers shared by the propagators and diagnostics.

use faer::{Mat, Side};
use num_complex::Complex64;

use crate::{Error, Result};

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Column `j` is the eigenvector belonging to `values[j]`.
    pub vectors: Mat<Complex64>,
}

pub fn eigh(matrix: &Mat<Complex64>) -> Result<HermitianEigen> {
    if matrix.nrows() == 0 {
        return Ok(HermitianEigen {
            values: Vec::new(),
            vectors: Mat::zeros(0, 0),
        });
    }
    let evd = matrix
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let n = matrix.nrows();
    let values = (0..n).map(|j| evd.S()[j].re).collect();
    Ok(HermitianEigen {
        values,
        vectors: evd.U().to_owned(),
    })
}

pub fn eigvalsh(matrix: &Mat<Complex64>) -> Result<Vec<f64>> {
    if matrix.nrows() == 0 {
        return Ok(Vec::new());
    }
    matrix
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Eigen(format!("{e:?}")))
}

/// Eigendecomposition of a real symmetric matrix, eigenvalues ascending.
pub fn eigh_real(matrix: &Mat<f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    let n = matrix.nrows();
    if n == 0 {
        return Ok((Vec::new(), Mat::zeros(0, 0)));
    }
    let evd = matrix
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let values = (0..n).map(|j| evd.S()[j]).collect();
    Ok((values, evd.U().to_owned()))
}

/// `exp(i t A)` for a small Hermitian matrix `A`.
pub fn expm_i_hermitian(matrix: &Mat<Complex64>, t: f64) -> Result<Mat<Complex64>> {
    let eig = eigh(matrix)?;
    let n = matrix.nrows();
    let u = &eig.vectors;
    Ok(Mat::from_fn(n, n, |i, j| {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, &e) in eig.values.iter().enumerate() {
            acc += u[(i, k)] * Complex64::from_polar(1.0, t * e) * u[(j, k)].conj();
        }
        acc
    }))
}

/// Hermitian inner product `<a|b>`.
#[inline]
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(Complex64::new(0.0, 0.0), |acc, (x, y)| acc + x.conj() * y)
}

#[inline]
pub fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `y += alpha * x`
#[inline]
pub fn axpy(alpha: Complex64, x: &[Complex64], y: &mut [Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Euclidean distance between two vectors.
pub fn distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Moore-Penrose style solve of `sigma * c = g` for a real symmetric
/// positive-semidefinite `sigma`; eigen-directions with eigenvalue below
/// `rel_cutoff * max_eigenvalue` are discarded.
///
/// Returns the solution together with the norm of the part of `g` that lies
/// in the discarded subspace.
pub fn pinv_solve_psd(sigma: &Mat<f64>, g: &[f64], rel_cutoff: f64) -> Result<(Vec<f64>, f64)> {
    let k = g.len();
    let (values, vectors) = eigh_real(sigma)?;
    let max_ev = values.iter().cloned().fold(0.0_f64, f64::max);
    let cut = rel_cutoff * max_ev;
    let mut solution = vec![0.0; k];
    let mut null_sq = 0.0;
    for (j, &ev) in values.iter().enumerate() {
        let proj: f64 = (0..k).map(|i| vectors[(i, j)] * g[i]).sum();
        if ev > cut && ev > 0.0 {
            for (i, s) in solution.iter_mut().enumerate() {
                *s += vectors[(i, j)] * proj / ev;
            }
        } else {
            null_sq += proj * proj;
        }
    }
    Ok((solution, null_sq.sqrt()))
}
