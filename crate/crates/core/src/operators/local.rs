//! Single-site operator matrices in the local basis order of
//! [`crate::basis::LocalDim`].

use std::f64::consts::FRAC_1_SQRT_2;

use faer::Mat;
use num_complex::Complex64;

use crate::basis::LocalDim;
use crate::linalg;
use crate::Result;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A `d x d` matrix acting on one site, stored row-major together with a
/// column-wise sparse pattern used for fast application to configurations.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalOp {
    dim: usize,
    entries: Vec<Complex64>,
    columns: Vec<Vec<(u8, Complex64)>>,
    diagonal: bool,
}

impl LocalOp {
    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                entries.push(f(r, c));
            }
        }
        Self::from_entries(dim, entries)
    }

    pub fn from_entries(dim: usize, entries: Vec<Complex64>) -> Self {
        assert_eq!(entries.len(), dim * dim);
        let columns = (0..dim)
            .map(|c| {
                (0..dim)
                    .filter(|&r| entries[r * dim + c] != ZERO)
                    .map(|r| (r as u8, entries[r * dim + c]))
                    .collect()
            })
            .collect();
        let diagonal = (0..dim).all(|r| (0..dim).all(|c| r == c || entries[r * dim + c] == ZERO));
        Self {
            dim,
            entries,
            columns,
            diagonal,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |r, c| if r == c { ONE } else { ZERO })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    /// Nonzero entries `(row, value)` of column `col`.
    #[inline]
    pub fn column(&self, col: usize) -> &[(u8, Complex64)] {
        &self.columns[col]
    }

    pub fn is_diagonal(&self) -> bool {
        self.diagonal
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&z| z == ZERO)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self.get(c, r).conj())
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self::from_entries(self.dim, self.entries.iter().map(|&z| z * s).collect())
    }

    pub fn matmul(&self, other: &LocalOp) -> Self {
        assert_eq!(self.dim, other.dim);
        Self::from_fn(self.dim, |r, c| {
            (0..self.dim).map(|k| self.get(r, k) * other.get(k, c)).sum()
        })
    }

    pub fn add(&self, other: &LocalOp) -> Self {
        assert_eq!(self.dim, other.dim);
        Self::from_entries(
            self.dim,
            self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        )
    }

    pub fn to_mat(&self) -> Mat<Complex64> {
        Mat::from_fn(self.dim, self.dim, |r, c| self.get(r, c))
    }

    /// Drops entries below `tol` in modulus and snaps near-integer real and
    /// imaginary parts.
    pub fn cleaned(&self, tol: f64) -> Self {
        let snap = |x: f64| {
            let r = x.round();
            if (x - r).abs() < tol {
                r
            } else {
                x
            }
        };
        Self::from_entries(
            self.dim,
            self.entries
                .iter()
                .map(|&z| if z.norm() < tol { ZERO } else { Complex64::new(snap(z.re), snap(z.im)) })
                .collect(),
        )
    }

    /// `exp(i t A)` of a Hermitian local operator.
    pub fn exp_i(&self, t: f64) -> Result<Self> {
        let m = linalg::expm_i_hermitian(&self.to_mat(), t)?;
        Ok(Self::from_fn(self.dim, |r, c| m[(r, c)]).cleaned(1e-14))
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Spin-1 raising operator with unit matrix elements, `|m+1><m|`.
pub fn spin1_plus() -> LocalOp {
    LocalOp::from_fn(3, |r, col| if col == r + 1 { ONE } else { ZERO })
}

pub fn spin1_minus() -> LocalOp {
    spin1_plus().adjoint()
}

pub fn spin1_z() -> LocalOp {
    LocalOp::from_fn(3, |r, col| if r == col { c(1.0 - r as f64) } else { ZERO })
}

/// Standard spin-1 `S^x = (S^+ + S^-)/sqrt(2)` in the unit-element convention.
pub fn spin1_x() -> LocalOp {
    spin1_plus().add(&spin1_minus()).scaled(c(FRAC_1_SQRT_2))
}

pub fn spin1_y() -> LocalOp {
    spin1_plus()
        .add(&spin1_minus().scaled(c(-1.0)))
        .scaled(Complex64::new(0.0, -FRAC_1_SQRT_2))
}

/// Projector onto `m = 0`.
pub fn spin1_zero_projector() -> LocalOp {
    LocalOp::from_fn(3, |r, col| if r == 1 && col == 1 { ONE } else { ZERO })
}

/// Embedded spin-1/2 operator `sigma^+ = (S^+)^2 = |+1><-1|`, and its
/// spin-1/2 counterpart `|up><down|`.
pub fn sigma_plus(local: LocalDim) -> LocalOp {
    match local {
        LocalDim::SpinOne => LocalOp::from_fn(3, |r, col| if r == 0 && col == 2 { ONE } else { ZERO }),
        LocalDim::SpinHalf => LocalOp::from_fn(2, |r, col| if r == 1 && col == 0 { ONE } else { ZERO }),
    }
}

pub fn sigma_minus(local: LocalDim) -> LocalOp {
    sigma_plus(local).adjoint()
}

pub fn sigma_x(local: LocalDim) -> LocalOp {
    sigma_plus(local).add(&sigma_minus(local))
}

pub fn sigma_y(local: LocalDim) -> LocalOp {
    sigma_plus(local)
        .add(&sigma_minus(local).scaled(c(-1.0)))
        .scaled(Complex64::new(0.0, -1.0))
}

/// `[sigma^+, sigma^-]`; equals `S^z` for spin-1.
pub fn sigma_z(local: LocalDim) -> LocalOp {
    let d = local.dim();
    LocalOp::from_fn(d, |r, col| if r == col { c(local.charge(r).signum() as f64) } else { ZERO })
}

/// Projector onto the spin-1/2 `up` state.
pub fn up_projector() -> LocalOp {
    LocalOp::from_fn(2, |r, col| if r == 1 && col == 1 { ONE } else { ZERO })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn commutator(a: &LocalOp, b: &LocalOp) -> LocalOp {
        a.matmul(b).add(&b.matmul(a).scaled(c(-1.0)))
    }

    fn close(a: &LocalOp, b: &LocalOp) -> bool {
        (0..a.dim()).all(|r| (0..a.dim()).all(|col| (a.get(r, col) - b.get(r, col)).norm() < 1e-14))
    }

    #[test]
    fn spin_one_algebra() {
        let (x, y, z) = (spin1_x(), spin1_y(), spin1_z());
        assert!(close(&commutator(&x, &y), &z.scaled(Complex64::new(0.0, 1.0))));
        let casimir = x.matmul(&x).add(&y.matmul(&y)).add(&z.matmul(&z));
        assert!(close(&casimir, &LocalOp::identity(3).scaled(c(2.0))));
    }

    #[test]
    fn sigma_plus_is_squared_raising() {
        assert_eq!(spin1_plus().matmul(&spin1_plus()), sigma_plus(LocalDim::SpinOne));
        assert_eq!(sigma_z(LocalDim::SpinOne), spin1_z());
        let sp = sigma_plus(LocalDim::SpinOne);
        assert_eq!(commutator(&sp, &sp.adjoint()), spin1_z());
    }

    #[test]
    fn pauli_algebra() {
        let l = LocalDim::SpinHalf;
        let lhs = commutator(&sigma_x(l), &sigma_y(l));
        assert!(close(&lhs, &sigma_z(l).scaled(Complex64::new(0.0, 2.0))));
    }

    #[test]
    fn pi_rotation_squares_to_identity() {
        for op in [spin1_x(), spin1_y()] {
            let u = op.exp_i(std::f64::consts::PI).unwrap();
            assert!(close(&u.matmul(&u), &LocalOp::identity(3)));
            for col in 0..3 {
                assert_eq!(u.column(col).len(), 1);
            }
        }
    }
}
