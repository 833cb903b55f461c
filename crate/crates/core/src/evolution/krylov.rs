//! Lanczos approximation of `exp(-i t H) psi` with adaptive substeps.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg;
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KrylovSettings {
    /// Maximum Lanczos subspace dimension per substep.
    pub subspace: usize,
    /// Bound on the estimated error of each substep.
    pub tolerance: f64,
    /// Substep count after which the propagation is abandoned.
    pub max_substeps: usize,
}

impl Default for KrylovSettings {
    fn default() -> Self {
        Self {
            subspace: 30,
            tolerance: 1e-10,
            max_substeps: 1_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct KrylovStats {
    pub substeps: usize,
    pub matvecs: usize,
    /// Sum of the per-substep error estimates.
    pub error_estimate: f64,
}

/// Computes `exp(-i t H) psi` where `apply(x, y)` writes `y = H x` for a
/// Hermitian `H`.
pub fn expm_multiply(
    apply: &mut dyn FnMut(&[Complex64], &mut [Complex64]),
    psi: &[Complex64],
    t: f64,
    settings: &KrylovSettings,
) -> Result<(Vec<Complex64>, KrylovStats)> {
    let dim = psi.len();
    let mut stats = KrylovStats::default();
    let mut state = psi.to_vec();
    if t == 0.0 || dim == 0 {
        return Ok((state, stats));
    }
    let m_max = settings.subspace.clamp(2, dim.max(2));
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(m_max + 1);
    let mut w = vec![ZERO; dim];
    let sign = t.signum();
    let mut remaining = t.abs();
    while remaining > 0.0 {
        if stats.substeps >= settings.max_substeps {
            return Err(Error::KrylovNonConvergence(format!(
                "{} substeps exhausted with {remaining:e} of {t:e} remaining",
                stats.substeps
            )));
        }
        let beta0 = linalg::norm(&state);
        if beta0 == 0.0 {
            break;
        }
        basis.clear();
        basis.push(state.iter().map(|z| z / beta0).collect());
        let mut alpha: Vec<f64> = Vec::with_capacity(m_max);
        let mut beta: Vec<f64> = Vec::with_capacity(m_max);
        let mut breakdown = false;
        let mut scale: f64 = 0.0;
        for j in 0..m_max {
            apply(&basis[j], &mut w);
            stats.matvecs += 1;
            let a = linalg::inner(&basis[j], &w).re;
            alpha.push(a);
            // full reorthogonalization, two passes
            for _ in 0..2 {
                for v in basis.iter() {
                    let c = linalg::inner(v, &w);
                    linalg::axpy(-c, v, &mut w);
                }
            }
            let b = linalg::norm(&w);
            beta.push(b);
            scale = scale.max(a.abs() + b);
            if b <= 1e-14 * scale {
                breakdown = true;
                break;
            }
            basis.push(w.iter().map(|z| z / b).collect());
        }
        let m = alpha.len();
        let tri = faer::Mat::from_fn(m, m, |r, c| {
            if r == c {
                alpha[r]
            } else if r == c + 1 {
                beta[c]
            } else if c == r + 1 {
                beta[r]
            } else {
                0.0
            }
        });
        let (evals, evecs) = linalg::eigh_real(&tri)?;
        let small = |h: f64| -> Vec<Complex64> {
            (0..m)
                .map(|r| {
                    (0..m)
                        .map(|k| evecs[(r, k)] * evecs[(0, k)] * Complex64::from_polar(1.0, -sign * h * evals[k]))
                        .sum()
                })
                .collect()
        };
        let mut h = remaining;
        let (y, err) = loop {
            let y = small(h);
            let err = if breakdown {
                0.0
            } else {
                beta0 * beta[m - 1] * y[m - 1].norm()
            };
            if err <= settings.tolerance || h < 1e-300 {
                break (y, err);
            }
            h *= 0.5;
        };
        state.iter_mut().for_each(|z| *z = ZERO);
        for (k, v) in basis.iter().take(m).enumerate() {
            linalg::axpy(y[k] * beta0, v, &mut state);
        }
        stats.substeps += 1;
        stats.error_estimate += err;
        remaining = if h >= remaining { 0.0 } else { remaining - h };
    }
    Ok((state, stats))
}
