//! Exact-diagonalization and Krylov toolkit for quantum sensing with
//! many-body scars.
//!
//! The crate covers two sensing models, a spin-1 chain with tunable
//! XX/Dzyaloshinskii-Moriya exchange and a spin-1/2 mixed-field Ising chain,
//! together with the machinery needed to study them:
//!
//! * [`basis`]: Hilbert spaces, product states and symmetry-reduced sectors.
//! * [`operators`]: local operator sums, sparse matrices and model builders.
//! * [`evolution`]: dense-spectral and Krylov propagation, pulse schedules.
//! * [`metrology`]: propagation-of-error estimation, sensing-time
//!   optimization, parameter sweeps and scaling fits.
//! * [`spectral`]: level statistics, eigenstate scans, entanglement entropy.
//! * [`scars`]: Dicke scar towers, rotated scars and two-axis squeezing.
//! * [`control`]: alternating-signal sensing with periodic pi pulses.

pub mod basis;
pub mod control;
pub mod error;
pub mod evolution;
pub mod linalg;
pub mod metrology;
pub mod operators;
pub mod scars;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Builds a complex number from its parts.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
