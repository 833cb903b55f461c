//! Dicke scar towers of the spin-1 chain, rotated scars and two-axis
//! twisting.
//!
//! The states with every site in `m = +-1` form an embedded spin-1/2 chain.
//! Its permutation-symmetric states `|Psi(s)>`, with `s` sites up, are the
//! Dicke states; the collective operators `J^mu = (1/2) sum sigma^mu` act on
//! them as a spin `N/2` with `J^z = s - N/2`.

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{HilbertSpace, LocalDim, SectorBasis, StateVector};
use crate::evolution::krylov::{expm_multiply, KrylovSettings};
use crate::evolution::moments;
use crate::linalg;
use crate::operators::{collective_ops, spin1_interaction, Axis, CouplingMap, Leakage, SiteSelection, SparseOperator};
use crate::{Error, Result};

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `|Psi(s)>` in the full spin-1 basis.
pub fn dicke_state(space: &HilbertSpace, s: usize) -> Result<StateVector> {
    if space.local() != LocalDim::SpinOne {
        return Err(Error::InvalidSpace("Dicke scars live on a spin-1 chain".into()));
    }
    let n = space.num_sites();
    if s > n {
        return Err(Error::InvalidParameter(format!("Dicke index {s} exceeds N = {n}")));
    }
    let amp = Complex64::new(binomial(n, s).sqrt().recip(), 0.0);
    let mut out = vec![Complex64::new(0.0, 0.0); space.dim()];
    // bit n of `mask` set means site n at m = +1 (digit 0), else m = -1 (digit 2)
    for mask in 0u64..(1u64 << n) {
        if mask.count_ones() as usize != s {
            continue;
        }
        let mut config = 0u64;
        for site in 0..n {
            let digit = if mask >> site & 1 == 1 { 0 } else { 2 };
            config = space.with_digit(config, site, digit);
        }
        out[config as usize] = amp;
    }
    Ok(StateVector::from_amplitudes(out))
}

/// The scar tower `|Psi(0)>..|Psi(N)>` expressed in a working basis.
#[derive(Clone, Debug)]
pub struct DickeBasis {
    num_sites: usize,
    states: Vec<StateVector>,
}

impl DickeBasis {
    pub fn full(space: &HilbertSpace) -> Result<Self> {
        Self::in_basis(&SectorBasis::full(space))
    }

    /// Fails when the sector does not contain the tower.
    pub fn in_basis(basis: &SectorBasis) -> Result<Self> {
        let space = basis.space();
        let states = (0..=space.num_sites())
            .map(|s| crate::metrology::protocols::restrict_exact(basis, &dicke_state(space, s)?))
            .collect::<Result<_>>()?;
        Ok(Self {
            num_sites: space.num_sites(),
            states,
        })
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    pub fn state(&self, s: usize) -> &StateVector {
        &self.states[s]
    }

    /// Scar energy `omega (s - N/2)` under `H_0`.
    pub fn energy(&self, omega: f64, s: usize) -> f64 {
        omega * (s as f64 - self.num_sites as f64 / 2.0)
    }

    /// Amplitudes `<Psi(s)|psi>`.
    pub fn coefficients(&self, psi: &StateVector) -> Result<Vec<Complex64>> {
        self.states.iter().map(|d| check(d, psi).map(|_| d.inner(psi))).collect()
    }

    /// Embeds tower coefficients back into the working basis.
    pub fn synthesize(&self, coefficients: &[Complex64]) -> Result<StateVector> {
        if coefficients.len() != self.states.len() {
            return Err(Error::DimensionMismatch { expected: self.states.len(), found: coefficients.len() });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.states[0].dim()];
        for (c, d) in coefficients.iter().zip(&self.states) {
            linalg::axpy(*c, d.amplitudes(), &mut out);
        }
        Ok(StateVector::from_amplitudes(out))
    }
}

fn check(a: &StateVector, b: &StateVector) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    Ok(())
}

/// `max_s ||H_int(phi) |Psi(s)>||` in the full basis.
pub fn verify_annihilation(couplings: &CouplingMap, phi: f64) -> Result<f64> {
    let space = HilbertSpace::spin_one(couplings.num_sites(), couplings.boundary())?;
    let h = spin1_interaction(&space, couplings, phi)?;
    let mut worst: f64 = 0.0;
    for s in 0..=space.num_sites() {
        let d = dicke_state(&space, s)?;
        worst = worst.max(linalg::norm(&h.apply_full(d.amplitudes())?));
    }
    Ok(worst)
}

/// Weight `sum_s |<Psi(s)|psi>|^2` of `psi` in the scar subspace.
pub fn scar_overlap(psi: &StateVector, tower: &DickeBasis) -> Result<f64> {
    Ok(tower.coefficients(psi)?.iter().map(|c| c.norm_sqr()).sum())
}

/// Eigen-residual `||H U|Psi(s)> - E U|Psi(s)>||` of a rotated scar.
///
/// `u` must map the tower into its own span; otherwise the leaked norm is
/// reported as a [`Error::SubspaceViolation`].
pub fn rotated_scar_check(
    tower: &DickeBasis,
    u: &SparseOperator,
    h: &SparseOperator,
    s: usize,
    energy: f64,
) -> Result<f64> {
    if s > tower.num_sites {
        return Err(Error::InvalidParameter(format!("Dicke index {s} exceeds N")));
    }
    for d in tower.states() {
        let image = u.apply_state(d)?;
        let inside = tower.synthesize(&tower.coefficients(&image)?)?;
        let leak = image.distance(&inside);
        if leak > 1e-10 {
            return Err(Error::SubspaceViolation(leak));
        }
    }
    let v = u.apply_state(tower.state(s))?;
    let mut r = h.apply_state(&v)?.into_amplitudes();
    linalg::axpy(Complex64::new(-energy, 0.0), v.amplitudes(), &mut r);
    Ok(linalg::norm(&r))
}

/// Collective operators `J^x, J^y, J^z` on a working basis.
pub fn collective_spin(basis: &SectorBasis) -> Result<[SparseOperator; 3]> {
    Ok([
        collective_ops(basis, SiteSelection::All, Axis::X)?,
        collective_ops(basis, SiteSelection::All, Axis::Y)?,
        collective_ops(basis, SiteSelection::All, Axis::Z)?,
    ])
}

/// Twisting generator `J^y J^z + J^z J^y`.
pub fn twist_generator(basis: &SectorBasis) -> Result<SparseOperator> {
    let [_, jy, jz] = collective_spin(basis)?;
    jy.anticommutator(&jz)?.mark_hermitian(1e-12)
}

/// `exp[i chi (J^y J^z + J^z J^y)] psi` on a working basis.
pub fn two_axis_twist(basis: &SectorBasis, chi: f64, psi: &StateVector) -> Result<StateVector> {
    check(&StateVector::from_amplitudes(vec![Complex64::new(0.0, 0.0); basis.dim()]), psi)?;
    if chi == 0.0 {
        return Ok(psi.clone());
    }
    let g = twist_generator(basis)?;
    let mut apply = |x: &[Complex64], y: &mut [Complex64]| g.apply_into(x, y);
    let settings = KrylovSettings { tolerance: 1e-13, ..KrylovSettings::default() };
    let (out, _) = expm_multiply(&mut apply, psi.amplitudes(), -chi, &settings)?;
    Ok(StateVector::from_amplitudes(out))
}

/// Spin `N/2` matrices in the Dicke index `s = 0..N` (`J^z = s - N/2`).
#[derive(Clone, Debug)]
pub struct SymmetricSpin {
    pub num_sites: usize,
    pub jx: Mat<Complex64>,
    pub jy: Mat<Complex64>,
    pub jz: Mat<Complex64>,
}

impl SymmetricSpin {
    pub fn new(num_sites: usize) -> Self {
        let d = num_sites + 1;
        let j = num_sites as f64 / 2.0;
        // <s+1|J^+|s> = sqrt((s+1)(N-s))
        let plus = |r: usize, c: usize| -> f64 {
            if r == c + 1 {
                ((c as f64 + 1.0) * (num_sites - c) as f64).sqrt()
            } else {
                0.0
            }
        };
        let jx = Mat::from_fn(d, d, |r, c| Complex64::new(0.5 * (plus(r, c) + plus(c, r)), 0.0));
        let jy = Mat::from_fn(d, d, |r, c| Complex64::new(0.0, -0.5 * (plus(r, c) - plus(c, r))));
        let jz = Mat::from_fn(d, d, |r, c| {
            Complex64::new(if r == c { r as f64 - j } else { 0.0 }, 0.0)
        });
        Self { num_sites, jx, jy, jz }
    }

    /// Dicke coefficients of `|+> = 2^{-N/2} sum_s sqrt(C(N, s)) |Psi(s)>`.
    pub fn plus_state(&self) -> Vec<Complex64> {
        let n = self.num_sites;
        let norm = 2f64.powf(-(n as f64) / 2.0);
        (0..=n).map(|s| Complex64::new(norm * binomial(n, s).sqrt(), 0.0)).collect()
    }

    pub fn twist(&self, chi: f64, psi: &[Complex64]) -> Result<Vec<Complex64>> {
        let g = &self.jy * &self.jz + &self.jz * &self.jy;
        let u = linalg::expm_i_hermitian(&g, chi)?;
        Ok((0..psi.len())
            .map(|r| (0..psi.len()).map(|c| u[(r, c)] * psi[c]).sum())
            .collect())
    }

    pub fn report(&self, chi: f64, psi: &[Complex64]) -> Result<SqueezingReport> {
        let ops = [&self.jx, &self.jy, &self.jz];
        let images: Vec<Vec<Complex64>> = ops
            .iter()
            .map(|m| (0..psi.len()).map(|r| (0..psi.len()).map(|c| m[(r, c)] * psi[c]).sum()).collect())
            .collect();
        let mean: Vec<f64> = images.iter().map(|im| linalg::inner(psi, im).re).collect();
        let cov = Mat::from_fn(3, 3, |a, b| linalg::inner(&images[a], &images[b]).re - mean[a] * mean[b]);
        squeezing_from_moments(self.num_sites, chi, [mean[0], mean[1], mean[2]], &cov)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SqueezingReport {
    pub chi: f64,
    /// Unit vector along `<J>`.
    pub mean_direction: [f64; 3],
    pub mean_length: f64,
    /// `min over transverse unit r of Delta(r . J)`.
    pub min_deviation: f64,
    /// Transverse direction achieving the minimum.
    pub squeezed_axis: [f64; 3],
    pub xi: f64,
}

/// Wineland parameter `xi = sqrt(N) min Delta(r . J) / |<J>|` from the
/// mean spin and the symmetrized covariance matrix.
pub fn squeezing_from_moments(num_sites: usize, chi: f64, mean: [f64; 3], cov: &Mat<f64>) -> Result<SqueezingReport> {
    let len = mean.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(len > 1e-12 * num_sites.max(1) as f64) {
        return Err(Error::ZeroMeanSpin);
    }
    let n = mean.map(|x| x / len);
    // any vector not parallel to n seeds the transverse frame
    let seed = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let dot = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let d = dot(seed, n);
    let e1 = {
        let v = [seed[0] - d * n[0], seed[1] - d * n[1], seed[2] - d * n[2]];
        let l = dot(v, v).sqrt();
        v.map(|x| x / l)
    };
    let e2 = [
        n[1] * e1[2] - n[2] * e1[1],
        n[2] * e1[0] - n[0] * e1[2],
        n[0] * e1[1] - n[1] * e1[0],
    ];
    let quad = |a: [f64; 3], b: [f64; 3]| -> f64 {
        (0..3).map(|i| (0..3).map(|j| a[i] * cov[(i, j)] * b[j]).sum::<f64>()).sum()
    };
    let c = Mat::from_fn(2, 2, |i, j| {
        let (a, b) = ([e1, e2][i], [e1, e2][j]);
        quad(a, b)
    });
    let (vals, vecs) = linalg::eigh_real(&c)?;
    let min_var = vals[0].max(0.0);
    let axis = [0, 1, 2].map(|k| vecs[(0, 0)] * e1[k] + vecs[(1, 0)] * e2[k]);
    let min_deviation = min_var.sqrt();
    Ok(SqueezingReport {
        chi,
        mean_direction: n,
        mean_length: len,
        min_deviation,
        squeezed_axis: axis,
        xi: (num_sites as f64).sqrt() * min_deviation / len,
    })
}

/// Squeezing report of a state in a spin-1 working basis.
pub fn wineland_xi(basis: &SectorBasis, psi: &StateVector, chi: f64) -> Result<SqueezingReport> {
    let ops = collective_spin(basis)?;
    let m = moments(psi, &ops)?;
    squeezing_from_moments(basis.space().num_sites(), chi, [m.means[0], m.means[1], m.means[2]], &m.covariance)
}

/// Twisting strength minimizing `xi` for the twisted `|+>` state.
///
/// Twisting with positive `chi` squeezes `J^y`, the quadrature read out by
/// the `O_theta` family after precession about `z` (negative `chi` squeezes
/// `J^z` instead; `xi` is even in `chi`). The scan covers `(0, chi_max]` and
/// the best grid point is refined by golden-section search.
pub fn optimize_twist(spin: &SymmetricSpin, chi_max: f64, scan_points: usize) -> Result<SqueezingReport> {
    if !(chi_max > 0.0) || scan_points < 3 {
        return Err(Error::InvalidParameter("twist scan needs chi_max > 0 and at least 3 points".into()));
    }
    let plus = spin.plus_state();
    let g = &spin.jy * &spin.jz + &spin.jz * &spin.jy;
    let eig = linalg::eigh(&g)?;
    // plus state in the eigenbasis of g, reused for every chi
    let d = plus.len();
    let proj: Vec<Complex64> = (0..d)
        .map(|k| (0..d).map(|r| eig.vectors[(r, k)].conj() * plus[r]).sum())
        .collect();
    let xi_at = |chi: f64| -> Result<SqueezingReport> {
        let psi: Vec<Complex64> = (0..d)
            .map(|r| {
                (0..d)
                    .map(|k| eig.vectors[(r, k)] * Complex64::from_polar(1.0, chi * eig.values[k]) * proj[k])
                    .sum()
            })
            .collect();
        spin.report(chi, &psi)
    };
    let grid: Vec<f64> = (1..=scan_points).map(|i| chi_max * i as f64 / scan_points as f64).collect();
    let mut best = 0;
    let mut values = Vec::with_capacity(grid.len());
    for (i, &c) in grid.iter().enumerate() {
        values.push(xi_at(c)?.xi);
        if values[i] < values[best] {
            best = i;
        }
    }
    let lo = if best == 0 { 0.0 } else { grid[best - 1] };
    let hi = grid[(best + 1).min(grid.len() - 1)];
    let (mut a, mut b) = (lo, hi);
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut c, mut e) = (b - r * (b - a), a + r * (b - a));
    let (mut fc, mut fe) = (xi_at(c)?.xi, xi_at(e)?.xi);
    for _ in 0..80 {
        if (b - a).abs() < 1e-12 * chi_max {
            break;
        }
        if fc <= fe {
            b = e;
            e = c;
            fe = fc;
            c = b - r * (b - a);
            fc = xi_at(c)?.xi;
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + r * (b - a);
            fe = xi_at(e)?.xi;
        }
    }
    let refined = if fc <= fe { c } else { e };
    let report = xi_at(refined)?;
    if report.xi <= values[best] {
        Ok(report)
    } else {
        xi_at(grid[best])
    }
}

/// Sector holding the scar tower and every permutation-symmetric state:
/// even number parity, zero momentum on rings.
pub fn symmetric_sector_basis(space: &HilbertSpace) -> Result<SectorBasis> {
    let mut sector = crate::basis::SymmetrySector::new().with_number_parity(1);
    if space.boundary() == crate::basis::Boundary::Periodic && space.num_sites() > 1 {
        sector = sector.with_momentum(0);
    }
    SectorBasis::new(space, &sector)
}

/// `H_int(phi)` on a working basis, for callers checking annihilation there.
pub fn interaction_operator(basis: &SectorBasis, couplings: &CouplingMap, phi: f64) -> Result<SparseOperator> {
    spin1_interaction(basis.space(), couplings, phi)?.to_hermitian(basis, Leakage::Forbid)
}
