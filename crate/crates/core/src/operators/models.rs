//! Hamiltonians, observables and pulses of the two sensing models.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::coupling::CouplingMap;
use super::local::{self, LocalOp};
use super::opsum::{Leakage, OperatorSum};
use super::sparse::SparseOperator;
use crate::basis::{Boundary, HilbertSpace, LocalDim, SectorBasis};
use crate::{Error, Result};

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn require_local(space: &HilbertSpace, local: LocalDim, what: &str) -> Result<()> {
    if space.local() != local {
        return Err(Error::InvalidSpace(format!("{what} needs a {local:?} chain")));
    }
    Ok(())
}

fn require_couplings(space: &HilbertSpace, couplings: &CouplingMap) -> Result<()> {
    if couplings.num_sites() != space.num_sites() {
        return Err(Error::DimensionMismatch {
            expected: space.num_sites(),
            found: couplings.num_sites(),
        });
    }
    Ok(())
}

/// Parameters of the spin-1 model
/// `H = H_0 + H_int + H_D + H_Omega + H_Delta`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spin1Params {
    pub omega: f64,
    pub phi: f64,
    pub couplings: CouplingMap,
    /// `D` in `D sum (S^z)^2`.
    pub anisotropy: f64,
    /// `Omega` in `(Omega/2) sum [e^{i eta} (S^+)^2 + h.c.]`.
    pub transverse: f64,
    pub transverse_phase: f64,
    /// Per-site fields `Delta_n` in `sum Delta_n S^z_n`; empty means none.
    pub disorder: Vec<f64>,
}

impl Spin1Params {
    pub fn new(omega: f64, phi: f64, couplings: CouplingMap) -> Self {
        Self {
            omega,
            phi,
            couplings,
            anisotropy: 0.0,
            transverse: 0.0,
            transverse_phase: 0.0,
            disorder: Vec::new(),
        }
    }
}

/// `(omega/2) sum S^z_n`
pub fn spin1_field(space: &HilbertSpace, omega: f64) -> Result<OperatorSum> {
    require_local(space, LocalDim::SpinOne, "the spin-1 field")?;
    let mut h = OperatorSum::new(space);
    for n in 0..space.num_sites() {
        h.push_real(omega / 2.0, vec![(n, local::spin1_z())])?;
    }
    Ok(h)
}

/// `sum_bonds lambda (e^{i phi} S^+_from S^-_to + h.c.)`
pub fn spin1_interaction(space: &HilbertSpace, couplings: &CouplingMap, phi: f64) -> Result<OperatorSum> {
    require_local(space, LocalDim::SpinOne, "the spin-1 interaction")?;
    require_couplings(space, couplings)?;
    let mut h = OperatorSum::new(space);
    let phase = Complex64::from_polar(1.0, phi);
    for b in couplings.bonds() {
        h.push_with_adjoint(
            phase * b.strength,
            vec![(b.from, local::spin1_plus()), (b.to, local::spin1_minus())],
        )?;
    }
    Ok(h)
}

/// `sum_bonds lambda (S^x S^x' + S^y S^y')`
pub fn spin1_xx(space: &HilbertSpace, couplings: &CouplingMap) -> Result<OperatorSum> {
    require_local(space, LocalDim::SpinOne, "the XX interaction")?;
    require_couplings(space, couplings)?;
    let mut h = OperatorSum::new(space);
    for b in couplings.bonds() {
        h.push_real(b.strength, vec![(b.from, local::spin1_x()), (b.to, local::spin1_x())])?;
        h.push_real(b.strength, vec![(b.from, local::spin1_y()), (b.to, local::spin1_y())])?;
    }
    Ok(h)
}

/// `sum_bonds lambda (S^x S^y' - S^y S^x')`
pub fn spin1_dmi(space: &HilbertSpace, couplings: &CouplingMap) -> Result<OperatorSum> {
    require_local(space, LocalDim::SpinOne, "the DMI")?;
    require_couplings(space, couplings)?;
    let mut h = OperatorSum::new(space);
    for b in couplings.bonds() {
        h.push_real(b.strength, vec![(b.from, local::spin1_x()), (b.to, local::spin1_y())])?;
        h.push_real(-b.strength, vec![(b.from, local::spin1_y()), (b.to, local::spin1_x())])?;
    }
    Ok(h)
}

/// `D sum (S^z_n)^2`
pub fn spin1_anisotropy(space: &HilbertSpace, d: f64) -> Result<OperatorSum> {
    require_local(space, LocalDim::SpinOne, "the anisotropy")?;
    let mut h = OperatorSum::new(space);
    let sz2 = local::spin1_z().matmul(&local::spin1_z());
    for n in 0..space.num_sites() {
        h.push_real(d, vec![(n, sz2.clone())])?;
    }
    Ok(h)
}

/// `(Omega/2) sum [e^{i eta} (S^+)^2 + e^{-i eta} (S^-)^2]`
pub fn spin1_transverse(space: &HilbertSpace, omega_t: f64, eta: f64) -> Result<OperatorSum> {
    require_local(space, LocalDim::SpinOne, "the transverse field")?;
    let mut h = OperatorSum::new(space);
    let c = Complex64::from_polar(omega_t / 2.0, eta);
    for n in 0..space.num_sites() {
        h.push_with_adjoint(c, vec![(n, local::sigma_plus(LocalDim::SpinOne))])?;
    }
    Ok(h)
}

/// `sum Delta_n S^z_n`
pub fn spin1_disorder(space: &HilbertSpace, fields: &[f64]) -> Result<OperatorSum> {
    require_local(space, LocalDim::SpinOne, "the disorder field")?;
    if fields.len() != space.num_sites() {
        return Err(Error::DimensionMismatch {
            expected: space.num_sites(),
            found: fields.len(),
        });
    }
    let mut h = OperatorSum::new(space);
    for (n, &d) in fields.iter().enumerate() {
        h.push_real(d, vec![(n, local::spin1_z())])?;
    }
    Ok(h)
}

/// Everything in [`Spin1Params`] except the field term `H_0`.
pub fn spin1_rest_terms(space: &HilbertSpace, p: &Spin1Params) -> Result<OperatorSum> {
    let mut h = spin1_interaction(space, &p.couplings, p.phi)?;
    h.extend(&spin1_anisotropy(space, p.anisotropy)?)?;
    h.extend(&spin1_transverse(space, p.transverse, p.transverse_phase)?)?;
    if !p.disorder.is_empty() {
        h.extend(&spin1_disorder(space, &p.disorder)?)?;
    }
    Ok(h)
}

pub fn spin1_terms(space: &HilbertSpace, p: &Spin1Params) -> Result<OperatorSum> {
    spin1_field(space, p.omega)?.plus(&spin1_rest_terms(space, p)?)
}

pub fn spin1_hamiltonian(basis: &SectorBasis, p: &Spin1Params) -> Result<SparseOperator> {
    spin1_terms(basis.space(), p)?.to_hermitian(basis, Leakage::Forbid)
}

/// Parameters of the mixed-field Ising chain plus the scar-enhancing
/// perturbation of strength `eta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MfiParams {
    pub omega: f64,
    pub longitudinal: f64,
    pub ising: f64,
    pub eta: f64,
}

fn nearest_neighbor_pairs(space: &HilbertSpace) -> Vec<(usize, usize)> {
    let n = space.num_sites();
    match space.boundary() {
        Boundary::Periodic => (0..n).map(|i| (i, (i + 1) % n)).collect(),
        Boundary::Open => (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect(),
    }
}

fn check_mfi_space(space: &HilbertSpace) -> Result<()> {
    require_local(space, LocalDim::SpinHalf, "the mixed-field Ising model")?;
    if space.boundary() == Boundary::Periodic && space.num_sites() < 3 {
        return Err(Error::InvalidSpace("periodic Ising chains need at least 3 sites".into()));
    }
    Ok(())
}

/// `(omega/2) sum sigma^x` alone: the signal term of the MFI chain.
pub fn transverse_field(space: &HilbertSpace, omega: f64) -> Result<OperatorSum> {
    let mut h = OperatorSum::new(space);
    for n in 0..space.num_sites() {
        h.push_real(omega / 2.0, vec![(n, local::sigma_x(space.local()))])?;
    }
    Ok(h)
}

/// `(Omega/2) sum sigma^z + (lambda/4) sum sigma^z_n sigma^z_{n+1}`
pub fn mfi_rest_terms(space: &HilbertSpace, longitudinal: f64, ising: f64) -> Result<OperatorSum> {
    check_mfi_space(space)?;
    let z = local::sigma_z(LocalDim::SpinHalf);
    let mut h = OperatorSum::new(space);
    for n in 0..space.num_sites() {
        h.push_real(longitudinal / 2.0, vec![(n, z.clone())])?;
    }
    for (a, b) in nearest_neighbor_pairs(space) {
        h.push_real(ising / 4.0, vec![(a, z.clone()), (b, z.clone())])?;
    }
    Ok(h)
}

pub fn mfi_terms(space: &HilbertSpace, p: &MfiParams) -> Result<OperatorSum> {
    transverse_field(space, p.omega)?
        .plus(&mfi_rest_terms(space, p.longitudinal, p.ising)?)?
        .plus(&scar_perturbation_terms(space, p.eta)?)
}

pub fn mfi_hamiltonian(basis: &SectorBasis, p: &MfiParams) -> Result<SparseOperator> {
    mfi_terms(basis.space(), p)?.to_hermitian(basis, Leakage::Forbid)
}

/// `lambda sum |up up><up up|` on nearest-neighbour pairs.
pub fn up_pair_penalty(space: &HilbertSpace, lambda: f64) -> Result<OperatorSum> {
    check_mfi_space(space)?;
    let mut h = OperatorSum::new(space);
    for (a, b) in nearest_neighbor_pairs(space) {
        h.push_real(lambda, vec![(a, local::up_projector()), (b, local::up_projector())])?;
    }
    Ok(h)
}

/// Golden-ratio coefficient `c_d = (g^{d-1} - g^{1-d})^{-2}`.
pub fn golden_coefficient(d: usize) -> f64 {
    let g = (1.0 + 5.0_f64.sqrt()) / 2.0;
    let k = d as i32 - 1;
    let diff = g.powi(k) - g.powi(-k);
    1.0 / (diff * diff)
}

/// `(eta/4) sum_n sum_{d=2}^{N/2} c_d (sigma^x_n sigma^z_{n+d} + sigma^z_n sigma^x_{n+d})`
pub fn scar_perturbation_terms(space: &HilbertSpace, eta: f64) -> Result<OperatorSum> {
    check_mfi_space(space)?;
    let n = space.num_sites();
    let mut h = OperatorSum::new(space);
    if eta == 0.0 {
        return Ok(h);
    }
    if space.boundary() == Boundary::Periodic && n % 2 != 0 {
        return Err(Error::InvalidSpace("the scar perturbation needs an even ring".into()));
    }
    let (x, z) = (local::sigma_x(LocalDim::SpinHalf), local::sigma_z(LocalDim::SpinHalf));
    for site in 0..n {
        for d in 2..=n / 2 {
            let other = match space.boundary() {
                Boundary::Periodic => (site + d) % n,
                Boundary::Open if site + d < n => site + d,
                Boundary::Open => continue,
            };
            let c = eta / 4.0 * golden_coefficient(d);
            h.push_real(c, vec![(site, x.clone()), (other, z.clone())])?;
            h.push_real(c, vec![(site, z.clone()), (other, x.clone())])?;
        }
    }
    Ok(h)
}

pub fn scar_perturbation(basis: &SectorBasis, eta: f64) -> Result<SparseOperator> {
    scar_perturbation_terms(basis.space(), eta)?.to_hermitian(basis, Leakage::Forbid)
}

/// True when no two neighbouring sites are both up.
pub fn satisfies_blockade(space: &HilbertSpace, config: u64) -> bool {
    nearest_neighbor_pairs(space)
        .iter()
        .all(|&(a, b)| !(space.digit(config, a) == 1 && space.digit(config, b) == 1))
}

/// Constrained subspace of the PXP model.
pub fn pxp_basis(space: &HilbertSpace) -> Result<SectorBasis> {
    check_mfi_space(space)?;
    Ok(SectorBasis::constrained(space, |c| satisfies_blockade(space, c)))
}

/// `P (omega/2 sum sigma^x) P` on the constrained subspace.
pub fn pxp_hamiltonian(basis: &SectorBasis, omega: f64) -> Result<SparseOperator> {
    transverse_field(basis.space(), omega)?.to_hermitian(basis, Leakage::Project)
}

/// Measurement family member `e^{-i theta} sum sigma^+ + h.c.`.
pub fn otheta_terms(space: &HilbertSpace, theta: f64) -> Result<OperatorSum> {
    let mut o = OperatorSum::new(space);
    let c = Complex64::from_polar(1.0, -theta);
    for n in 0..space.num_sites() {
        o.push_with_adjoint(c, vec![(n, local::sigma_plus(space.local()))])?;
    }
    Ok(o)
}

pub fn observable_otheta(basis: &SectorBasis, theta: f64) -> Result<SparseOperator> {
    otheta_terms(basis.space(), theta)?.to_hermitian(basis, Leakage::Forbid)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SiteSelection {
    All,
    Odd,
    Even,
}

impl SiteSelection {
    pub fn contains(self, n: usize) -> bool {
        match self {
            SiteSelection::All => true,
            SiteSelection::Odd => n % 2 == 1,
            SiteSelection::Even => n % 2 == 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axis {
    X,
    Y,
    Z,
    Plus,
    Minus,
}

/// Collective (embedded) spin-1/2 operators: `J^mu = (1/2) sum sigma^mu`
/// for `mu = x, y, z` and `J^{+-} = sum sigma^{+-}` over the selected sites.
pub fn collective_terms(space: &HilbertSpace, selection: SiteSelection, axis: Axis) -> Result<OperatorSum> {
    let l = space.local();
    let (op, scale) = match axis {
        Axis::X => (local::sigma_x(l), 0.5),
        Axis::Y => (local::sigma_y(l), 0.5),
        Axis::Z => (local::sigma_z(l), 0.5),
        Axis::Plus => (local::sigma_plus(l), 1.0),
        Axis::Minus => (local::sigma_minus(l), 1.0),
    };
    let mut o = OperatorSum::new(space);
    for n in (0..space.num_sites()).filter(|&n| selection.contains(n)) {
        o.push_real(scale, vec![(n, op.clone())])?;
    }
    Ok(o)
}

pub fn collective_ops(basis: &SectorBasis, selection: SiteSelection, axis: Axis) -> Result<SparseOperator> {
    let op = collective_terms(basis.space(), selection, axis)?.to_sparse(basis, Leakage::Forbid)?;
    match axis {
        Axis::Plus | Axis::Minus => Ok(op),
        _ => op.mark_hermitian(1e-12),
    }
}

/// `N_0 = sum |0><0|` on a spin-1 chain.
pub fn zero_count_terms(space: &HilbertSpace) -> Result<OperatorSum> {
    require_local(space, LocalDim::SpinOne, "N_0")?;
    let mut o = OperatorSum::new(space);
    for n in 0..space.num_sites() {
        o.push_real(1.0, vec![(n, local::spin1_zero_projector())])?;
    }
    Ok(o)
}

/// Number parity `(-1)^{N_0}`.
pub fn number_parity_terms(space: &HilbertSpace) -> Result<OperatorSum> {
    require_local(space, LocalDim::SpinOne, "the number parity")?;
    let flip = LocalOp::identity(3).add(&local::spin1_zero_projector().scaled(re(-2.0)));
    let mut o = OperatorSum::new(space);
    o.push_real(1.0, (0..space.num_sites()).map(|n| (n, flip.clone())).collect())?;
    Ok(o)
}

/// Total magnetization `sum S^z` (spin-1) or `sum sigma^z` (spin-1/2).
pub fn magnetization_terms(space: &HilbertSpace) -> Result<OperatorSum> {
    let mut o = OperatorSum::new(space);
    for n in 0..space.num_sites() {
        o.push_real(1.0, vec![(n, local::sigma_z(space.local()))])?;
    }
    Ok(o)
}

/// `V_pi = prod_n exp(i pi S^{x or y}_n)`: x on even sites, y on odd sites.
pub fn pulse_vpi_terms(space: &HilbertSpace) -> Result<OperatorSum> {
    require_local(space, LocalDim::SpinOne, "the pi pulse")?;
    let rx = local::spin1_x().exp_i(PI)?;
    let ry = local::spin1_y().exp_i(PI)?;
    let mut o = OperatorSum::new(space);
    let factors = (0..space.num_sites())
        .map(|n| (n, if n % 2 == 0 { rx.clone() } else { ry.clone() }))
        .collect();
    o.push_real(1.0, factors)?;
    Ok(o)
}

pub fn pulse_vpi(basis: &SectorBasis) -> Result<SparseOperator> {
    Ok(pulse_vpi_terms(basis.space())?
        .to_sparse(basis, Leakage::Forbid)?
        .mark_unitary())
}

/// Local generator `A = (beta/2) (e^{-i eta} sigma^- - e^{i eta} sigma^+)`
/// with `beta = arctan(Omega/omega)`; the rotation is `exp(A)` on each site.
fn rotation_local(omega: f64, omega_t: f64, eta: f64) -> Result<LocalOp> {
    if omega == 0.0 {
        return Err(Error::InvalidParameter("the rotation needs omega != 0".into()));
    }
    let beta = (omega_t / omega).atan();
    let l = LocalDim::SpinOne;
    let a = local::sigma_minus(l)
        .scaled(Complex64::from_polar(beta / 2.0, -eta))
        .add(&local::sigma_plus(l).scaled(-Complex64::from_polar(beta / 2.0, eta)));
    // exp(A) = exp(i * (-i A)) with -i A Hermitian
    a.scaled(Complex64::new(0.0, -1.0)).exp_i(1.0)
}

/// Product rotation `U` mapping `H_0` onto the direction of `H_0 + H_Omega`.
pub fn rotation_u_terms(space: &HilbertSpace, omega: f64, omega_t: f64, eta: f64) -> Result<OperatorSum> {
    require_local(space, LocalDim::SpinOne, "the rotation")?;
    let u = rotation_local(omega, omega_t, eta)?;
    let mut o = OperatorSum::new(space);
    o.push_real(1.0, (0..space.num_sites()).map(|n| (n, u.clone())).collect())?;
    Ok(o)
}

pub fn rotation_u(basis: &SectorBasis, omega: f64, omega_t: f64, eta: f64) -> Result<SparseOperator> {
    Ok(rotation_u_terms(basis.space(), omega, omega_t, eta)?
        .to_sparse(basis, Leakage::Forbid)?
        .mark_unitary())
}

/// Site permutation operator `|c> -> |perm(c)>` in the full basis.
pub fn permutation_operator(space: &HilbertSpace, perm: &[usize]) -> Result<SparseOperator> {
    if perm.len() != space.num_sites() {
        return Err(Error::DimensionMismatch {
            expected: space.num_sites(),
            found: perm.len(),
        });
    }
    let t = (0..space.dim() as u64)
        .map(|c| (space.permute(c, perm) as u32, c as u32, re(1.0)))
        .collect();
    Ok(SparseOperator::from_triplets(space.dim(), t).mark_unitary())
}

/// Translation by `step` sites, `n -> n + step mod N`.
pub fn translation_operator(space: &HilbertSpace, step: usize) -> Result<SparseOperator> {
    let n = space.num_sites();
    let perm: Vec<usize> = (0..n).map(|i| (i + step) % n).collect();
    permutation_operator(space, &perm)
}
