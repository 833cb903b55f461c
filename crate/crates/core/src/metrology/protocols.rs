//! Ready-made sensing protocols for the two models.

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{CommutingSignal, Dynamics, HamiltonianFamily, MeasurementFamily, SensingProtocol};
use crate::basis::{self, Boundary, HilbertSpace, SectorBasis, StateVector, SymmetrySector};
use crate::evolution::Method;
use crate::operators::{
    collective_ops, mfi_hamiltonian, observable_otheta, spin1_field, spin1_rest_terms, Axis, Leakage, MfiParams,
    SiteSelection, SparseOperator, Spin1Params,
};
use crate::{Error, Result};

/// Working basis for spin-1 runs started from a state without `m = 0`
/// components and invariant under translations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spin1Reduction {
    Full,
    /// Even number parity.
    Parity,
    /// Zero momentum and even number parity when the couplings allow it,
    /// otherwise parity only.
    #[default]
    Auto,
}

pub fn spin1_working_basis(space: &HilbertSpace, p: &Spin1Params, reduction: Spin1Reduction) -> Result<SectorBasis> {
    let parity = SymmetrySector::new().with_number_parity(1);
    match reduction {
        Spin1Reduction::Full => Ok(SectorBasis::full(space)),
        Spin1Reduction::Parity => SectorBasis::new(space, &parity),
        Spin1Reduction::Auto => {
            let uniform = p.disorder.iter().all(|d| *d == p.disorder.first().copied().unwrap_or(0.0));
            if space.boundary() == Boundary::Periodic
                && space.num_sites() > 1
                && uniform
                && p.couplings.is_translation_invariant(1)
            {
                SectorBasis::new(space, &parity.with_momentum(0))
            } else {
                SectorBasis::new(space, &parity)
            }
        }
    }
}

/// Sector coefficients of a full-space state that lies inside the sector.
pub fn restrict_exact(basis: &SectorBasis, psi: &StateVector) -> Result<StateVector> {
    let r = basis.restrict(psi)?;
    if (r.norm() - psi.norm()).abs() > 1e-10 * psi.norm().max(1.0) {
        return Err(Error::InvalidSector(format!(
            "state has weight {:.3e} outside the sector {}",
            (psi.norm().powi(2) - r.norm().powi(2)).max(0.0),
            basis.sector().describe()
        )));
    }
    Ok(r)
}

/// The `O_theta` family `cos(theta) X + sin(theta) Y`.
pub fn theta_family(basis: &SectorBasis) -> Result<MeasurementFamily> {
    Ok(MeasurementFamily::Theta {
        x: observable_otheta(basis, 0.0)?,
        y: observable_otheta(basis, FRAC_PI_2)?,
    })
}

/// The six sublattice collective spins `J^{x,y,z}_{odd,even}`.
pub fn sublattice_family(basis: &SectorBasis) -> Result<MeasurementFamily> {
    let mut ops = Vec::with_capacity(6);
    for sel in [SiteSelection::Odd, SiteSelection::Even] {
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            ops.push(collective_ops(basis, sel, axis)?);
        }
    }
    Ok(MeasurementFamily::LinearSpan { basis: ops })
}

/// Spin-1 dynamics with target `omega = p.omega`. When the field commutes
/// with the rest of the Hamiltonian (no transverse term) one decomposition
/// serves every `omega`.
pub fn spin1_dynamics(basis: &SectorBasis, p: &Spin1Params, initial: StateVector) -> Result<Arc<dyn Dynamics>> {
    let space = basis.space().clone();
    if p.transverse == 0.0 {
        let rest = spin1_rest_terms(&space, p)?.to_hermitian(basis, Leakage::Forbid)?;
        let g = spin1_field(&space, 1.0)?.to_sparse(basis, Leakage::Forbid)?;
        let off = g
            .triplets()
            .into_iter()
            .filter(|(r, c, _)| r != c)
            .map(|(_, _, v)| v.norm())
            .fold(0.0, f64::max);
        if off > 1e-12 {
            return Err(Error::InvalidSector("the field term is not diagonal in this basis".into()));
        }
        let generator = g.diagonal_values().iter().map(|z| z.re).collect();
        return Ok(Arc::new(CommutingSignal::new(generator, &rest, initial, Method::Auto)?));
    }
    let (basis, p) = (basis.clone(), p.clone());
    Ok(Arc::new(HamiltonianFamily::new(initial, Method::Auto, move |w| {
        let mut q = p.clone();
        q.omega = w;
        crate::operators::spin1_hamiltonian(&basis, &q)
    })))
}

/// Spin-1 protocol from `|+>` with the `O_theta` family.
pub fn spin1_sensing(space: &HilbertSpace, p: &Spin1Params, reduction: Spin1Reduction, total_time: f64) -> Result<SensingProtocol> {
    let basis = spin1_working_basis(space, p, reduction)?;
    let initial = restrict_exact(&basis, &basis::plus_state(space)?)?;
    spin1_sensing_from(&basis, p, initial, total_time)
}

/// Spin-1 protocol from an arbitrary state already expressed in `basis`.
pub fn spin1_sensing_from(basis: &SectorBasis, p: &Spin1Params, initial: StateVector, total_time: f64) -> Result<SensingProtocol> {
    if initial.dim() != basis.dim() {
        return Err(Error::DimensionMismatch { expected: basis.dim(), found: initial.dim() });
    }
    let dynamics = spin1_dynamics(basis, p, initial)?;
    Ok(SensingProtocol::new(dynamics, theta_family(basis)?, p.omega).with_total_time(total_time))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MfiInitial {
    Neel,
    PolarizedDown,
}

/// Two-site translations and site-centred reflection: both launch states
/// and the Hamiltonian are invariant.
pub fn mfi_working_basis(space: &HilbertSpace) -> Result<SectorBasis> {
    let n = space.num_sites();
    if space.boundary() == Boundary::Periodic && n % 2 == 0 && n >= 4 {
        SectorBasis::new(
            space,
            &SymmetrySector::new().with_translation_step(2).with_momentum(0).with_reflection(1),
        )
    } else {
        Ok(SectorBasis::full(space))
    }
}

pub fn mfi_sensing(space: &HilbertSpace, p: &MfiParams, initial: MfiInitial, total_time: f64) -> Result<SensingProtocol> {
    let basis = mfi_working_basis(space)?;
    let psi = match initial {
        MfiInitial::Neel => basis::neel_state(space)?,
        MfiInitial::PolarizedDown => basis::polarized_down(space)?,
    };
    let psi = restrict_exact(&basis, &psi)?;
    mfi_sensing_from(&basis, p, psi, total_time)
}

pub fn mfi_sensing_from(basis: &SectorBasis, p: &MfiParams, initial: StateVector, total_time: f64) -> Result<SensingProtocol> {
    if initial.dim() != basis.dim() {
        return Err(Error::DimensionMismatch { expected: basis.dim(), found: initial.dim() });
    }
    let family = sublattice_family(basis)?;
    let (b, q) = (basis.clone(), *p);
    let dynamics = HamiltonianFamily::new(initial, Method::Auto, move |w| {
        mfi_hamiltonian(&b, &MfiParams { omega: w, ..q })
    });
    Ok(SensingProtocol::new(Arc::new(dynamics), family, p.omega).with_total_time(total_time))
}

/// Operators of a family, for callers that need them directly.
pub fn family_operators(family: &MeasurementFamily) -> Vec<SparseOperator> {
    family.basis().into_iter().cloned().collect()
}
