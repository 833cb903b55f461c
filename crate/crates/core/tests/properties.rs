//! Invariants over seeded random parameter draws (100 cases each).

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use scar_core::basis::{plus_state, Boundary, HilbertSpace, SectorBasis, StateVector, SymmetrySector};
use scar_core::evolution::{evolve_krylov, expectation, KrylovSettings, Method, Propagator};
use scar_core::metrology::protocols::{spin1_sensing, Spin1Reduction};
use scar_core::operators::*;
use scar_core::scars::{dicke_state, verify_annihilation};

const CASES: u32 = 100;

fn runner() -> TestRunner {
    let config = Config { cases: CASES, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

#[derive(Clone, Debug)]
struct Draw {
    n: usize,
    periodic: bool,
    omega: f64,
    phi: f64,
    lambda: f64,
    seed: u64,
    anisotropy: f64,
    transverse: f64,
    eta: f64,
    t: f64,
}

fn draws(max_n: usize) -> impl Strategy<Value = Draw> {
    (
        2..=max_n,
        any::<bool>(),
        -2.0..2.0f64,
        -PI..PI,
        -1.5..1.5f64,
        any::<u64>(),
        -1.0..1.0f64,
        -1.0..1.0f64,
        -PI..PI,
        0.01..20.0f64,
    )
        .prop_map(|(n, periodic, omega, phi, lambda, seed, anisotropy, transverse, eta, t)| Draw {
            n,
            periodic,
            omega,
            phi,
            lambda,
            seed,
            anisotropy,
            transverse,
            eta,
            t,
        })
}

impl Draw {
    fn boundary(&self) -> Boundary {
        if self.periodic && self.n > 2 {
            Boundary::Periodic
        } else {
            Boundary::Open
        }
    }

    fn space(&self) -> HilbertSpace {
        HilbertSpace::spin_one(self.n, self.boundary()).unwrap()
    }

    fn couplings(&self) -> CouplingMap {
        CouplingMap::random_inverse_square(self.n, self.boundary(), self.lambda, self.seed).unwrap()
    }

    fn params(&self) -> Spin1Params {
        let mut p = Spin1Params::new(self.omega, self.phi, self.couplings());
        p.anisotropy = self.anisotropy;
        p.transverse = self.transverse;
        p.transverse_phase = self.eta;
        p
    }

    fn random_state(&self, dim: usize) -> StateVector {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x5eed);
        StateVector::from_amplitudes(random_unit_vector(&mut rng, dim))
    }
}

fn state_close(a: &StateVector, b: &StateVector, tol: f64) -> bool {
    a.distance(b) < tol
}

#[test]
fn hamiltonians_are_hermitian() {
    runner()
        .run(&draws(4), |d| {
            let space = d.space();
            let h = spin1_hamiltonian(&SectorBasis::full(&space), &d.params()).unwrap();
            prop_assert!(h.hermiticity_error() < 1e-13);
            let parity = SectorBasis::new(&space, &SymmetrySector::new().with_number_parity(1)).unwrap();
            prop_assert!(spin1_hamiltonian(&parity, &d.params()).unwrap().hermiticity_error() < 1e-13);
            let half = HilbertSpace::spin_half(d.n + 2, if d.periodic { Boundary::Periodic } else { Boundary::Open }).unwrap();
            let eta = if d.periodic && (d.n + 2) % 2 == 1 { 0.0 } else { d.eta / PI };
            let p = MfiParams { omega: d.omega, longitudinal: d.transverse * 3.0, ising: d.lambda * 3.0, eta };
            prop_assert!(mfi_hamiltonian(&SectorBasis::full(&half), &p).unwrap().hermiticity_error() < 1e-13);
            Ok(())
        })
        .unwrap();
}

#[test]
fn evolution_and_pulses_are_unitary() {
    runner()
        .run(&draws(4), |d| {
            let space = d.space();
            let basis = SectorBasis::full(&space);
            let h = spin1_hamiltonian(&basis, &d.params()).unwrap();
            let psi = d.random_state(basis.dim());
            let out = Propagator::new(&h, Method::Auto).unwrap().evolve(&psi, d.t).unwrap();
            prop_assert!((out.norm() - 1.0).abs() < 1e-12);
            // forward then backward returns the state
            let back = Propagator::new(&h, Method::Auto).unwrap().evolve(&out, -d.t).unwrap();
            prop_assert!(state_close(&back, &psi, 1e-10));
            let mut rng = ChaCha8Rng::seed_from_u64(d.seed);
            if d.n % 2 == 0 {
                prop_assert!(pulse_vpi(&basis).unwrap().unitarity_residual(&mut rng, 3) < 1e-13);
            }
            if d.omega.abs() > 0.05 {
                let u = rotation_u(&basis, d.omega, d.transverse, d.eta).unwrap();
                prop_assert!(u.unitarity_residual(&mut rng, 3) < 1e-13);
            }
            Ok(())
        })
        .unwrap();
}

#[test]
fn symmetries_are_conserved() {
    runner()
        .run(&draws(4), |d| {
            let space = d.space();
            let basis = SectorBasis::full(&space);
            let mut p = d.params();
            let h = spin1_hamiltonian(&basis, &p).unwrap();
            let parity = number_parity_terms(&space).unwrap().to_sparse(&basis, Leakage::Forbid).unwrap();
            prop_assert!(h.commutator(&parity).unwrap().max_abs() < 1e-12);
            p.transverse = 0.0;
            let h = spin1_hamiltonian(&basis, &p).unwrap();
            let m = magnetization_terms(&space).unwrap().to_sparse(&basis, Leakage::Forbid).unwrap().mark_hermitian(0.0).unwrap();
            prop_assert!(h.commutator(&m).unwrap().max_abs() < 1e-12);
            // conserved along a trajectory, together with the energy
            let psi = d.random_state(basis.dim());
            let out = evolve_krylov(&h, &psi, d.t, &KrylovSettings::default()).unwrap();
            prop_assert!((expectation(&out, &m).unwrap() - expectation(&psi, &m).unwrap()).abs() < 1e-9);
            prop_assert!((expectation(&out, &h).unwrap() - expectation(&psi, &h).unwrap()).abs() < 1e-9);
            Ok(())
        })
        .unwrap();
}

#[test]
fn dmi_annihilates_the_dicke_tower() {
    runner()
        .run(&draws(5), |d| {
            let sign = if d.phi >= 0.0 { 1.0 } else { -1.0 };
            let phi = sign * FRAC_PI_2;
            prop_assert!(verify_annihilation(&d.couplings(), phi).unwrap() < 1e-12);
            let space = d.space();
            let basis = SectorBasis::full(&space);
            let mut p = Spin1Params::new(d.omega, phi, d.couplings());
            p.disorder = Vec::new();
            let h = spin1_hamiltonian(&basis, &p).unwrap();
            for s in 0..=d.n {
                let v = dicke_state(&space, s).unwrap();
                let hv = h.apply_state(&v).unwrap();
                let mut expect = v.clone();
                expect.scale(Complex64::new(d.omega * (s as f64 - d.n as f64 / 2.0), 0.0));
                prop_assert!(state_close(&hv, &expect, 1e-12));
            }
            Ok(())
        })
        .unwrap();
}

#[test]
fn dmi_sensing_stays_at_the_standard_quantum_limit() {
    runner()
        .run(&draws(4), |d| {
            let sign = if d.phi >= 0.0 { 1.0 } else { -1.0 };
            let mut p = Spin1Params::new(1.0 + d.omega.abs(), sign * FRAC_PI_2, d.couplings());
            p.anisotropy = 0.0;
            let space = d.space();
            let proto = spin1_sensing(&space, &p, Spin1Reduction::Parity, 1.0).unwrap();
            let t = 0.05 + d.t / 4.0;
            let e = proto.estimation_error(t).unwrap();
            let sql = 1.0 / (d.n as f64 * t).sqrt();
            prop_assert!((e.delta_omega - sql).abs() < 1e-7 * sql, "{} vs {}", e.delta_omega, sql);
            Ok(())
        })
        .unwrap();
}

#[test]
fn plus_state_has_no_zero_components() {
    runner()
        .run(&draws(5), |d| {
            let space = d.space();
            let psi = plus_state(&space).unwrap();
            let n0 = zero_count_terms(&space).unwrap().to_sparse(&SectorBasis::full(&space), Leakage::Forbid).unwrap();
            prop_assert!(expectation(&psi, &n0.mark_hermitian(0.0).unwrap()).unwrap().abs() < 1e-14);
            Ok(())
        })
        .unwrap();
}
