//! Method-of-moments parameter estimation.
//!
//! The error of estimating `omega` from measurements of an observable `O`
//! after sensing time `t`, repeated `T/t` times, is
//! `delta_omega = Delta O / (|d<O>/d omega| sqrt(T/t))`, minimized over a
//! measurement family. For a family spanned by basis observables `B_i` the
//! minimum is `sqrt(t/T) / sqrt(g^T Sigma^+ g)` with `g_i = d<B_i>/d omega`
//! and `Sigma` the symmetrized covariance matrix of the `B_i`.

pub mod fit;
pub mod protocols;
pub mod sweep;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::basis::StateVector;
use crate::evolution::{moments, Method, Propagator, Trajectory};
use crate::linalg;
use crate::operators::SparseOperator;
use crate::{Error, Result};

pub use fit::{fit_scaling, FitResult, ScalingModel};
pub use sweep::{grid, sweep, Params, SweepOptions, SweepOutcome, SweepRecord, SweepRow};

/// A one-parameter family of evolutions `psi(t; omega)` from a fixed initial
/// state.
pub trait Dynamics: Send + Sync {
    fn dim(&self) -> usize;

    /// Prepares joint evaluation of the states for several parameter values.
    fn prepare(&self, omegas: &[f64]) -> Result<Box<dyn Evolver>>;
}

pub trait Evolver {
    /// States at time `t`, one per prepared parameter value.
    fn states_at(&mut self, t: f64) -> Result<Vec<StateVector>>;
}

type Builder = dyn Fn(f64) -> Result<SparseOperator> + Send + Sync;

/// Static evolution under `H(omega)` built on demand.
pub struct HamiltonianFamily {
    build: Box<Builder>,
    initial: StateVector,
    method: Method,
}

impl HamiltonianFamily {
    pub fn new(
        initial: StateVector,
        method: Method,
        build: impl Fn(f64) -> Result<SparseOperator> + Send + Sync + 'static,
    ) -> Self {
        Self {
            build: Box::new(build),
            initial,
            method,
        }
    }
}

struct FamilyEvolver {
    trajectories: Vec<Trajectory>,
}

impl Evolver for FamilyEvolver {
    fn states_at(&mut self, t: f64) -> Result<Vec<StateVector>> {
        self.trajectories.iter_mut().map(|tr| tr.state_at(t)).collect()
    }
}

impl Dynamics for HamiltonianFamily {
    fn dim(&self) -> usize {
        self.initial.dim()
    }

    fn prepare(&self, omegas: &[f64]) -> Result<Box<dyn Evolver>> {
        let trajectories = omegas
            .iter()
            .map(|&w| {
                let h = (self.build)(w)?;
                Arc::new(Propagator::new(&h, self.method)?).trajectory(&self.initial)
            })
            .collect::<Result<_>>()?;
        Ok(Box::new(FamilyEvolver { trajectories }))
    }
}

/// `H(omega) = omega G + R` with `G` diagonal in the working basis and
/// `[G, R] = 0`, so that `psi(t) = exp(-i omega t G) exp(-i t R) psi(0)`.
/// One decomposition of `R` serves every parameter value.
pub struct CommutingSignal {
    generator: Vec<f64>,
    rest: Arc<Propagator>,
    initial: StateVector,
}

impl CommutingSignal {
    pub fn new(generator: Vec<f64>, rest: &SparseOperator, initial: StateVector, method: Method) -> Result<Self> {
        if generator.len() != rest.dim() || initial.dim() != rest.dim() {
            return Err(Error::DimensionMismatch {
                expected: rest.dim(),
                found: generator.len().min(initial.dim()),
            });
        }
        let scale = 1.0 + generator.iter().map(|g| g.abs()).fold(0.0, f64::max);
        for (r, c, v) in rest.triplets() {
            if (generator[r] - generator[c]).abs() > 1e-12 * scale && v.norm() > 1e-14 {
                return Err(Error::InvalidParameter(
                    "signal generator does not commute with the rest of the Hamiltonian".into(),
                ));
            }
        }
        Ok(Self {
            generator,
            rest: Arc::new(Propagator::new(rest, method)?),
            initial,
        })
    }
}

struct CommutingEvolver {
    generator: Vec<f64>,
    omegas: Vec<f64>,
    base: Trajectory,
}

impl Evolver for CommutingEvolver {
    fn states_at(&mut self, t: f64) -> Result<Vec<StateVector>> {
        let base = self.base.state_at(t)?;
        Ok(self
            .omegas
            .iter()
            .map(|&w| {
                StateVector::from_amplitudes(
                    base.amplitudes()
                        .iter()
                        .zip(&self.generator)
                        .map(|(a, g)| a * num_complex::Complex64::from_polar(1.0, -w * t * g))
                        .collect(),
                )
            })
            .collect())
    }
}

impl Dynamics for CommutingSignal {
    fn dim(&self) -> usize {
        self.initial.dim()
    }

    fn prepare(&self, omegas: &[f64]) -> Result<Box<dyn Evolver>> {
        Ok(Box::new(CommutingEvolver {
            generator: self.generator.clone(),
            omegas: omegas.to_vec(),
            base: self.rest.trajectory(&self.initial)?,
        }))
    }
}

/// Accessible measurements.
#[derive(Clone, Debug)]
pub enum MeasurementFamily {
    /// `O_theta = cos(theta) X + sin(theta) Y`.
    Theta { x: SparseOperator, y: SparseOperator },
    /// Real linear combinations of the basis observables.
    LinearSpan { basis: Vec<SparseOperator> },
}

impl MeasurementFamily {
    pub fn basis(&self) -> Vec<&SparseOperator> {
        match self {
            MeasurementFamily::Theta { x, y } => vec![x, y],
            MeasurementFamily::LinearSpan { basis } => basis.iter().collect(),
        }
    }

    fn check(&self, dim: usize) -> Result<()> {
        let ops = self.basis();
        if ops.is_empty() {
            return Err(Error::InvalidParameter("empty measurement family".into()));
        }
        for op in ops {
            if op.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: op.dim() });
            }
            if !op.is_hermitian() {
                return Err(Error::InvalidParameter("measurement operators must be Hermitian".into()));
            }
        }
        Ok(())
    }
}

/// Finite-difference rule for `d/d omega`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stencil {
    Central,
    #[default]
    FivePoint,
}

impl Stencil {
    fn offsets(self) -> &'static [f64] {
        match self {
            Stencil::Central => &[-1.0, 1.0],
            Stencil::FivePoint => &[-2.0, -1.0, 1.0, 2.0],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointStatus {
    Finite,
    /// All derivatives vanish; the error is infinite.
    ZeroDerivative,
    /// The derivative has a component along a fluctuation-free direction;
    /// the error is zero.
    Noiseless,
}

/// Result of [`optimal_observable_coeffs`].
#[derive(Clone, Debug, PartialEq)]
pub struct OptimalObservable {
    /// Optimal coefficients `c* = Sigma^+ g` (unnormalized).
    pub coefficients: Vec<f64>,
    /// `g^T Sigma^+ g`; infinite when noiseless.
    pub merit: f64,
    pub status: PointStatus,
}

/// Maximizes `(g . c)^2 / (c^T Sigma c)` over real `c`.
pub fn optimal_observable_coeffs(g: &[f64], sigma: &faer::Mat<f64>) -> Result<OptimalObservable> {
    let k = g.len();
    if sigma.nrows() != k || sigma.ncols() != k {
        return Err(Error::DimensionMismatch { expected: k, found: sigma.nrows() });
    }
    let gnorm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    if gnorm == 0.0 {
        return Ok(OptimalObservable {
            coefficients: vec![0.0; k],
            merit: 0.0,
            status: PointStatus::ZeroDerivative,
        });
    }
    let (c, null) = linalg::pinv_solve_psd(sigma, g, 1e-10)?;
    if null > 1e-6 * gnorm {
        return Ok(OptimalObservable {
            coefficients: c,
            merit: f64::INFINITY,
            status: PointStatus::Noiseless,
        });
    }
    let merit = g.iter().zip(&c).map(|(a, b)| a * b).sum::<f64>();
    Ok(OptimalObservable {
        coefficients: c,
        merit: merit.max(0.0),
        status: PointStatus::Finite,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorPoint {
    pub t: f64,
    #[serde(with = "sweep::lossless_f64")]
    pub delta_omega: f64,
    #[serde(with = "sweep::lossless_f64")]
    pub merit: f64,
    pub status: PointStatus,
    /// Optimal family member: coefficients over the basis observables.
    pub coefficients: Vec<f64>,
    /// Optimal `theta` for the theta family.
    pub theta: Option<f64>,
    pub derivative: Vec<f64>,
    /// Largest relative difference between the central and five-point
    /// derivative estimates.
    pub stencil_disagreement: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorCurve {
    pub points: Vec<ErrorPoint>,
    pub t_star: f64,
    #[serde(with = "sweep::lossless_f64")]
    pub delta_omega_star: f64,
    /// The error was still decreasing at the end of the time grid.
    pub diverged: bool,
}

impl ErrorCurve {
    pub fn times(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.t).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.delta_omega).collect()
    }
}

/// Everything needed to evaluate the estimation error of `omega`.
pub struct SensingProtocol {
    pub dynamics: Arc<dyn Dynamics>,
    pub family: MeasurementFamily,
    pub omega: f64,
    pub total_time: f64,
    /// Finite-difference step; default `1e-5 max(1, |omega|)`.
    pub fd_step: Option<f64>,
    pub stencil: Stencil,
}

impl SensingProtocol {
    pub fn new(dynamics: Arc<dyn Dynamics>, family: MeasurementFamily, omega: f64) -> Self {
        Self {
            dynamics,
            family,
            omega,
            total_time: 1.0,
            fd_step: None,
            stencil: Stencil::default(),
        }
    }

    pub fn with_total_time(mut self, total_time: f64) -> Self {
        self.total_time = total_time;
        self
    }

    pub fn with_stencil(mut self, stencil: Stencil) -> Self {
        self.stencil = stencil;
        self
    }

    pub fn with_fd_step(mut self, step: f64) -> Self {
        self.fd_step = Some(step);
        self
    }

    pub fn fd_step(&self) -> f64 {
        self.fd_step.unwrap_or(1e-5 * self.omega.abs().max(1.0))
    }

    /// Starts an evaluation session; sessions reuse prepared propagators
    /// across many sensing times.
    pub fn session(&self) -> Result<Session<'_>> {
        if !(self.total_time > 0.0) {
            return Err(Error::InvalidParameter("total time T must be positive".into()));
        }
        let delta = self.fd_step();
        if !(delta > 0.0) {
            return Err(Error::InvalidParameter("finite-difference step must be positive".into()));
        }
        self.family.check(self.dynamics.dim())?;
        let mut omegas = vec![self.omega];
        omegas.extend(Stencil::FivePoint.offsets().iter().map(|k| self.omega + k * delta));
        let evolver = self.dynamics.prepare(&omegas)?;
        Ok(Session {
            protocol: self,
            ops: self.family.basis().into_iter().cloned().collect(),
            evolver,
            delta,
        })
    }

    pub fn estimation_error(&self, t: f64) -> Result<ErrorPoint> {
        self.session()?.point(t)
    }

    pub fn parametric_derivative(&self, t: f64) -> Result<Vec<f64>> {
        Ok(self.session()?.point(t)?.derivative)
    }

    pub fn optimize_sensing_time(&self, t_grid: &[f64], refine: bool) -> Result<ErrorCurve> {
        self.session()?.optimize(t_grid, refine)
    }
}

pub struct Session<'a> {
    protocol: &'a SensingProtocol,
    ops: Vec<SparseOperator>,
    evolver: Box<dyn Evolver>,
    delta: f64,
}

impl Session<'_> {
    /// Estimation error at sensing time `t`.
    pub fn point(&mut self, t: f64) -> Result<ErrorPoint> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::InvalidParameter(format!("sensing time must be non-negative, got {t}")));
        }
        let p = self.protocol;
        let states = self.evolver.states_at(t)?;
        let ops = &self.ops;
        let center = moments(&states[0], ops)?;
        let expect = |psi: &StateVector| -> Result<Vec<f64>> { Ok(moments(psi, ops)?.means) };
        // states: [omega, -2d, -d, +d, +2d]
        let m2 = expect(&states[1])?;
        let m1 = expect(&states[2])?;
        let p1 = expect(&states[3])?;
        let p2 = expect(&states[4])?;
        let d = self.delta;
        let k = ops.len();
        let central: Vec<f64> = (0..k).map(|i| (p1[i] - m1[i]) / (2.0 * d)).collect();
        let five: Vec<f64> = (0..k)
            .map(|i| (m2[i] - 8.0 * m1[i] + 8.0 * p1[i] - p2[i]) / (12.0 * d))
            .collect();
        let scale = five.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let stencil_disagreement = if scale > 0.0 {
            central
                .iter()
                .zip(&five)
                .map(|(a, b)| (a - b).abs() / scale)
                .fold(0.0, f64::max)
        } else {
            0.0
        };
        let mut g = match p.stencil {
            Stencil::Central => central,
            Stencil::FivePoint => five,
        };
        // below the rounding floor of the difference quotient the derivative
        // is indistinguishable from zero
        let magnitude = 1.0 + center.means.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let floor = 100.0 * f64::EPSILON * magnitude / d;
        if g.iter().all(|x| x.abs() <= floor) {
            g.iter_mut().for_each(|x| *x = 0.0);
        }
        let opt = optimal_observable_coeffs(&g, &center.covariance)?;
        let delta_omega = match opt.status {
            PointStatus::ZeroDerivative => f64::INFINITY,
            PointStatus::Noiseless => 0.0,
            PointStatus::Finite if opt.merit > 0.0 => (t / p.total_time).sqrt() / opt.merit.sqrt(),
            PointStatus::Finite => f64::INFINITY,
        };
        let theta = match p.family {
            MeasurementFamily::Theta { .. } if opt.status != PointStatus::ZeroDerivative => {
                Some(opt.coefficients[1].atan2(opt.coefficients[0]))
            }
            _ => None,
        };
        Ok(ErrorPoint {
            t,
            delta_omega,
            merit: opt.merit,
            status: opt.status,
            coefficients: opt.coefficients,
            theta,
            derivative: g,
            stencil_disagreement,
        })
    }

    pub fn curve(&mut self, times: &[f64]) -> Result<Vec<ErrorPoint>> {
        times.iter().map(|&t| self.point(t)).collect()
    }

    /// Grid scan followed by golden-section refinement of the minimum.
    pub fn optimize(&mut self, t_grid: &[f64], refine: bool) -> Result<ErrorCurve> {
        if t_grid.is_empty() {
            return Err(Error::InvalidParameter("empty time grid".into()));
        }
        if t_grid.windows(2).any(|w| !(w[1] > w[0])) || !(t_grid[0] > 0.0) {
            return Err(Error::InvalidParameter("time grid must be positive and ascending".into()));
        }
        let points = self.curve(t_grid)?;
        let values: Vec<f64> = points.iter().map(|p| p.delta_omega).collect();
        let mut best = 0;
        for (i, &v) in values.iter().enumerate() {
            if v < values[best] {
                best = i;
            }
        }
        let last = values.len() - 1;
        let diverged = last > 0 && best == last && values[last] < values[last - 1];
        let (mut t_star, mut d_star) = (t_grid[best], values[best]);
        if refine && !diverged && values.len() >= 2 && d_star.is_finite() && d_star > 0.0 {
            let lo = t_grid[best.saturating_sub(1)];
            let hi = t_grid[(best + 1).min(last)];
            let (t, v) = self.golden_section(lo, hi)?;
            if v < d_star {
                t_star = t;
                d_star = v;
            }
        }
        Ok(ErrorCurve {
            points,
            t_star,
            delta_omega_star: d_star,
            diverged,
        })
    }

    fn golden_section(&mut self, mut a: f64, mut b: f64) -> Result<(f64, f64)> {
        let r = (5.0_f64.sqrt() - 1.0) / 2.0;
        let mut c = b - r * (b - a);
        let mut d = a + r * (b - a);
        let mut fc = self.point(c)?.delta_omega;
        let mut fd = self.point(d)?.delta_omega;
        for _ in 0..60 {
            if (b - a) <= 1e-7 * b {
                break;
            }
            if fc <= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - r * (b - a);
                fc = self.point(c)?.delta_omega;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + r * (b - a);
                fd = self.point(d)?.delta_omega;
            }
        }
        Ok(if fc <= fd { (c, fc) } else { (d, fd) })
    }
}

/// `count` log-spaced points per decade covering `[t_min, t_max]`.
pub fn log_time_grid(t_min: f64, t_max: f64, per_decade: usize) -> Result<Vec<f64>> {
    if !(t_min > 0.0) || !(t_max > t_min) || per_decade == 0 {
        return Err(Error::InvalidParameter(format!(
            "invalid time grid [{t_min}, {t_max}] with {per_decade} points per decade"
        )));
    }
    let decades = (t_max / t_min).log10();
    let n = ((decades * per_decade as f64).ceil() as usize).max(1);
    Ok((0..=n)
        .map(|i| t_min * 10f64.powf(decades * i as f64 / n as f64))
        .collect())
}

/// Default lower end of the sensing-time grid: a tenth of the fastest
/// coupling period.
pub fn default_t_min(rates: &[f64]) -> f64 {
    let fastest = rates.iter().map(|r| r.abs()).fold(0.0, f64::max);
    if fastest > 0.0 {
        0.1 / fastest
    } else {
        0.1
    }
}
