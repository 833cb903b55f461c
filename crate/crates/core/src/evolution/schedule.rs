//! Piecewise evolution plans: static segments, a time-dependent signal term
//! and instantaneous pulses at segment ends.
//!
//! Segments carrying a signal `a(t) S` are integrated with an exponential
//! midpoint rule whose step generator is `H + (1/h) int a(t) dt S`, using the
//! exact integral of the envelope over the step. The step is halved until two
//! successive refinements agree.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::krylov::{expm_multiply, KrylovSettings};
use crate::basis::StateVector;
use crate::linalg;
use crate::operators::SparseOperator;
use crate::{Error, Result};

/// Scalar signal envelope `a(t)` in absolute schedule time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Envelope {
    Constant(f64),
    /// `amplitude * sin(pi t / half_period)`
    Sine { amplitude: f64, half_period: f64 },
}

impl Envelope {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Envelope::Constant(a) => a,
            Envelope::Sine { amplitude, half_period } => amplitude * (PI * t / half_period).sin(),
        }
    }

    /// `int_{t0}^{t1} a(t) dt`
    pub fn integral(&self, t0: f64, t1: f64) -> f64 {
        match *self {
            Envelope::Constant(a) => a * (t1 - t0),
            Envelope::Sine { amplitude, half_period } => {
                let k = PI / half_period;
                amplitude * ((k * t0).cos() - (k * t1).cos()) / k
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Segment {
    pub duration: f64,
    pub hamiltonian: Arc<SparseOperator>,
    pub signal: Option<(Arc<SparseOperator>, Envelope)>,
    /// Unitary applied at the end of the segment.
    pub pulse: Option<Arc<SparseOperator>>,
}

#[derive(Clone, Debug, Default)]
pub struct Schedule {
    segments: Vec<Segment>,
}

impl Schedule {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, segment: Segment) -> Result<()> {
        if !(segment.duration > 0.0) || !segment.duration.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "segment duration must be positive, got {}",
                segment.duration
            )));
        }
        let dim = segment.hamiltonian.dim();
        if !segment.hamiltonian.is_hermitian() {
            return Err(Error::InvalidParameter("segment Hamiltonian is not Hermitian".into()));
        }
        if let Some((s, _)) = &segment.signal {
            if s.dim() != dim || !s.is_hermitian() {
                return Err(Error::InvalidParameter("signal term must be Hermitian of matching size".into()));
            }
        }
        if let Some(p) = &segment.pulse {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: p.dim() });
            }
        }
        if let Some(first) = self.segments.first() {
            if first.hamiltonian.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: first.hamiltonian.dim(),
                    found: dim,
                });
            }
        }
        self.segments.push(segment);
        Ok(())
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    fn has_signal(&self) -> bool {
        self.segments.iter().any(|s| s.signal.is_some())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleSettings {
    /// Initial step; defaults to the shortest segment duration over 64.
    pub step: Option<f64>,
    /// Agreement required between successive refinements.
    pub tolerance: f64,
    pub max_refinements: usize,
    pub krylov: KrylovSettings,
    /// Store the state after every segment (after its pulse).
    pub record_segments: bool,
}

impl Default for ScheduleSettings {
    fn default() -> Self {
        Self {
            step: None,
            tolerance: 1e-8,
            max_refinements: 10,
            krylov: KrylovSettings {
                tolerance: 1e-12,
                ..KrylovSettings::default()
            },
            record_segments: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ScheduleResult {
    pub state: StateVector,
    /// `(end time, state)` per segment when requested.
    pub samples: Vec<(f64, StateVector)>,
    /// Step used for the returned state.
    pub step: f64,
    pub refinements: usize,
    /// Distance between the last two refinements (zero when no signal).
    pub difference: f64,
}

pub fn evolve_schedule(schedule: &Schedule, psi: &StateVector, settings: &ScheduleSettings) -> Result<ScheduleResult> {
    let Some(first) = schedule.segments.first() else {
        return Ok(ScheduleResult {
            state: psi.clone(),
            samples: Vec::new(),
            step: 0.0,
            refinements: 0,
            difference: 0.0,
        });
    };
    if psi.dim() != first.hamiltonian.dim() {
        return Err(Error::DimensionMismatch {
            expected: first.hamiltonian.dim(),
            found: psi.dim(),
        });
    }
    let min_duration = schedule
        .segments
        .iter()
        .map(|s| s.duration)
        .fold(f64::INFINITY, f64::min);
    let mut step = settings.step.unwrap_or(min_duration / 64.0);
    let mut counts = step_counts(schedule, step)?;
    let (mut state, mut samples) = run(schedule, psi, &counts, settings)?;
    if !schedule.has_signal() {
        return Ok(ScheduleResult {
            state,
            samples,
            step,
            refinements: 0,
            difference: 0.0,
        });
    }
    let mut last_difference = f64::INFINITY;
    for refinement in 1..=settings.max_refinements {
        step *= 0.5;
        counts.iter_mut().for_each(|c| *c *= 2);
        let (next, next_samples) = run(schedule, psi, &counts, settings)?;
        last_difference = linalg::distance(state.amplitudes(), next.amplitudes());
        state = next;
        samples = next_samples;
        if last_difference < settings.tolerance {
            return Ok(ScheduleResult {
                state,
                samples,
                step,
                refinements: refinement,
                difference: last_difference,
            });
        }
    }
    Err(Error::RefinementNonConvergence {
        difference: last_difference,
        refinements: settings.max_refinements,
        step,
    })
}

fn step_counts(schedule: &Schedule, step: f64) -> Result<Vec<usize>> {
    if !(step > 0.0) {
        return Err(Error::InvalidParameter(format!("step must be positive, got {step}")));
    }
    schedule
        .segments
        .iter()
        .map(|s| {
            let k = (s.duration / step).round();
            if k < 1.0 || (k * step - s.duration).abs() > 1e-9 * s.duration {
                Err(Error::InvalidParameter(format!(
                    "step {step} does not divide segment duration {}",
                    s.duration
                )))
            } else {
                Ok(k as usize)
            }
        })
        .collect()
}

fn run(
    schedule: &Schedule,
    psi: &StateVector,
    counts: &[usize],
    settings: &ScheduleSettings,
) -> Result<(StateVector, Vec<(f64, StateVector)>)> {
    let dim = psi.dim();
    let mut state = psi.amplitudes().to_vec();
    let mut scratch = vec![Complex64::new(0.0, 0.0); dim];
    let mut samples = Vec::new();
    let mut t = 0.0;
    for (segment, &count) in schedule.segments.iter().zip(counts) {
        let h = &segment.hamiltonian;
        match &segment.signal {
            None => {
                let mut apply = |x: &[Complex64], y: &mut [Complex64]| h.apply_into(x, y);
                state = expm_multiply(&mut apply, &state, segment.duration, &settings.krylov)?.0;
            }
            Some((signal, envelope)) => {
                let dt = segment.duration / count as f64;
                for k in 0..count {
                    let t0 = t + k as f64 * dt;
                    let mean = envelope.integral(t0, t0 + dt) / dt;
                    let mut apply = |x: &[Complex64], y: &mut [Complex64]| {
                        h.apply_into(x, y);
                        if mean != 0.0 {
                            signal.apply_into(x, &mut scratch);
                            for (yi, si) in y.iter_mut().zip(&scratch) {
                                *yi += si * mean;
                            }
                        }
                    };
                    state = expm_multiply(&mut apply, &state, dt, &settings.krylov)?.0;
                }
            }
        }
        t += segment.duration;
        if let Some(p) = &segment.pulse {
            state = p.apply(&state);
        }
        if settings.record_segments {
            samples.push((t, StateVector::from_amplitudes(state.clone())));
        }
    }
    Ok((StateVector::from_amplitudes(state), samples))
}
