//! Least-squares scaling fits in log-log space.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ScalingModel {
    /// `y = a / sqrt(N x T)`, with `x` the sensing time.
    SqrtInverseTime { num_sites: usize, total_time: f64 },
    /// `y = a x^b`; `b` is fitted unless fixed.
    PowerLaw { exponent: Option<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: ScalingModel,
    pub prefactor: f64,
    pub exponent: f64,
    /// Standard error of the fitted exponent (zero when fixed).
    pub exponent_stderr: f64,
    /// RMS of the residuals of `ln y`.
    pub residual_rms: f64,
    pub points: usize,
}

pub fn fit_scaling(x: &[f64], y: &[f64], model: ScalingModel) -> Result<FitResult> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), found: y.len() });
    }
    if x.len() < 3 {
        return Err(Error::DegenerateFit(format!("need at least 3 points, got {}", x.len())));
    }
    if x.iter().chain(y).any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::DegenerateFit("all data must be positive and finite".into()));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (fixed, offset) = match model {
        ScalingModel::SqrtInverseTime { num_sites, total_time } => {
            if num_sites == 0 || !(total_time > 0.0) {
                return Err(Error::InvalidParameter("N and T must be positive".into()));
            }
            (Some(-0.5), -0.5 * (num_sites as f64 * total_time).ln())
        }
        ScalingModel::PowerLaw { exponent } => (exponent, 0.0),
    };
    let (slope, intercept, stderr) = match fixed {
        Some(b) => {
            let c = lx.iter().zip(&ly).map(|(u, v)| v - b * u).sum::<f64>() / n;
            (b, c, 0.0)
        }
        None => {
            let mx = lx.iter().sum::<f64>() / n;
            let my = ly.iter().sum::<f64>() / n;
            let sxx: f64 = lx.iter().map(|u| (u - mx).powi(2)).sum();
            let spread = lx.iter().map(|u| (u - mx).abs()).fold(0.0, f64::max);
            if spread <= 1e-12 * (1.0 + mx.abs()) {
                return Err(Error::DegenerateFit("abscissae are all equal".into()));
            }
            let sxy: f64 = lx.iter().zip(&ly).map(|(u, v)| (u - mx) * (v - my)).sum();
            let b = sxy / sxx;
            let c = my - b * mx;
            let rss: f64 = lx.iter().zip(&ly).map(|(u, v)| (v - c - b * u).powi(2)).sum();
            let se = if lx.len() > 2 { (rss / (n - 2.0) / sxx).sqrt() } else { 0.0 };
            (b, c, se)
        }
    };
    let rss: f64 = lx.iter().zip(&ly).map(|(u, v)| (v - intercept - slope * u).powi(2)).sum();
    Ok(FitResult {
        model,
        prefactor: (intercept - offset).exp(),
        exponent: slope,
        exponent_stderr: stderr,
        residual_rms: (rss / n).sqrt(),
        points: lx.len(),
    })
}
