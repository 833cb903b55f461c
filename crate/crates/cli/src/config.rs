//! Run configuration: a JSON document with unknown keys rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Sense,
    Sweep,
    Spectrum,
    Scars,
    Pulses,
    Squeeze,
    Fit,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Sense => "sense",
            Task::Sweep => "sweep",
            Task::Spectrum => "spectrum",
            Task::Scars => "scars",
            Task::Pulses => "pulses",
            Task::Squeeze => "squeeze",
            Task::Fit => "fit",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryConfig {
    #[default]
    Periodic,
    Open,
}

impl BoundaryConfig {
    pub fn to_core(self) -> scar_core::basis::Boundary {
        match self {
            BoundaryConfig::Periodic => scar_core::basis::Boundary::Periodic,
            BoundaryConfig::Open => scar_core::basis::Boundary::Open,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingKind {
    /// `lambda / d^2`.
    #[default]
    InverseSquare,
    NearestNeighbor,
    /// `lambda c / d^2`, `c` uniform in `[0.5, 1]` from the run seed.
    Random,
    Zero,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Spin1Model {
    pub n: usize,
    #[serde(default)]
    pub boundary: BoundaryConfig,
    #[serde(default = "one")]
    pub omega: f64,
    #[serde(default)]
    pub lambda: f64,
    #[serde(default)]
    pub phi: f64,
    #[serde(default)]
    pub couplings: CouplingKind,
    /// `D`.
    #[serde(default)]
    pub anisotropy: f64,
    /// `Omega`.
    #[serde(default)]
    pub transverse: f64,
    /// `eta`, the phase of the transverse drive.
    #[serde(default)]
    pub eta: f64,
    /// Width `Delta` of uniform random site fields drawn from the run seed.
    #[serde(default)]
    pub disorder: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MfiModel {
    pub n: usize,
    #[serde(default)]
    pub boundary: BoundaryConfig,
    #[serde(default = "one")]
    pub omega: f64,
    /// Longitudinal field `Omega`.
    #[serde(default)]
    pub big_omega: f64,
    /// When set, `Omega` follows `lambda` as `Omega = r lambda` and
    /// `big_omega` is ignored. Lets a sweep move along a line `Omega = r lambda`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub big_omega_per_lambda: Option<f64>,
    /// Ising coupling `lambda`.
    pub lambda: f64,
    #[serde(default)]
    pub eta: f64,
}

impl MfiModel {
    pub fn longitudinal(&self) -> f64 {
        self.big_omega_per_lambda.map_or(self.big_omega, |r| r * self.lambda)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PxpModel {
    pub n: usize,
    #[serde(default)]
    pub boundary: BoundaryConfig,
    #[serde(default = "one")]
    pub omega: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelConfig {
    Spin1Dmi(Spin1Model),
    Mfi(MfiModel),
    Pxp(PxpModel),
}

impl ModelConfig {
    pub fn num_sites(&self) -> usize {
        match self {
            ModelConfig::Spin1Dmi(m) => m.n,
            ModelConfig::Mfi(m) => m.n,
            ModelConfig::Pxp(m) => m.n,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ModelConfig::Spin1Dmi(_) => "spin1-dmi",
            ModelConfig::Mfi(_) => "mfi",
            ModelConfig::Pxp(_) => "pxp",
        }
    }

    /// Parameter names a sweep axis may set.
    pub fn sweepable(&self) -> &'static [&'static str] {
        match self {
            ModelConfig::Spin1Dmi(_) => &["n", "omega", "lambda", "phi", "anisotropy", "transverse", "eta", "disorder"],
            ModelConfig::Mfi(_) => &["n", "omega", "big_omega", "lambda", "eta"],
            ModelConfig::Pxp(_) => &["n", "omega"],
        }
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<(), String> {
        let as_n = |v: f64| -> Result<usize, String> {
            if v >= 1.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(format!("n must be a positive integer, got {v}"))
            }
        };
        match self {
            ModelConfig::Spin1Dmi(m) => match name {
                "n" => m.n = as_n(value)?,
                "omega" => m.omega = value,
                "lambda" => m.lambda = value,
                "phi" => m.phi = value,
                "anisotropy" => m.anisotropy = value,
                "transverse" => m.transverse = value,
                "eta" => m.eta = value,
                "disorder" => m.disorder = value,
                _ => return Err(format!("unknown spin1-dmi parameter {name:?}")),
            },
            ModelConfig::Mfi(m) => match name {
                "n" => m.n = as_n(value)?,
                "omega" => m.omega = value,
                "big_omega" => m.big_omega = value,
                "lambda" => m.lambda = value,
                "eta" => m.eta = value,
                _ => return Err(format!("unknown mfi parameter {name:?}")),
            },
            ModelConfig::Pxp(m) => match name {
                "n" => m.n = as_n(value)?,
                "omega" => m.omega = value,
                _ => return Err(format!("unknown pxp parameter {name:?}")),
            },
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        Some(match (self, name) {
            (ModelConfig::Spin1Dmi(m), "n") => m.n as f64,
            (ModelConfig::Spin1Dmi(m), "omega") => m.omega,
            (ModelConfig::Spin1Dmi(m), "lambda") => m.lambda,
            (ModelConfig::Spin1Dmi(m), "phi") => m.phi,
            (ModelConfig::Spin1Dmi(m), "anisotropy") => m.anisotropy,
            (ModelConfig::Spin1Dmi(m), "transverse") => m.transverse,
            (ModelConfig::Spin1Dmi(m), "eta") => m.eta,
            (ModelConfig::Spin1Dmi(m), "disorder") => m.disorder,
            (ModelConfig::Mfi(m), "n") => m.n as f64,
            (ModelConfig::Mfi(m), "omega") => m.omega,
            (ModelConfig::Mfi(m), "big_omega") => m.longitudinal(),
            (ModelConfig::Mfi(m), "lambda") => m.lambda,
            (ModelConfig::Mfi(m), "eta") => m.eta,
            (ModelConfig::Pxp(m), "n") => m.n as f64,
            (ModelConfig::Pxp(m), "omega") => m.omega,
            _ => return None,
        })
    }

    /// Whether the run seed enters the model.
    pub fn uses_seed(&self) -> bool {
        match self {
            ModelConfig::Spin1Dmi(m) => m.couplings == CouplingKind::Random || m.disorder != 0.0,
            _ => false,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialState {
    /// `|+>^N` for spin-1 (the default there).
    Plus,
    /// Neel state for MFI (the default there).
    Neel,
    PolarizedDown,
    #[default]
    Default,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reduction {
    #[default]
    Auto,
    Full,
    Parity,
}

fn per_decade() -> usize {
    200
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    #[serde(default)]
    pub initial: InitialState,
    #[serde(default = "one")]
    pub total_time: f64,
    /// Explicit sensing times; when absent the error is optimized over the grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(default = "per_decade")]
    pub per_decade: usize,
    #[serde(default = "yes")]
    pub refine: bool,
    #[serde(default)]
    pub reduction: Reduction,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            initial: InitialState::Default,
            total_time: 1.0,
            times: None,
            t_min: None,
            t_max: None,
            per_decade: per_decade(),
            refine: true,
            reduction: Reduction::Auto,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitTarget {
    TStar,
    DeltaOmegaStar,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSpec {
    pub name: String,
    /// A model parameter, `t_star`, or `abs_lambda_cos_phi`.
    pub x: String,
    pub y: FitTarget,
    pub model: scar_core::metrology::ScalingModel,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axes: Vec<Axis>,
    #[serde(default)]
    pub fits: Vec<FitSpec>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectorConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub momentum: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub magnetization: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reflection: Option<i8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub number_parity: Option<i8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translation_step: Option<usize>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObservableKind {
    #[default]
    None,
    /// Number of `m = 0` sites (spin-1).
    N0,
    Magnetization,
}

fn bins() -> usize {
    30
}

fn s_max() -> f64 {
    4.0
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    #[serde(default)]
    pub sector: SectorConfig,
    #[serde(default)]
    pub observable: ObservableKind,
    /// Half-chain entanglement entropy of every eigenstate.
    #[serde(default)]
    pub entropy: bool,
    #[serde(default = "bins")]
    pub histogram_bins: usize,
    #[serde(default = "s_max")]
    pub histogram_s_max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulsesConfig {
    pub counts: Vec<usize>,
    pub times: Vec<f64>,
}

fn scan_points() -> usize {
    200
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SqueezeConfig {
    pub sizes: Vec<usize>,
    #[serde(default = "scan_points")]
    pub scan_points: usize,
    /// Also run the full-space model at its own N and compare the sensing
    /// error with `xi / sqrt(N t T)` at these times.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub full_space_times: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    /// Sweep CSV produced by an earlier run.
    pub input: String,
    pub fits: Vec<FitSpec>,
}

fn schema() -> u32 {
    SCHEMA_VERSION
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "schema")]
    pub schema_version: u32,
    /// Optional; must agree with the subcommand when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task: Option<Task>,
    /// Free-form note, echoed in outputs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default)]
    pub seed: u64,
    pub model: ModelConfig,
    #[serde(default)]
    pub protocol: ProtocolConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pulses: Option<PulsesConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub squeeze: Option<SqueezeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitConfig>,
}

fn config_error(path: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{path}: {msg}"))
}

/// Parses a config, or the config embedded in a summary written by an
/// earlier run.
pub fn parse(text: &str) -> Result<RunConfig, CliError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid JSON: {e}")))?;
    let (value, prefix) = match value {
        serde_json::Value::Object(mut map) if map.get("tool").and_then(|t| t.as_str()) == Some("scarsense") => {
            let inner = map.remove("config").ok_or_else(|| CliError::Config("summary has no embedded config".into()))?;
            (inner, "config.")
        }
        other => (other, ""),
    };
    let config: RunConfig = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." { String::new() } else { path };
        CliError::Config(format!("{prefix}{path}: {}", e.inner()))
    })?;
    config.validate()?;
    Ok(config)
}

pub fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    parse(&text)
}

fn finite(path: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(config_error(path, "must be finite"))
    }
}

fn positive(path: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(config_error(path, format!("must be positive, got {v}")))
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(config_error("schema_version", format!("unsupported version {}, expected {SCHEMA_VERSION}", self.schema_version)));
        }
        if self.model.num_sites() == 0 {
            return Err(config_error("model.n", "must be at least 1"));
        }
        match &self.model {
            ModelConfig::Spin1Dmi(m) => {
                for (k, v) in [
                    ("omega", m.omega),
                    ("lambda", m.lambda),
                    ("phi", m.phi),
                    ("anisotropy", m.anisotropy),
                    ("transverse", m.transverse),
                    ("eta", m.eta),
                    ("disorder", m.disorder),
                ] {
                    finite(&format!("model.{k}"), v)?;
                }
            }
            ModelConfig::Mfi(m) => {
                for (k, v) in [("omega", m.omega), ("big_omega", m.big_omega), ("lambda", m.lambda), ("eta", m.eta)] {
                    finite(&format!("model.{k}"), v)?;
                }
                if let Some(r) = m.big_omega_per_lambda {
                    finite("model.big_omega_per_lambda", r)?;
                    if m.big_omega != 0.0 {
                        return Err(config_error("model.big_omega", "give either big_omega or big_omega_per_lambda"));
                    }
                }
            }
            ModelConfig::Pxp(m) => finite("model.omega", m.omega)?,
        }
        let p = &self.protocol;
        positive("protocol.total_time", p.total_time)?;
        if let Some(times) = &p.times {
            if times.is_empty() {
                return Err(config_error("protocol.times", "must not be empty"));
            }
            for (i, &t) in times.iter().enumerate() {
                positive(&format!("protocol.times[{i}]"), t)?;
            }
        }
        if let Some(t) = p.t_min {
            positive("protocol.t_min", t)?;
        }
        if let Some(t) = p.t_max {
            positive("protocol.t_max", t)?;
        }
        if let (Some(a), Some(b)) = (p.t_min, p.t_max) {
            if a >= b {
                return Err(config_error("protocol.t_max", "must exceed t_min"));
            }
        }
        if p.per_decade == 0 {
            return Err(config_error("protocol.per_decade", "must be at least 1"));
        }
        let initial_ok = match (&self.model, p.initial) {
            (_, InitialState::Default) => true,
            (ModelConfig::Spin1Dmi(_), InitialState::Plus) => true,
            (ModelConfig::Mfi(_), InitialState::Neel | InitialState::PolarizedDown) => true,
            _ => false,
        };
        if !initial_ok {
            return Err(config_error("protocol.initial", format!("{:?} is not available for model {}", p.initial, self.model.kind())));
        }
        if let Some(s) = &self.sweep {
            if s.axes.is_empty() {
                return Err(config_error("sweep.axes", "must not be empty"));
            }
            for (i, axis) in s.axes.iter().enumerate() {
                if !self.model.sweepable().contains(&axis.name.as_str()) {
                    return Err(config_error(
                        &format!("sweep.axes[{i}].name"),
                        format!("{:?} is not a {} parameter (expected one of {:?})", axis.name, self.model.kind(), self.model.sweepable()),
                    ));
                }
                if axis.values.is_empty() {
                    return Err(config_error(&format!("sweep.axes[{i}].values"), "must not be empty"));
                }
                if s.axes[..i].iter().any(|a| a.name == axis.name) {
                    return Err(config_error(&format!("sweep.axes[{i}].name"), "repeated axis"));
                }
                let mut probe = self.model.clone();
                for (j, &v) in axis.values.iter().enumerate() {
                    finite(&format!("sweep.axes[{i}].values[{j}]"), v)?;
                    probe.set(&axis.name, v).map_err(|e| config_error(&format!("sweep.axes[{i}].values[{j}]"), e))?;
                }
            }
            validate_fits("sweep.fits", &s.fits, Some(self.model.sweepable()))?;
        }
        if let Some(f) = &self.fit {
            validate_fits("fit.fits", &f.fits, None)?;
            if f.fits.is_empty() {
                return Err(config_error("fit.fits", "must not be empty"));
            }
        }
        if let Some(s) = &self.spectrum {
            if s.histogram_bins == 0 {
                return Err(config_error("spectrum.histogram_bins", "must be at least 1"));
            }
            positive("spectrum.histogram_s_max", s.histogram_s_max)?;
        }
        if let Some(p) = &self.pulses {
            if p.counts.is_empty() {
                return Err(config_error("pulses.counts", "must not be empty"));
            }
            for (i, &t) in p.times.iter().enumerate() {
                positive(&format!("pulses.times[{i}]"), t)?;
            }
            if p.times.is_empty() {
                return Err(config_error("pulses.times", "must not be empty"));
            }
        }
        if let Some(s) = &self.squeeze {
            for (i, &n) in s.sizes.iter().enumerate() {
                if n < 2 {
                    return Err(config_error(&format!("squeeze.sizes[{i}]"), "must be at least 2"));
                }
            }
            if s.scan_points < 2 {
                return Err(config_error("squeeze.scan_points", "must be at least 2"));
            }
        }
        Ok(())
    }

    /// Section required by `task`, with a path-precise error when missing.
    pub fn require_section(&self, task: Task) -> Result<(), CliError> {
        let present = match task {
            Task::Sense | Task::Scars => true,
            Task::Sweep => self.sweep.is_some(),
            Task::Spectrum => true,
            Task::Pulses => self.pulses.is_some(),
            Task::Squeeze => self.squeeze.is_some(),
            Task::Fit => self.fit.is_some(),
        };
        if !present {
            return Err(config_error(task.name(), format!("section required by task {}", task.name())));
        }
        if let Some(t) = self.task {
            if t != task {
                return Err(config_error("task", format!("config is for task {}, but {} was requested", t.name(), task.name())));
            }
        }
        Ok(())
    }
}

fn validate_fits(path: &str, fits: &[FitSpec], params: Option<&[&str]>) -> Result<(), CliError> {
    for (i, f) in fits.iter().enumerate() {
        if let Some(params) = params {
            let ok = f.x == "t_star" || params.contains(&f.x.as_str()) || (f.x == "abs_lambda_cos_phi" && params.contains(&"phi"));
            if !ok {
                return Err(config_error(&format!("{path}[{i}].x"), format!("{:?} is not a model parameter, t_star, or abs_lambda_cos_phi", f.x)));
            }
        }
        if let scar_core::metrology::ScalingModel::SqrtInverseTime { num_sites, total_time } = f.model {
            if num_sites == 0 || !(total_time > 0.0) {
                return Err(config_error(&format!("{path}[{i}].model"), "num_sites and total_time must be positive"));
            }
        }
    }
    Ok(())
}
