//! Config-driven front end for the `scarsense` binary.

pub mod config;
pub mod output;
pub mod run;

use scar_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("numerical error: {0}")]
    Numerical(CoreError),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        // parameter and size problems come from the config, not the numerics
        match e {
            CoreError::InvalidSpace(_) | CoreError::InvalidSector(_) | CoreError::InvalidParameter(_) | CoreError::BudgetExceeded { .. } => {
                CliError::Config(e.to_string())
            }
            other => CliError::Numerical(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

/// Resolve, run and write one task. Returns the headline.
pub fn execute(task: config::Task, config: &config::RunConfig, out: &std::path::Path, jobs: Option<usize>, quiet: bool) -> Result<String, CliError> {
    config.validate()?;
    config.require_section(task)?;
    let ctx = run::Context { config, out, jobs, quiet };
    let artifacts = match task {
        config::Task::Sense => run::sense(&ctx)?,
        config::Task::Sweep => run::sweep_task(&ctx)?,
        config::Task::Spectrum => run::spectrum(&ctx)?,
        config::Task::Scars => run::scars(&ctx)?,
        config::Task::Pulses => run::pulses(&ctx)?,
        config::Task::Squeeze => run::squeeze(&ctx)?,
        config::Task::Fit => run::fit(&ctx)?,
    };
    output::write_all(out, task, config, &artifacts)?;
    Ok(artifacts.headline)
}
