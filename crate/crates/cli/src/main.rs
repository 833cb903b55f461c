use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use scar_cli::config::{self, Task};
use scar_cli::CliError;

#[derive(Parser)]
#[command(name = "scarsense", version, about = "Sensing and scar diagnostics for spin-1 DMI chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimation error against sensing time
    Sense(Common),
    /// Grid of parameter points, optimized sensing time at each
    Sweep(Common),
    /// Spectrum, level statistics and eigenstate scans
    Spectrum(Common),
    /// Verify the Dicke scar tower
    Scars(Common),
    /// Pulse-sequence sensing
    Pulses(Common),
    /// Two-axis twisting squeezing
    Squeeze(Common),
    /// Fit scaling laws to a sweep CSV
    Fit(Common),
}

#[derive(Args)]
struct Common {
    /// JSON config, or a summary JSON from a previous run
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads for sweeps
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Override the end of the time window
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    quiet: bool,
}

fn run(task: Task, common: Common) -> Result<String, CliError> {
    let mut cfg = config::load(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(t) = common.t_max {
        cfg.protocol.t_max = Some(t);
    }
    if common.jobs == Some(0) {
        return Err(CliError::Config("--jobs: must be at least 1".into()));
    }
    cfg.task.get_or_insert(task);
    scar_cli::execute(task, &cfg, &common.out, common.jobs, common.quiet)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (task, common) = match cli.command {
        Command::Sense(c) => (Task::Sense, c),
        Command::Sweep(c) => (Task::Sweep, c),
        Command::Spectrum(c) => (Task::Spectrum, c),
        Command::Scars(c) => (Task::Scars, c),
        Command::Pulses(c) => (Task::Pulses, c),
        Command::Squeeze(c) => (Task::Squeeze, c),
        Command::Fit(c) => (Task::Fit, c),
    };
    match run(task, common) {
        Ok(headline) => {
            println!("{headline}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("scarsense: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
