//! `rabi-spt`: quench simulation, Wigner tomography, reconstruction,
//! metrics and model comparison driven by a TOML configuration.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 configuration error,
//! 3 numerical failure, 4 reconstruction not converged (best iterate kept).

mod commands;
mod config;
mod io;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rabi_spt::model::HamiltonianLevel;

use config::{RunConfig, TomographyMode};

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Config(String),
    Numerical(String),
    NotConverged(String),
}

impl CliError {
    fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::NotConverged(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(m) => write!(f, "I/O error: {m}"),
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::NotConverged(m) => write!(f, "not converged: {m}"),
        }
    }
}

impl From<rabi_spt::Error> for CliError {
    fn from(e: rabi_spt::Error) -> Self {
        use rabi_spt::Error as E;
        match e {
            E::InvalidSpec(_)
            | E::InvalidParameter(_)
            | E::InvalidState(_)
            | E::Index { .. }
            | E::Unsupported(_)
            | E::CriticalPoint { .. }
            | E::DispersiveViolation { .. }
            | E::GridMismatch(_)
            | E::Parse(_) => CliError::Config(e.to_string()),
            E::NotConverged { .. } => CliError::NotConverged(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "rabi-spt", version, about = "Superradiant quantum Rabi model toolkit")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration; defaults apply to every missing key.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (default rabi-spt-out/<command>).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Forward Wigner matrix of the state.
    #[arg(long, global = true, conflicts_with = "measured")]
    exact: bool,
    /// Simulated measurement chain with shot noise and readout errors.
    #[arg(long, global = true)]
    measured: bool,
    #[arg(long, global = true, value_enum)]
    level: Option<LevelArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Rabi,
    Rotating,
    ThreeLevel,
}

impl From<LevelArg> for HamiltonianLevel {
    fn from(l: LevelArg) -> Self {
        match l {
            LevelArg::Rabi => HamiltonianLevel::Rabi,
            LevelArg::Rotating => HamiltonianLevel::Rotating,
            LevelArg::ThreeLevel => HamiltonianLevel::ThreeLevel,
        }
    }
}

#[derive(Args)]
struct StateArgs {
    /// Density CSV, or a quench output directory.
    #[arg(long)]
    state: Option<PathBuf>,
    /// Analytic preset (vacuum, fock1, coherent, even-cat, np, sp, cat, ground).
    #[arg(long, conflicts_with = "state")]
    preset: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the coupling ramp and write the trajectory and snapshots.
    Quench,
    /// Wigner matrix of a state on the tomography grid.
    Wigner(StateArgs),
    /// Density matrix and metrics from a Wigner CSV.
    Reconstruct {
        /// Wigner CSV, or a wigner output directory.
        #[arg(long)]
        input: PathBuf,
    },
    /// Entanglement, coherence and cat-size metrics of a state.
    Metrics(StateArgs),
    /// Effective vs full vs decoherent full model at the end of the ramp.
    Compare,
}

fn load_config(common: &Common) -> Result<RunConfig, CliError> {
    let mut config = match &common.config {
        Some(path) => RunConfig::from_toml(&io::read_text(path)?)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(out) = &common.out {
        config.out = Some(out.clone());
    }
    if let Some(level) = common.level {
        config.level = level.into();
    }
    if common.exact {
        config.tomography.mode = TomographyMode::Exact;
    }
    if common.measured {
        config.tomography.mode = TomographyMode::Measured;
    }
    Ok(config)
}

fn apply_state(config: &mut RunConfig, args: &StateArgs) {
    if let Some(path) = &args.state {
        config.state.path = Some(path.clone());
    }
    if let Some(preset) = &args.preset {
        config.state.path = None;
        config.state.preset = preset.clone();
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut config = load_config(&cli.common)?;
    match &cli.command {
        Command::Quench => commands::quench(&config),
        Command::Wigner(args) => {
            apply_state(&mut config, args);
            commands::wigner(&config)
        }
        Command::Reconstruct { input } => commands::reconstruct(&config, input),
        Command::Metrics(args) => {
            apply_state(&mut config, args);
            commands::metrics(&config)
        }
        Command::Compare => commands::compare(&config),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rabi-spt: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
