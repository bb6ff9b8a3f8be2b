//! Command-line surface of the pulse-fingerprint pipeline. Seven
//! subcommands share one flag set: a JSON config plus targeted
//! overrides, an output directory, and a worker count. Exit codes:
//! 0 success, 2 parameter/validation errors, 3 runtime failures.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use essc_core::essc::FeatureMode;
use essc_core::signal::PulseFamily;
use essc_core::{Error, Result};

pub mod commands;
pub mod config;
pub mod io;
pub mod manifest;

use commands::Stage;

#[derive(Debug, Parser)]
#[command(name = "essc", version, about = "Pulse-waveform fingerprinting and classification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate the training datasets, one CSV per deformation class.
    Generate(StageArgs),
    /// Train the classifier across the configured hidden-layer sizes.
    Train(StageArgs),
    /// Evaluate the trained model on fresh test sets at each SNR.
    Evaluate(StageArgs),
    /// Scan per-parameter sensitivities of the trained model.
    Sensitivity(StageArgs),
    /// Rank feature relevance with ReliefF.
    Relieff(StageArgs),
    /// Merge the stage CSVs into one JSON results bundle.
    Report(StageArgs),
    /// Replay recorded manifests and confirm byte-identical outputs.
    Verify(StageArgs),
}

impl Command {
    pub fn args(&self) -> &StageArgs {
        match self {
            Command::Generate(a)
            | Command::Train(a)
            | Command::Evaluate(a)
            | Command::Sensitivity(a)
            | Command::Relieff(a)
            | Command::Report(a)
            | Command::Verify(a) => a,
        }
    }
}

/// Flags shared by every subcommand. Flag overrides beat config keys.
#[derive(Debug, Args)]
pub struct StageArgs {
    /// Experiment config JSON; omitted keys use library defaults.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Master seed override.
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,
    /// Feature mode override.
    #[arg(long, value_enum, value_name = "MODE")]
    pub mode: Option<ModeArg>,
    /// Pulse family (required unless the config names one).
    #[arg(long, value_enum, value_name = "FAMILY")]
    pub pulse: Option<PulseArg>,
    /// Test SNR override, comma-separated dB values.
    #[arg(long = "snr-db", value_name = "LIST", value_delimiter = ',', num_args = 1..)]
    pub snr_db: Option<Vec<f64>>,
    /// Worker threads (default: one per core).
    #[arg(long, value_name = "N")]
    pub jobs: Option<usize>,
    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
}

/// `--mode` values: the full 30-parameter vector or its 4-parameter head.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Essc,
    Ssc,
}

impl From<ModeArg> for FeatureMode {
    fn from(mode: ModeArg) -> Self {
        match mode {
            ModeArg::Essc => FeatureMode::Essc30,
            ModeArg::Ssc => FeatureMode::Ssc4,
        }
    }
}

/// `--pulse` values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PulseArg {
    Sinc,
    Gaussian,
    Chirp,
}

impl From<PulseArg> for PulseFamily {
    fn from(pulse: PulseArg) -> Self {
        match pulse {
            PulseArg::Sinc => PulseFamily::Sinc,
            PulseArg::Gaussian => PulseFamily::Gaussian,
            PulseArg::Chirp => PulseFamily::Chirp,
        }
    }
}

/// Dispatch one parsed invocation.
pub fn run(cli: Cli) -> Result<()> {
    let args = cli.command.args();
    if let Some(jobs) = args.jobs {
        if jobs == 0 {
            return Err(Error::Validation("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Error::Validation(format!("--jobs: {e}")))?;
    }
    match &cli.command {
        Command::Verify(args) => commands::verify(args),
        other => {
            let stage = Stage::from_args(other.args())?;
            match other {
                Command::Generate(_) => commands::generate(&stage),
                Command::Train(_) => commands::train(&stage),
                Command::Evaluate(_) => commands::evaluate(&stage),
                Command::Sensitivity(_) => commands::sensitivity(&stage),
                Command::Relieff(_) => commands::relieff(&stage),
                Command::Report(_) => commands::report(&stage),
                Command::Verify(_) => unreachable!("handled above"),
            }
        }
    }
}
