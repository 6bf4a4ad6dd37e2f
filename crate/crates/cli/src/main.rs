//! `fpc`: feature extraction, MI ranking, cascade training, evaluation and
//! synthetic benchmarks from the command line.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data or model
//! error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "fpc", version, about = "Fuzzy parallel cascade identification")]
struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ConfigArg {
    /// TOML run configuration.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
}

/// Where the target series comes from.
#[derive(Debug, Args)]
struct TargetArgs {
    /// CSV holding the target column; defaults to the features file.
    #[arg(long, value_name = "PATH")]
    targets: Option<PathBuf>,

    /// Target column name; optional when the targets file has one column.
    #[arg(long, value_name = "COLUMN")]
    target: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelKind {
    Fpc,
    Linear,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Band-power features from a channel CSV.
    ExtractFeatures {
        #[command(flatten)]
        config: ConfigArg,
        /// Channel CSV (`t_sec` plus one column per channel).
        #[arg(long, value_name = "PATH")]
        input: Option<PathBuf>,
        /// Band list, e.g. `theta:4:8,alpha:8:13,beta:13:31`.
        #[arg(long)]
        bands: Option<String>,
        /// Output feature CSV; standard output when omitted.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Rank features by mutual information with a target.
    MiRank {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, value_name = "PATH")]
        features: Option<PathBuf>,
        #[command(flatten)]
        target: TargetArgs,
        /// Histogram bins per axis; defaults to `fit.mi_bins`.
        #[arg(long)]
        bins: Option<usize>,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Fit a model on a feature CSV and save it.
    Train {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, value_name = "PATH")]
        features: Option<PathBuf>,
        #[command(flatten)]
        target: TargetArgs,
        #[arg(long, value_enum, default_value = "fpc")]
        kind: ModelKind,
        /// Output model file.
        #[arg(long, value_name = "PATH")]
        model: Option<PathBuf>,
        /// Also write the learned rules as text (FPC only).
        #[arg(long, value_name = "PATH")]
        rules: Option<PathBuf>,
    },
    /// Score a saved model on a feature CSV.
    Eval {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, value_name = "PATH")]
        features: Option<PathBuf>,
        #[command(flatten)]
        target: TargetArgs,
        #[arg(long, value_name = "PATH")]
        model: Option<PathBuf>,
        /// JSON RMSE report; standard output when omitted.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        /// Also write the predicted series as CSV.
        #[arg(long, value_name = "PATH")]
        predictions: Option<PathBuf>,
    },
    /// Generate a synthetic benchmark into a directory.
    Synth {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        n_channels: Option<usize>,
        #[arg(long)]
        duration_sec: Option<f64>,
        #[arg(long)]
        sample_rate_hz: Option<f64>,
        /// `static-poly`, `saturating` or `bilinear`.
        #[arg(long)]
        nonlinearity: Option<String>,
        /// Target SNR in dB; `inf` for a noiseless target.
        #[arg(long)]
        snr_db: Option<f64>,
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Identification/validation experiment comparing FPC with the linear
    /// baseline.
    Run {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, value_name = "PATH")]
        channels: Option<PathBuf>,
        /// CSV of target columns.
        #[arg(long, value_name = "PATH")]
        targets: Option<PathBuf>,
        /// Target column to model; repeat for several, all columns when omitted.
        #[arg(long, value_name = "COLUMN")]
        target: Vec<String>,
        #[arg(long)]
        bands: Option<String>,
        /// Identify on the second half and validate on the first.
        #[arg(long)]
        swap_halves: bool,
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();

    match commands::dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<commands::UsageError>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
