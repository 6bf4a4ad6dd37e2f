use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use fpc_core::baseline::{self, LinearModel};
use fpc_core::experiment;
use fpc_core::fpc::{self, FpcModel};
use fpc_core::mi;
use fpc_core::persist::{self, AnyModel};
use fpc_core::signal;
use fpc_core::synth::{self, Nonlinearity};
use fpc_core::wavelet::{self, FeatureBank};
use fpc_core::{io as csvio, TimeSeries};
use log::info;
use serde::Serialize;

use crate::config::RunConfig;
use crate::{Command, ModelKind, TargetArgs};

/// Bad invocation or configuration (exit code 1).
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    RunConfig::load_or_default(path).map_err(|e| usage(format!("{e:#}")))
}

/// Flag value, else the configured path, else a usage error naming the flag.
fn resolve(flag: Option<PathBuf>, configured: &Option<PathBuf>, name: &str) -> Result<PathBuf> {
    flag.or_else(|| configured.clone())
        .ok_or_else(|| usage(format!("missing --{name} (or paths.{name} in the config)")))
}

fn read_series(path: &Path) -> Result<Vec<TimeSeries>> {
    Ok(csvio::read_csv_file(path)?)
}

fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => io::stdout()
            .write_all(text.as_bytes())
            .context("cannot write to standard output"),
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Removes the target column from `features` or reads it from `--targets`.
fn load_target(features: &mut Vec<TimeSeries>, args: &TargetArgs, configured: &Option<PathBuf>) -> Result<TimeSeries> {
    let targets_path = args.targets.clone().or_else(|| configured.clone());
    let target = match targets_path {
        Some(path) => {
            let mut targets = read_series(&path)?;
            match &args.target {
                Some(name) => csvio::take_column(&mut targets, name)
                    .with_context(|| format!("target column not found in {}", path.display()))?,
                None if targets.len() == 1 => targets.remove(0),
                None => {
                    return Err(usage(format!(
                        "{} has several columns; pick one with --target",
                        path.display()
                    )))
                }
            }
        }
        None => {
            let name = args
                .target
                .as_deref()
                .ok_or_else(|| usage("missing --target (or --targets)"))?;
            csvio::take_column(features, name).context("target column not found in the features file")?
        }
    };
    Ok(target)
}

fn feature_bank(
    path: &Path,
    args: &TargetArgs,
    configured_targets: &Option<PathBuf>,
) -> Result<(FeatureBank, TimeSeries)> {
    let mut features = read_series(path)?;
    let target = load_target(&mut features, args, configured_targets)?;
    let bank = FeatureBank::new(features)?;
    bank.check_aligned(&target)?;
    Ok((bank, target))
}

pub fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::ExtractFeatures {
            config,
            input,
            bands,
            out,
        } => {
            let cfg = load_config(config.config.as_deref())?;
            let features = cfg
                .feature_config(bands.as_deref())
                .map_err(|e| usage(format!("{e:#}")))?;
            let input = resolve(input, &cfg.paths.channels, "input")?;
            let channels = read_series(&input)?;
            let bank = wavelet::build_feature_bank(&channels, &features)?;
            info!("extracted {} features from {}", bank.len(), input.display());
            match out.or(cfg.paths.features) {
                Some(p) => csvio::write_csv_file(&p, bank.features())?,
                None => csvio::write_csv(io::stdout().lock(), bank.features())?,
            }
            Ok(())
        }

        Command::MiRank {
            config,
            features,
            target,
            bins,
            out,
        } => {
            let cfg = load_config(config.config.as_deref())?;
            let path = resolve(features, &cfg.paths.features, "features")?;
            let (bank, y) = feature_bank(&path, &target, &cfg.paths.targets)?;
            let ranking = mi::rank_features(&bank, &y, bins.unwrap_or(cfg.fit.mi_bins))?;
            write_text(out.as_deref(), &ranking.to_csv())
        }

        Command::Train {
            config,
            features,
            target,
            kind,
            model,
            rules,
        } => {
            let cfg = load_config(config.config.as_deref())?;
            let path = resolve(features, &cfg.paths.features, "features")?;
            let model_path = resolve(model, &cfg.paths.model, "model")?;
            let (bank, y) = feature_bank(&path, &target, &cfg.paths.targets)?;
            let text = match kind {
                ModelKind::Fpc => {
                    let m = fpc::fit(&bank, &y, &cfg.fit)?;
                    info!(
                        "{} cascades, stop: {:?}, training RMSE {}",
                        m.cascades.len(),
                        m.training_report.stop_reason,
                        m.training_report.final_training_rmse
                    );
                    if let Some(p) = &rules {
                        fs::write(p, m.rule_dump()).with_context(|| format!("cannot write {}", p.display()))?;
                    }
                    persist::save(&m)?
                }
                ModelKind::Linear => {
                    if rules.is_some() {
                        return Err(usage("--rules applies to fpc models only"));
                    }
                    let delays = cfg.experiment.lr_delays.clone().unwrap_or_else(|| cfg.fit.delays());
                    persist::save(&baseline::fit_lr(&bank, &y, &delays)?)?
                }
            };
            fs::write(&model_path, text).with_context(|| format!("cannot write {}", model_path.display()))
        }

        Command::Eval {
            config,
            features,
            target,
            model,
            out,
            predictions,
        } => {
            let cfg = load_config(config.config.as_deref())?;
            let path = resolve(features, &cfg.paths.features, "features")?;
            let model_path = resolve(model, &cfg.paths.model, "model")?;
            let text =
                fs::read_to_string(&model_path).with_context(|| format!("cannot read {}", model_path.display()))?;
            let model = persist::load_any(&text).with_context(|| format!("cannot load {}", model_path.display()))?;
            let (bank, y) = feature_bank(&path, &target, &cfg.paths.targets)?;
            let report = evaluate(&model, &bank, &y)?;
            if let Some(p) = predictions {
                csvio::write_csv_file(&p, &[report.1])?;
            }
            write_text(out.as_deref(), &to_json(&report.0)?)
        }

        Command::Synth {
            config,
            seed,
            n_channels,
            duration_sec,
            sample_rate_hz,
            nonlinearity,
            snr_db,
            out,
        } => {
            let cfg = load_config(config.config.as_deref())?;
            let mut spec = cfg.synth.clone();
            if let Some(v) = seed {
                spec.seed = v;
            }
            if let Some(v) = n_channels {
                spec.n_channels = v;
            }
            if let Some(v) = duration_sec {
                spec.duration_sec = v;
            }
            if let Some(v) = sample_rate_hz {
                spec.sample_rate_hz = v;
            }
            if let Some(v) = nonlinearity {
                spec.nonlinearity = v.parse::<Nonlinearity>().map_err(|e| usage(e.to_string()))?;
            }
            if let Some(v) = snr_db {
                spec.snr_db = v;
            }
            spec.validate().map_err(|e| usage(e.to_string()))?;
            let dir = resolve(out, &cfg.paths.out, "out")?;
            fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
            let data = synth::generate(&spec)?;
            csvio::write_csv_file(dir.join("channels.csv"), &data.channel_list())?;
            csvio::write_csv_file(dir.join("target.csv"), std::slice::from_ref(&data.target))?;
            fs::write(dir.join("ground_truth.json"), to_json(&data.ground_truth)?)?;
            info!("wrote benchmark to {}", dir.display());
            Ok(())
        }

        Command::Run {
            config,
            channels,
            targets,
            target,
            bands,
            swap_halves,
            out,
        } => {
            let cfg = load_config(config.config.as_deref())?;
            let mut protocol = cfg.protocol(bands.as_deref()).map_err(|e| usage(format!("{e:#}")))?;
            protocol.swap_halves |= swap_halves;
            let channels_path = resolve(channels, &cfg.paths.channels, "channels")?;
            let targets_path = resolve(targets, &cfg.paths.targets, "targets")?;
            let dir = resolve(out, &cfg.paths.out, "out")?;

            let channel_series = read_series(&channels_path)?;
            let mut all_targets = read_series(&targets_path)?;
            let selected = if target.is_empty() {
                all_targets
            } else {
                target
                    .iter()
                    .map(|name| {
                        csvio::take_column(&mut all_targets, name)
                            .with_context(|| format!("target column not found in {}", targets_path.display()))
                    })
                    .collect::<Result<Vec<_>>>()?
            };
            let run = experiment::run_experiment(&channel_series, &selected, &protocol)?;

            fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
            fs::write(dir.join("report.json"), to_json(&run.report)?)?;
            fs::write(dir.join("rmse.csv"), run.report.to_csv())?;
            let table = run.report.table();
            fs::write(dir.join("table.txt"), &table)?;
            for (fpc_model, lr_model) in run.fpc_models.iter().zip(&run.lr_models) {
                if let Some(m) = fpc_model {
                    fs::write(dir.join(format!("fpc-{}.json", m.target_name)), persist::save(m)?)?;
                }
                fs::write(
                    dir.join(format!("lr-{}.json", lr_model.target_name)),
                    persist::save(lr_model)?,
                )?;
            }
            print!("{table}");
            Ok(())
        }
    }
}

#[derive(Debug, Serialize)]
pub struct EvalReport {
    pub model_kind: &'static str,
    pub target: String,
    pub samples: usize,
    pub rmse: f64,
    pub target_std: f64,
}

fn predict(model: &AnyModel, bank: &FeatureBank) -> Result<(&'static str, TimeSeries)> {
    Ok(match model {
        AnyModel::Fpc(m) => ("fpc", FpcModel::predict(m, bank)?),
        AnyModel::Linear(m) => ("linear", LinearModel::predict(m, bank)?),
    })
}

fn evaluate(model: &AnyModel, bank: &FeatureBank, target: &TimeSeries) -> Result<(EvalReport, TimeSeries)> {
    let (kind, pred) = predict(model, bank)?;
    let rmse = signal::rmse(&pred, target).map_err(|e| anyhow!(e))?;
    Ok((
        EvalReport {
            model_kind: kind,
            target: target.name().to_string(),
            samples: target.len(),
            rmse,
            target_std: target.std(),
        },
        pred,
    ))
}
