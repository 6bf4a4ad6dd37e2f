//! Identification/validation harness comparing FPC with the linear
//! baseline on identical features.
//!
//! The record is split into two contiguous halves: the models are identified
//! on one and scored on the other. Wavelet edge regions are trimmed from
//! both ends first.
//!
//! When the first FPC candidate already fails the residue criterion the
//! cascade model is empty and its prediction is the empty sum, zero; the
//! result records this with `fpc_cascades == 0`.

use std::fmt::Write as _;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::baseline::{self, LinearModel};
use crate::error::{Error, Result};
use crate::fpc::{self, CascadeReport, FitConfig, FpcModel, StopReason};
use crate::signal::{self, TimeSeries};
use crate::wavelet::{self, FeatureBank, FeatureConfig};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Protocol {
    pub features: FeatureConfig,
    pub fit: FitConfig,
    /// Delays of the linear baseline; `None` uses the FPC delays.
    pub lr_delays: Option<Vec<usize>>,
    /// Identify on the second half and validate on the first.
    pub swap_halves: bool,
    /// Keep the wavelet edge regions instead of trimming them.
    pub keep_edges: bool,
}

impl Protocol {
    pub fn lr_delays(&self) -> Vec<usize> {
        self.lr_delays.clone().unwrap_or_else(|| self.fit.delays())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelScore {
    pub identification_rmse: f64,
    pub validation_rmse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetResult {
    pub target: String,
    pub validation_std: f64,
    pub fpc: ModelScore,
    pub lr: ModelScore,
    pub fpc_cascades: usize,
    pub cascades: Vec<CascadeReport>,
    pub stop_reason: StopReason,
    /// Residue ratio of the rejected first candidate of an empty model.
    pub first_rejected_r_cr: Option<f64>,
    pub lr_rank_deficient: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub n_features: usize,
    pub sample_rate_hz: f64,
    /// Half-open sample ranges into the original record.
    pub identification: [usize; 2],
    pub validation: [usize; 2],
    pub results: Vec<TargetResult>,
}

impl ExperimentReport {
    /// Flat `model,target,identification_rmse,validation_rmse` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("model,target,identification_rmse,validation_rmse\n");
        for r in &self.results {
            for (model, s) in [("FPC", &r.fpc), ("LR", &r.lr)] {
                let _ = writeln!(
                    out,
                    "{model},{},{},{}",
                    r.target, s.identification_rmse, s.validation_rmse
                );
            }
        }
        out
    }

    /// Validation RMSE table with one row per model and one column per target.
    pub fn table(&self) -> String {
        let width = self.results.iter().map(|r| r.target.len()).max().unwrap_or(0).max(10);
        let mut out = format!("{:<6}", "Model");
        for r in &self.results {
            let _ = write!(out, " | {:>width$}", r.target);
        }
        out.push('\n');
        out.push_str(&"-".repeat(out.len() - 1));
        out.push('\n');
        for (model, pick) in [("FPC", 0), ("LR", 1)] {
            let _ = write!(out, "{model:<6}");
            for r in &self.results {
                let v = if pick == 0 {
                    r.fpc.validation_rmse
                } else {
                    r.lr.validation_rmse
                };
                let _ = write!(out, " | {v:>width$.4}");
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRun {
    pub report: ExperimentReport,
    /// One entry per target, in input order; `None` for an empty model.
    pub fpc_models: Vec<Option<FpcModel>>,
    pub lr_models: Vec<LinearModel>,
}

/// Extracts features from `channels` and runs [`run_on_bank`].
pub fn run_experiment(channels: &[TimeSeries], targets: &[TimeSeries], protocol: &Protocol) -> Result<ExperimentRun> {
    let bank = wavelet::build_feature_bank(channels, &protocol.features)?;
    run_on_bank(&bank, targets, protocol)
}

pub fn run_on_bank(bank: &FeatureBank, targets: &[TimeSeries], protocol: &Protocol) -> Result<ExperimentRun> {
    if targets.is_empty() {
        return Err(Error::Empty("target list"));
    }
    if bank.is_empty() {
        return Err(Error::Empty("feature bank"));
    }
    for t in targets {
        bank.check_aligned(t)?;
    }
    let n = bank.series_len();
    let fs = bank.sample_rate_hz().expect("non-empty bank");
    let edge = if protocol.keep_edges {
        0
    } else {
        protocol.features.edge_samples(fs)
    };
    let lr_delays = protocol.lr_delays();
    let max_delay = protocol
        .fit
        .max_delay()
        .max(lr_delays.iter().copied().max().unwrap_or(0));
    let needed = 2 * edge + 2 * (max_delay + 1);
    if n < needed {
        return Err(Error::InsufficientData { needed, available: n });
    }

    let (start, end) = (edge, n - edge);
    let mid = start + (end - start) / 2;
    let (ident, valid) = if protocol.swap_halves {
        ([mid, end], [start, mid])
    } else {
        ([start, mid], [mid, end])
    };
    let ident_bank = bank.slice(ident[0], ident[1])?;
    // Validation predictions may use identification samples as delay history.
    let history = valid[0].saturating_sub(max_delay).max(start);
    let valid_bank = bank.slice(history, valid[1])?;
    let skip = valid[0] - history;

    let mut results = Vec::with_capacity(targets.len());
    let mut fpc_models = Vec::with_capacity(targets.len());
    let mut lr_models = Vec::with_capacity(targets.len());
    for target in targets {
        let mut first_rejected = None;
        let t_ident = target.slice(ident[0], ident[1])?;
        let t_valid = target.slice(valid[0], valid[1])?;

        let fpc_model = match fpc::fit(&ident_bank, &t_ident, &protocol.fit) {
            Ok(m) => Some(m),
            Err(Error::NoCascadeAccepted { r_cr }) => {
                warn!(
                    "`{}`: no cascade accepted (r_cr = {r_cr}); FPC predicts zero",
                    target.name()
                );
                first_rejected = Some(r_cr);
                None
            }
            Err(e) => return Err(e),
        };
        let lr_model = baseline::fit_lr(&ident_bank, &t_ident, &lr_delays)?;

        let score = |ident_pred: TimeSeries, valid_pred: TimeSeries| -> Result<ModelScore> {
            Ok(ModelScore {
                identification_rmse: signal::rmse(&ident_pred, &t_ident)?,
                validation_rmse: signal::rmse_slices(&valid_pred.samples()[skip..], t_valid.samples())?,
            })
        };
        let fpc_predict = |bank: &FeatureBank| -> Result<TimeSeries> {
            match &fpc_model {
                Some(m) => m.predict(bank),
                None => TimeSeries::new(target.name(), fs, vec![0.0; bank.series_len()]),
            }
        };
        let fpc_score = score(fpc_predict(&ident_bank)?, fpc_predict(&valid_bank)?)?;
        let lr_score = score(lr_model.predict(&ident_bank)?, lr_model.predict(&valid_bank)?)?;

        results.push(TargetResult {
            target: target.name().to_string(),
            validation_std: t_valid.std(),
            fpc: fpc_score,
            lr: lr_score,
            fpc_cascades: fpc_model.as_ref().map_or(0, |m| m.cascades.len()),
            cascades: fpc_model
                .as_ref()
                .map(|m| m.training_report.cascades.clone())
                .unwrap_or_default(),
            stop_reason: fpc_model
                .as_ref()
                .map_or(StopReason::Rejected, |m| m.training_report.stop_reason),
            first_rejected_r_cr: first_rejected,
            lr_rank_deficient: lr_model.rank_deficient,
        });
        fpc_models.push(fpc_model);
        lr_models.push(lr_model);
    }

    Ok(ExperimentRun {
        report: ExperimentReport {
            n_features: bank.len(),
            sample_rate_hz: fs,
            identification: ident,
            validation: valid,
            results,
        },
        fpc_models,
        lr_models,
    })
}
