//! Ordinary least-squares baseline over the delayed feature matrix.

use log::warn;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{self, TimeSeries};
use crate::wavelet::FeatureBank;

/// One design-matrix column: `feature[n - delay]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Regressor {
    pub feature: String,
    pub delay: usize,
}

impl Regressor {
    pub fn name(&self) -> String {
        format!("{}[n-{}]", self.feature, self.delay)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub target_name: String,
    pub sample_rate_hz: f64,
    pub regressors: Vec<Regressor>,
    pub weights: Vec<f64>,
    pub intercept: f64,
    /// Numerical rank of the centred design matrix.
    pub rank: usize,
    pub rank_deficient: bool,
    pub training_rows: usize,
    /// Residual norm implied by the decomposition (not by re-prediction).
    pub training_residual_norm: f64,
}

impl LinearModel {
    pub fn validate(&self) -> Result<()> {
        if self.weights.len() != self.regressors.len() {
            return Err(Error::InvalidArgument(format!(
                "{} weights for {} regressors",
                self.weights.len(),
                self.regressors.len()
            )));
        }
        if !(self.sample_rate_hz.is_finite() && self.sample_rate_hz > 0.0) {
            return Err(Error::InvalidArgument("model sample rate must be positive".into()));
        }
        if !self.intercept.is_finite() || self.weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coefficient".into()));
        }
        Ok(())
    }

    pub fn regressor_names(&self) -> Vec<String> {
        self.regressors.iter().map(Regressor::name).collect()
    }

    pub fn max_delay(&self) -> usize {
        self.regressors.iter().map(|r| r.delay).max().unwrap_or(0)
    }

    pub fn predict(&self, bank: &FeatureBank) -> Result<TimeSeries> {
        predict_lr(self, bank)
    }
}

fn columns<'a>(bank: &'a FeatureBank, regressors: &[Regressor]) -> Result<Vec<&'a [f64]>> {
    regressors
        .iter()
        .map(|r| {
            bank.get(&r.feature)
                .map(|f| f.samples())
                .ok_or_else(|| Error::MissingFeature(r.feature.clone()))
        })
        .collect()
}

/// Least squares of `target[n]` on every `feature[n - d]` plus an intercept.
///
/// Solved on the centred design with an SVD; singular values below
/// `σ_max · max(rows, cols) · ε` are dropped, which gives the minimum-norm
/// solution when columns are collinear.
pub fn fit_lr(bank: &FeatureBank, target: &TimeSeries, delays: &[usize]) -> Result<LinearModel> {
    if bank.is_empty() {
        return Err(Error::Empty("feature bank"));
    }
    if delays.is_empty() {
        return Err(Error::Empty("delay vector"));
    }
    bank.check_aligned(target)?;
    let regressors: Vec<Regressor> = bank
        .names()
        .flat_map(|name| {
            delays.iter().map(move |&delay| Regressor {
                feature: name.to_string(),
                delay,
            })
        })
        .collect();
    let max_delay = *delays.iter().max().expect("non-empty");
    let n = target.len();
    let rows = n.saturating_sub(max_delay);
    let cols = regressors.len();
    if rows < cols + 1 {
        return Err(Error::InsufficientData {
            needed: max_delay + cols + 1,
            available: n,
        });
    }

    let data = columns(bank, &regressors)?;
    let y = &target.samples()[max_delay..];
    let y_mean = y.iter().sum::<f64>() / rows as f64;
    let col_means: Vec<f64> = data
        .iter()
        .zip(&regressors)
        .map(|(c, r)| c[max_delay - r.delay..n - r.delay].iter().sum::<f64>() / rows as f64)
        .collect();
    let x = DMatrix::from_fn(rows, cols, |i, j| {
        data[j][max_delay + i - regressors[j].delay] - col_means[j]
    });
    let b = DVector::from_iterator(rows, y.iter().map(|v| v - y_mean));

    let svd = x.svd(true, true);
    let sigma_max = svd.singular_values.max();
    let eps = sigma_max * rows.max(cols) as f64 * f64::EPSILON;
    let rank = svd.rank(eps);
    let w = svd
        .solve(&b, eps)
        .map_err(|e| Error::InvalidArgument(format!("least-squares solve failed: {e}")))?;
    let rank_deficient = rank < cols;
    if rank_deficient {
        warn!("linear baseline: design matrix has rank {rank} < {cols}; using the minimum-norm solution");
    }

    let u = svd.u.as_ref().expect("requested U");
    let projected: f64 = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > eps)
        .map(|(i, _)| u.column(i).dot(&b).powi(2))
        .sum();
    let training_residual_norm = (b.norm_squared() - projected).max(0.0).sqrt();

    let weights: Vec<f64> = w.iter().copied().collect();
    let intercept = y_mean - weights.iter().zip(&col_means).map(|(w, m)| w * m).sum::<f64>();
    Ok(LinearModel {
        target_name: target.name().to_string(),
        sample_rate_hz: target.sample_rate_hz(),
        regressors,
        weights,
        intercept,
        rank,
        rank_deficient,
        training_rows: rows,
        training_residual_norm,
    })
}

/// Affine prediction; the first `max_delay` samples repeat the first
/// computable value.
pub fn predict_lr(model: &LinearModel, bank: &FeatureBank) -> Result<TimeSeries> {
    if let Some(rate) = bank.sample_rate_hz() {
        signal::check_same_rate(model.sample_rate_hz, rate)?;
    }
    let data = columns(bank, &model.regressors)?;
    let n = bank.series_len();
    let max_delay = model.max_delay();
    if n <= max_delay {
        return Err(Error::InsufficientData {
            needed: max_delay + 1,
            available: n,
        });
    }
    let mut out: Vec<f64> = (max_delay..n)
        .map(|t| {
            model
                .regressors
                .iter()
                .zip(&model.weights)
                .zip(&data)
                .fold(model.intercept, |acc, ((r, w), col)| acc + w * col[t - r.delay])
        })
        .collect();
    let first = out[0];
    out.splice(0..0, std::iter::repeat_n(first, max_delay));
    TimeSeries::new(model.target_name.clone(), model.sample_rate_hz, out)
}
