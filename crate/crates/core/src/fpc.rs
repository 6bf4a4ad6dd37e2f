//! Fuzzy parallel cascades: greedy residual fitting where every cascade is
//! a fuzzy MISO system over delayed copies of one candidate feature.
//!
//! Cascade `i` is fitted to the residue left by cascades `1..i`; the model
//! output is the sum of all cascade outputs. Inputs are taken from the pool
//! in descending mutual information with the current residue and are never
//! reused. A cascade is kept only if it lowers the residual norm on an inner
//! validation tail of the identification data (residue ratio below one);
//! the first rejection ends the fit.

use log::debug;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuzzy::{self, InferenceSettings, RuleBase};
use crate::mi::{self, MiRanking};
use crate::signal::{self, TimeSeries};
use crate::wavelet::FeatureBank;

/// Fit settings. Defaults: two delays, three sets per variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitConfig {
    /// Number of delayed copies of the cascade input.
    pub n_r: usize,
    pub n_mx: usize,
    pub n_my: usize,
    /// Delays are `delay_step, 2 * delay_step, ..., n_r * delay_step`.
    pub delay_step: usize,
    pub mi_bins: usize,
    /// `None` means the pool size.
    pub max_cascades: Option<usize>,
    /// Fraction of the identification data (contiguous tail) used for the
    /// residue criterion.
    pub inner_validation_fraction: f64,
    /// Re-rank the pool against the current residue before every cascade
    /// instead of ranking once against the target.
    pub rerank_each_step: bool,
    pub inference: InferenceSettings,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            n_r: 2,
            n_mx: fuzzy::DEFAULT_SETS,
            n_my: fuzzy::DEFAULT_SETS,
            delay_step: 1,
            mi_bins: mi::DEFAULT_MI_BINS,
            max_cascades: None,
            inner_validation_fraction: 0.25,
            rerank_each_step: true,
            inference: InferenceSettings::default(),
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("n_r", self.n_r),
            ("delay_step", self.delay_step),
            ("max_cascades", self.max_cascades.unwrap_or(1)),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(Error::InvalidArgument(format!("{name} must be positive")));
        }
        if self.n_mx < 2 || self.n_my < 2 {
            return Err(Error::InvalidArgument("n_mx and n_my must be at least 2".into()));
        }
        if self.mi_bins < 2 {
            return Err(Error::InvalidArgument("mi_bins must be at least 2".into()));
        }
        if !(self.inner_validation_fraction > 0.0 && self.inner_validation_fraction < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "inner_validation_fraction must be in (0, 1), got {}",
                self.inner_validation_fraction
            )));
        }
        if self.inference.cog_grid_points < 2 {
            return Err(Error::InvalidArgument("cog_grid_points must be at least 2".into()));
        }
        Ok(())
    }

    pub fn delays(&self) -> Vec<usize> {
        (1..=self.n_r).map(|k| k * self.delay_step).collect()
    }

    pub fn max_delay(&self) -> usize {
        self.n_r * self.delay_step
    }

    /// Minimum number of embedded rows needed to fit one cascade.
    pub fn min_fit_rows(&self) -> usize {
        10 * self.n_mx.saturating_pow(self.n_r as u32)
    }
}

/// Delay-embedded rows of one signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    /// `rows[i] = (x[n - d_1], ..., x[n - d_k])` for `n = first_index + i`.
    pub rows: Vec<Vec<f64>>,
    /// Target index aligned with `rows[0]` (the largest delay).
    pub first_index: usize,
}

pub fn delay_embed(x: &[f64], delays: &[usize]) -> Result<Embedding> {
    let max_delay = *delays.iter().max().ok_or(Error::Empty("delay vector"))?;
    if max_delay >= x.len() {
        return Err(Error::InsufficientData {
            needed: max_delay + 1,
            available: x.len(),
        });
    }
    let rows = (max_delay..x.len())
        .map(|n| delays.iter().map(|&d| x[n - d]).collect())
        .collect();
    Ok(Embedding {
        rows,
        first_index: max_delay,
    })
}

/// Residue ratio `new / prev`. `None` when `prev` is zero, i.e. the fit is
/// already exact; callers accept a cascade only when the ratio is below one.
pub fn residue_criterion(prev_residual_norm: f64, new_residual_norm: f64) -> Option<f64> {
    (prev_residual_norm > 0.0).then(|| new_residual_norm / prev_residual_norm)
}

/// One branch: a fuzzy system over delayed copies of a single feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cascade {
    pub input_name: String,
    pub delays: Vec<usize>,
    pub system: RuleBase,
}

impl Cascade {
    fn validate(&self) -> Result<()> {
        if self.delays.is_empty() || self.delays.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!(
                "cascade `{}` delays must be non-empty and strictly increasing",
                self.input_name
            )));
        }
        if self.delays.len() != self.system.n_inputs() {
            return Err(Error::InvalidArgument(format!(
                "cascade `{}` has {} delays for a {}-input system",
                self.input_name,
                self.delays.len(),
                self.system.n_inputs()
            )));
        }
        Ok(())
    }

    /// Cascade output aligned with `x`; the leading samples that lack a full
    /// delay history repeat the first computable value.
    pub fn output(&self, x: &[f64]) -> Result<Vec<f64>> {
        let emb = delay_embed(x, &self.delays)?;
        let inferred = self.system.infer_batch(&emb.rows)?;
        let mut out = Vec::with_capacity(x.len());
        out.resize(emb.first_index, inferred[0]);
        out.extend(inferred);
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// The next candidate did not lower the inner-validation residual.
    Rejected,
    PoolExhausted,
    MaxCascades,
    /// Inner-validation residual reached zero.
    PerfectFit,
    /// The residue became constant on the fit part.
    DegenerateResidual,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeReport {
    pub input_name: String,
    pub mi_nats: f64,
    pub rule_count: usize,
    pub r_cr: f64,
    pub validation_norm_before: f64,
    pub validation_norm_after: f64,
    /// RMSE of the residue over the fit part after this cascade.
    pub fit_rmse_after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectedCandidate {
    pub input_name: String,
    pub r_cr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingReport {
    pub cascades: Vec<CascadeReport>,
    pub stop_reason: StopReason,
    pub rejected: Option<RejectedCandidate>,
    pub fit_samples: usize,
    pub validation_samples: usize,
    /// RMSE of the summed model against the whole identification target.
    pub final_training_rmse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FpcModel {
    pub target_name: String,
    pub sample_rate_hz: f64,
    pub config: FitConfig,
    pub cascades: Vec<Cascade>,
    pub training_report: TrainingReport,
}

impl FpcModel {
    /// Structural checks for models that did not come from [`fit`].
    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        if self.cascades.is_empty() {
            return Err(Error::InvalidArgument("model has no cascades".into()));
        }
        if !(self.sample_rate_hz.is_finite() && self.sample_rate_hz > 0.0) {
            return Err(Error::InvalidArgument("model sample rate must be positive".into()));
        }
        let mut names: Vec<&str> = self.cascades.iter().map(|c| c.input_name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("model reuses a cascade input".into()));
        }
        self.cascades.iter().try_for_each(Cascade::validate)
    }

    pub fn input_names(&self) -> impl Iterator<Item = &str> {
        self.cascades.iter().map(|c| c.input_name.as_str())
    }

    /// Each cascade's output series on `bank`, in cascade order.
    pub fn cascade_outputs(&self, bank: &FeatureBank) -> Result<Vec<Vec<f64>>> {
        if let Some(rate) = bank.sample_rate_hz() {
            signal::check_same_rate(self.sample_rate_hz, rate)?;
        }
        self.cascades
            .iter()
            .map(|c| {
                let x = bank
                    .get(&c.input_name)
                    .ok_or_else(|| Error::MissingFeature(c.input_name.clone()))?;
                c.output(x.samples())
            })
            .collect()
    }

    /// Model output: pointwise sum of the cascade outputs.
    pub fn predict(&self, bank: &FeatureBank) -> Result<TimeSeries> {
        predict(self, bank)
    }

    pub fn rule_dump(&self) -> String {
        let mut out = String::new();
        for (i, c) in self.cascades.iter().enumerate() {
            let names: Vec<String> = c.delays.iter().map(|d| format!("{}[n-{d}]", c.input_name)).collect();
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            out.push_str(&format!("# cascade {} ({})\n", i + 1, c.input_name));
            out.push_str(&c.system.dump(&refs, &format!("y{}", i + 1)));
        }
        out
    }
}

pub fn predict(model: &FpcModel, bank: &FeatureBank) -> Result<TimeSeries> {
    let outputs = model.cascade_outputs(bank)?;
    let mut sum = vec![0.0; bank.series_len()];
    for out in &outputs {
        for (s, v) in sum.iter_mut().zip(out) {
            *s += v;
        }
    }
    TimeSeries::new(model.target_name.clone(), model.sample_rate_hz, sum)
}

fn norm(v: impl Iterator<Item = f64>) -> f64 {
    v.map(|x| x * x).sum::<f64>().sqrt()
}

fn rank_pool(pool: &[&TimeSeries], target: &[f64], n_fit: usize, bins: usize) -> Result<MiRanking> {
    let scores = pool
        .iter()
        .map(|f| {
            let est = mi::mutual_information_slices(&f.samples()[..n_fit], target, bins)?;
            Ok((f.name().to_string(), est.nats))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MiRanking::from_scores(scores))
}

/// Identifies a cascade model of `target` from the candidate pool `bank`.
pub fn fit(bank: &FeatureBank, target: &TimeSeries, cfg: &FitConfig) -> Result<FpcModel> {
    cfg.validate()?;
    if bank.is_empty() {
        return Err(Error::Empty("feature bank"));
    }
    bank.check_aligned(target)?;

    let n = target.len();
    let n_val = ((n as f64) * cfg.inner_validation_fraction).round() as usize;
    let n_fit = n.saturating_sub(n_val);
    let max_delay = cfg.max_delay();
    let needed = max_delay + cfg.min_fit_rows().max(cfg.mi_bins);
    if n_val == 0 || n_fit < needed {
        let total = ((needed as f64) / (1.0 - cfg.inner_validation_fraction)).ceil() as usize + 1;
        return Err(Error::InsufficientData {
            needed: total,
            available: n,
        });
    }

    let delays = cfg.delays();
    let mut residual = target.samples().to_vec();
    let mut pool: Vec<&TimeSeries> = bank.features().iter().collect();
    let cap = cfg.max_cascades.unwrap_or(pool.len()).min(pool.len());
    let fixed_order = if cfg.rerank_each_step {
        None
    } else {
        Some(rank_pool(&pool, &residual[..n_fit], n_fit, cfg.mi_bins)?)
    };

    let mut cascades = Vec::new();
    let mut reports = Vec::new();
    let mut rejected = None;
    let mut first_r_cr = None;

    let stop_reason = loop {
        if cascades.len() >= cap {
            break if pool.is_empty() {
                StopReason::PoolExhausted
            } else {
                StopReason::MaxCascades
            };
        }
        if pool.is_empty() {
            break StopReason::PoolExhausted;
        }
        let val_before = norm(residual[n_fit..].iter().copied());
        if residue_criterion(val_before, val_before).is_none() {
            break StopReason::PerfectFit;
        }

        let ranking = match &fixed_order {
            Some(r) => r.clone(),
            None => rank_pool(&pool, &residual[..n_fit], n_fit, cfg.mi_bins)?,
        };
        let Some(choice) = ranking
            .entries()
            .iter()
            .find(|e| pool.iter().any(|f| f.name() == e.name))
            .cloned()
        else {
            break StopReason::PoolExhausted;
        };
        let pos = pool
            .iter()
            .position(|f| f.name() == choice.name)
            .expect("ranked from pool");
        let feature = pool[pos];

        let emb = delay_embed(&feature.samples()[..n_fit], &delays)?;
        let system = match fuzzy::fit_miso(&emb.rows, &residual[emb.first_index..n_fit], cfg.n_mx, cfg.n_my) {
            Ok(s) => s.with_settings(cfg.inference)?,
            Err(Error::DegenerateDomain(var)) if var == "y" => {
                if cascades.is_empty() {
                    return Err(Error::DegenerateDomain(target.name().to_string()));
                }
                break StopReason::DegenerateResidual;
            }
            Err(Error::DegenerateDomain(_)) => {
                debug!("skipping `{}`: constant on the fit part", feature.name());
                pool.remove(pos);
                continue;
            }
            Err(e) => return Err(e),
        };
        let cascade = Cascade {
            input_name: feature.name().to_string(),
            delays: delays.clone(),
            system,
        };
        let out = cascade.output(feature.samples())?;
        let val_after = norm(residual[n_fit..].iter().zip(&out[n_fit..]).map(|(r, o)| r - o));
        let r_cr = residue_criterion(val_before, val_after).expect("checked above");
        first_r_cr.get_or_insert(r_cr);
        debug!("candidate `{}`: r_cr = {r_cr:.6}", cascade.input_name);

        if !(r_cr < 1.0) {
            rejected = Some(RejectedCandidate {
                input_name: cascade.input_name,
                r_cr,
            });
            break StopReason::Rejected;
        }
        for (r, o) in residual.iter_mut().zip(&out) {
            *r -= o;
        }
        reports.push(CascadeReport {
            input_name: cascade.input_name.clone(),
            mi_nats: choice.mi_nats,
            rule_count: cascade.system.rules().len(),
            r_cr,
            validation_norm_before: val_before,
            validation_norm_after: val_after,
            fit_rmse_after: (residual[..n_fit].iter().map(|r| r * r).sum::<f64>() / n_fit as f64).sqrt(),
        });
        cascades.push(cascade);
        pool.remove(pos);
    };

    if cascades.is_empty() {
        return Err(Error::NoCascadeAccepted {
            r_cr: first_r_cr.unwrap_or(f64::NAN),
        });
    }

    let mut model = FpcModel {
        target_name: target.name().to_string(),
        sample_rate_hz: target.sample_rate_hz(),
        config: cfg.clone(),
        cascades,
        training_report: TrainingReport {
            cascades: reports,
            stop_reason,
            rejected,
            fit_samples: n_fit,
            validation_samples: n_val,
            final_training_rmse: 0.0,
        },
    };
    let prediction = model.predict(bank)?;
    model.training_report.final_training_rmse = signal::rmse(&prediction, target)?;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const FS: f64 = 128.0;

    fn ts(name: &str, v: Vec<f64>) -> TimeSeries {
        TimeSeries::new(name, FS, v).unwrap()
    }

    fn smooth_noise(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        let comps: Vec<(f64, f64)> = (0..12)
            .map(|_| {
                (
                    rng.random_range(0.05..0.6),
                    rng.random_range(0.0..std::f64::consts::TAU),
                )
            })
            .collect();
        (0..n)
            .map(|i| {
                let t = i as f64 / FS;
                comps
                    .iter()
                    .map(|(f, p)| (std::f64::consts::TAU * f * t + p).sin())
                    .sum::<f64>()
                    / 3.0
            })
            .collect()
    }

    fn pool(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<TimeSeries> {
        (0..k).map(|i| ts(&format!("f{i}"), smooth_noise(rng, n))).collect()
    }

    #[test]
    fn delay_embedding_examples() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let e = delay_embed(&x, &[1, 2]).unwrap();
        assert_eq!(e.rows, vec![vec![2.0, 1.0], vec![3.0, 2.0]]);
        assert_eq!(e.first_index, 2);
        let id = delay_embed(&x, &[0]).unwrap();
        assert_eq!(id.rows.len(), 4);
        assert_eq!(id.first_index, 0);
        assert!(delay_embed(&x, &[4]).is_err());
        assert!(delay_embed(&x, &[]).is_err());
    }

    #[test]
    fn residue_ratio() {
        assert_eq!(residue_criterion(2.0, 1.0), Some(0.5));
        assert_eq!(residue_criterion(1.0, 1.0), Some(1.0));
        assert_eq!(residue_criterion(1.0, 1.3), Some(1.3));
        assert_eq!(residue_criterion(0.0, 0.0), None);
    }

    #[test]
    fn config_defaults_and_validation() {
        let cfg = FitConfig::default();
        assert_eq!((cfg.n_r, cfg.n_mx, cfg.n_my), (2, 3, 3));
        assert_eq!(cfg.delays(), vec![1, 2]);
        assert_eq!(cfg.min_fit_rows(), 90);
        assert!(FitConfig { n_r: 0, ..cfg.clone() }.validate().is_err());
        assert!(FitConfig {
            inner_validation_fraction: 1.0,
            ..cfg.clone()
        }
        .validate()
        .is_err());
        assert!(FitConfig { n_mx: 1, ..cfg }.validate().is_err());
    }

    #[test]
    fn recovers_delayed_copy_of_a_feature() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 3000;
        let feats = pool(&mut rng, n, 5);
        let src = feats[2].samples();
        let y: Vec<f64> = (0..n).map(|i| src[i.saturating_sub(1)]).collect();
        let target = ts("y", y);
        let bank = FeatureBank::new(feats).unwrap();
        let coarse = fit(&bank, &target, &FitConfig::default()).unwrap();
        assert_eq!(coarse.cascades[0].input_name, "f2");
        assert!(coarse.training_report.final_training_rmse < target.std());

        // Three edge-truncated output sets bias the centre of gravity near the
        // domain ends; an identity map needs a fine partition to get close.
        let fine = FitConfig {
            n_r: 1,
            n_mx: 21,
            n_my: 21,
            ..Default::default()
        };
        let model = fit(&bank, &target, &fine).unwrap();
        assert_eq!(model.cascades[0].input_name, "f2");
        let err = model.training_report.final_training_rmse;
        assert!(err < 0.05 * target.std(), "rmse {err} vs std {}", target.std());
    }

    #[test]
    fn noise_target_is_not_explained() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 3000;
        let bank = FeatureBank::new(pool(&mut rng, n, 6)).unwrap();
        let target = ts("y", (0..n).map(|_| rng.random_range(-1.0..1.0)).collect());
        match fit(&bank, &target, &FitConfig::default()) {
            Err(Error::NoCascadeAccepted { r_cr }) => assert!(r_cr >= 1.0),
            Ok(model) => {
                let n_fit = model.training_report.fit_samples;
                let pred = model.predict(&bank).unwrap();
                let val = signal::rmse_slices(&pred.samples()[n_fit..], &target.samples()[n_fit..]).unwrap();
                assert!(val >= 0.9 * target.std(), "{val}");
            }
            Err(e) => panic!("unexpected error {e}"),
        }
    }

    fn sum_target(rng: &mut ChaCha8Rng, n: usize) -> (FeatureBank, TimeSeries) {
        let feats = pool(rng, n, 6);
        let y: Vec<f64> = (0..n)
            .map(|i| {
                let a = feats[1].samples()[i.saturating_sub(1)];
                let b = feats[4].samples()[i.saturating_sub(2)];
                a * a + 0.6 * b.tanh()
            })
            .collect();
        (FeatureBank::new(feats).unwrap(), ts("y", y))
    }

    #[test]
    fn cascade_mechanics() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let (bank, target) = sum_target(&mut rng, 4000);
        let model = fit(&bank, &target, &FitConfig::default()).unwrap();
        assert!(model.cascades.len() >= 2, "{:?}", model.training_report);

        let outs = model.cascade_outputs(&bank).unwrap();
        let pred = model.predict(&bank).unwrap();
        for (i, p) in pred.samples().iter().enumerate() {
            let s: f64 = outs.iter().map(|o| o[i]).sum();
            assert!((p - s).abs() <= 1e-12);
        }
        let norms: Vec<f64> = model
            .training_report
            .cascades
            .iter()
            .map(|c| c.validation_norm_after)
            .collect();
        assert!(norms.windows(2).all(|w| w[1] < w[0]));
        let mut names: Vec<&str> = model.input_names().collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), model.cascades.len());

        let again = fit(&bank, &target, &FitConfig::default()).unwrap();
        assert_eq!(model, again);

        let replay = signal::rmse(&pred, &target).unwrap();
        assert!((replay - model.training_report.final_training_rmse).abs() < 1e-9);
    }

    #[test]
    fn single_cascade_prediction_is_that_cascade() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let (bank, target) = sum_target(&mut rng, 3000);
        let cfg = FitConfig {
            max_cascades: Some(1),
            ..Default::default()
        };
        let model = fit(&bank, &target, &cfg).unwrap();
        assert_eq!(model.cascades.len(), 1);
        assert_eq!(model.training_report.stop_reason, StopReason::MaxCascades);
        let x = bank.get(&model.cascades[0].input_name).unwrap();
        assert_eq!(
            model.predict(&bank).unwrap().samples(),
            model.cascades[0].output(x.samples()).unwrap()
        );
    }

    #[test]
    fn fixed_ranking_mode_runs() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let (bank, target) = sum_target(&mut rng, 3000);
        let cfg = FitConfig {
            rerank_each_step: false,
            ..Default::default()
        };
        let model = fit(&bank, &target, &cfg).unwrap();
        let first = mi::rank_features(&bank.slice(0, 2250).unwrap(), &target.slice(0, 2250).unwrap(), 16).unwrap();
        assert_eq!(model.cascades[0].input_name, first.top().unwrap().name);
        assert!(model.cascades.len() <= bank.len());
    }

    #[test]
    fn fit_rejects_bad_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let target = ts("y", smooth_noise(&mut rng, 100));
        let bank = FeatureBank::new(pool(&mut rng, 100, 2)).unwrap();
        assert!(matches!(
            fit(&bank, &target, &FitConfig::default()),
            Err(Error::InsufficientData { .. })
        ));
        assert!(matches!(
            fit(&FeatureBank::default(), &target, &FitConfig::default()),
            Err(Error::Empty(_))
        ));
    }

    #[test]
    fn predict_checks_bank() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let (bank, target) = sum_target(&mut rng, 3000);
        let model = fit(&bank, &target, &FitConfig::default()).unwrap();
        let missing = FeatureBank::new(vec![ts("other", vec![0.0; 50])]).unwrap();
        assert!(matches!(model.predict(&missing), Err(Error::MissingFeature(_))));
        let resampled = FeatureBank::new(
            bank.features()
                .iter()
                .map(|f| TimeSeries::new(f.name(), 256.0, f.samples().to_vec()).unwrap())
                .collect(),
        )
        .unwrap();
        assert!(matches!(model.predict(&resampled), Err(Error::RateMismatch { .. })));
    }
}
