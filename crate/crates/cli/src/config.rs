//! TOML run configuration.
//!
//! Every section is optional and falls back to the library defaults;
//! unknown keys are rejected.
//!
//! ```toml
//! [features]
//! bands = "theta:4:8,alpha:8:13,beta:13:31"
//! smoothing_sec = 1.0
//!
//! [fit]
//! n_r = 2
//! n_mx = 3
//! n_my = 3
//!
//! [experiment]
//! swap_halves = false
//!
//! [paths]
//! channels = "data/channels.csv"
//! ```

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use fpc_core::experiment::Protocol;
use fpc_core::fpc::FitConfig;
use fpc_core::synth::SynthSpec;
use fpc_core::wavelet::{BandDef, FeatureConfig, DEFAULT_SCALES_PER_BAND};
use serde::Deserialize;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureSection {
    /// `name:low:high` entries separated by commas.
    pub bands: String,
    pub scales_per_band: usize,
    pub band_pass: bool,
    pub band_pass_hz: [f64; 2],
    /// Zero disables smoothing.
    pub smoothing_sec: f64,
}

impl Default for FeatureSection {
    fn default() -> Self {
        let base = FeatureConfig::default();
        let bands: Vec<String> = base.bands.iter().map(ToString::to_string).collect();
        let (lo, hi) = base.band_pass_hz.expect("default has a band-pass");
        Self {
            bands: bands.join(","),
            scales_per_band: DEFAULT_SCALES_PER_BAND,
            band_pass: true,
            band_pass_hz: [lo, hi],
            smoothing_sec: base.smoothing_sec.unwrap_or(0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSection {
    pub lr_delays: Option<Vec<usize>>,
    pub swap_halves: bool,
    pub keep_edges: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathSection {
    pub channels: Option<PathBuf>,
    pub features: Option<PathBuf>,
    pub targets: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub features: FeatureSection,
    pub fit: FitConfig,
    pub experiment: ExperimentSection,
    pub synth: SynthSpec,
    pub paths: PathSection,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    pub fn load_or_default(path: Option<&Path>) -> Result<Self> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }

    pub fn validate(&self) -> Result<()> {
        self.fit.validate()?;
        self.synth.validate()?;
        self.feature_config(None)?;
        if let Some(d) = &self.experiment.lr_delays {
            anyhow::ensure!(!d.is_empty(), "experiment.lr_delays must not be empty");
        }
        Ok(())
    }

    /// Feature settings, with `bands` overriding the configured list.
    pub fn feature_config(&self, bands: Option<&str>) -> Result<FeatureConfig> {
        let f = &self.features;
        anyhow::ensure!(f.scales_per_band >= 1, "features.scales_per_band must be positive");
        anyhow::ensure!(
            f.smoothing_sec.is_finite() && f.smoothing_sec >= 0.0,
            "features.smoothing_sec must be non-negative"
        );
        let [lo, hi] = f.band_pass_hz;
        anyhow::ensure!(0.0 < lo && lo < hi, "features.band_pass_hz must satisfy 0 < low < high");
        Ok(FeatureConfig {
            bands: BandDef::parse_list(bands.unwrap_or(&f.bands))?,
            scales_per_band: f.scales_per_band,
            band_pass_hz: f.band_pass.then_some((lo, hi)),
            smoothing_sec: (f.smoothing_sec > 0.0).then_some(f.smoothing_sec),
        })
    }

    pub fn protocol(&self, bands: Option<&str>) -> Result<Protocol> {
        Ok(Protocol {
            features: self.feature_config(bands)?,
            fit: self.fit.clone(),
            lr_delays: self.experiment.lr_delays.clone(),
            swap_halves: self.experiment.swap_halves,
            keep_edges: self.experiment.keep_edges,
        })
    }
}
