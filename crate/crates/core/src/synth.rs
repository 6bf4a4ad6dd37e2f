//! Seeded synthetic benchmark: multichannel carriers with slow band-power
//! envelopes and a target driven by a few of those envelopes.
//!
//! Every (channel, band) pair gets its own envelope `e = 1 + 0.8 s`, where
//! `s = tanh(z / 1.5)` and `z` is a unit-variance sum of slow sinusoids
//! (0.05-0.4 Hz). The band component is a fixed-frequency carrier near the
//! band centre scaled by `sqrt(e)`, so its power follows `e`. The target is a fixed nonlinearity of
//! the delayed `s` of two causal pairs, standardised, corrupted with
//! Gaussian noise at the requested SNR and squashed by `tanh(y / 2)`.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::TimeSeries;
use crate::wavelet::BandDef;

/// Electrode labels of a 14-channel consumer headset; further channels are
/// named `CH15`, `CH16`, ...
pub const CHANNEL_NAMES: [&str; 14] = [
    "AF3", "F7", "F3", "FC5", "T7", "P7", "O1", "O2", "P8", "T8", "FC6", "F4", "F8", "AF4",
];

pub const TARGET_NAME: &str = "target";

const ENVELOPE_COMPONENTS: usize = 6;
const ENVELOPE_DEPTH: f64 = 0.8;
const ENVELOPE_BAND_HZ: (f64, f64) = (0.05, 0.4);
/// Carrier frequencies are drawn within this relative distance of the band's
/// geometric centre.
const CARRIER_SPREAD: f64 = 0.1;
const BROADBAND_NOISE_STD: f64 = 0.1;

pub fn channel_name(index: usize) -> String {
    CHANNEL_NAMES
        .get(index)
        .map(|s| s.to_string())
        .unwrap_or_else(|| format!("CH{}", index + 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Nonlinearity {
    /// `s_a^2 + 0.5 s_b^2`
    StaticPoly,
    /// `tanh(3 s_a) + 0.5 tanh(3 s_b)`
    Saturating,
    /// `s_a * s_b`
    Bilinear,
}

impl Nonlinearity {
    pub const ALL: [Nonlinearity; 3] = [Self::StaticPoly, Self::Saturating, Self::Bilinear];

    pub fn formula(self) -> &'static str {
        match self {
            Self::StaticPoly => "s_a^2 + 0.5*s_b^2",
            Self::Saturating => "tanh(3*s_a) + 0.5*tanh(3*s_b)",
            Self::Bilinear => "s_a*s_b",
        }
    }

    fn eval(self, a: f64, b: f64) -> f64 {
        match self {
            Self::StaticPoly => a * a + 0.5 * b * b,
            Self::Saturating => (3.0 * a).tanh() + 0.5 * (3.0 * b).tanh(),
            Self::Bilinear => a * b,
        }
    }
}

impl fmt::Display for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::StaticPoly => "static-poly",
            Self::Saturating => "saturating",
            Self::Bilinear => "bilinear",
        })
    }
}

impl FromStr for Nonlinearity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|n| n.to_string() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown nonlinearity `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSpec {
    pub n_channels: usize,
    pub duration_sec: f64,
    pub sample_rate_hz: f64,
    pub seed: u64,
    pub nonlinearity: Nonlinearity,
    /// `f64::INFINITY` disables the target noise.
    pub snr_db: f64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            n_channels: 14,
            duration_sec: 60.0,
            sample_rate_hz: 128.0,
            seed: 0,
            nonlinearity: Nonlinearity::StaticPoly,
            snr_db: 10.0,
        }
    }
}

impl SynthSpec {
    pub fn bands() -> Vec<BandDef> {
        BandDef::default_bands()
    }

    pub fn n_samples(&self) -> usize {
        (self.duration_sec * self.sample_rate_hz).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_channels == 0 {
            return Err(Error::InvalidArgument("n_channels must be positive".into()));
        }
        if !(self.duration_sec.is_finite() && self.duration_sec > 0.0) {
            return Err(Error::InvalidArgument("duration_sec must be positive".into()));
        }
        let top = Self::bands().iter().map(|b| b.high_hz).fold(0.0, f64::max);
        if !(self.sample_rate_hz.is_finite() && self.sample_rate_hz > 2.0 * top) {
            return Err(Error::InvalidArgument(format!(
                "sample_rate_hz must exceed {} Hz",
                2.0 * top
            )));
        }
        if self.snr_db.is_nan() || self.snr_db == f64::NEG_INFINITY {
            return Err(Error::InvalidArgument(format!("invalid snr_db {}", self.snr_db)));
        }
        if self.n_samples() < 16 {
            return Err(Error::InvalidArgument("spec yields fewer than 16 samples".into()));
        }
        Ok(())
    }
}

/// One causal input of the target.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CausalTerm {
    /// `s_a` or `s_b` in the formula.
    pub symbol: String,
    pub channel: String,
    pub band: String,
    pub delay_samples: usize,
}

impl CausalTerm {
    /// Name of the matching band-power feature.
    pub fn feature_name(&self) -> String {
        format!("{}.{}", self.channel, self.band)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub seed: u64,
    pub nonlinearity: Nonlinearity,
    pub formula: String,
    /// `None` for a noiseless target.
    pub snr_db: Option<f64>,
    pub terms: Vec<CausalTerm>,
    pub target_transform: String,
}

impl GroundTruth {
    pub fn causal_features(&self) -> Vec<String> {
        self.terms.iter().map(CausalTerm::feature_name).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthData {
    /// Keyed by channel name; see [`SynthData::channel_list`] for the
    /// generation order.
    pub channels: BTreeMap<String, TimeSeries>,
    pub target: TimeSeries,
    pub ground_truth: GroundTruth,
    order: Vec<String>,
}

impl SynthData {
    /// Channels in generation order.
    pub fn channel_list(&self) -> Vec<TimeSeries> {
        self.order.iter().map(|n| self.channels[n].clone()).collect()
    }
}

/// Unit-variance sum of slow sinusoids.
fn slow_process(rng: &mut ChaCha8Rng, n: usize, fs: f64, f_lo: f64, f_hi: f64) -> Vec<f64> {
    let comps: Vec<(f64, f64)> = (0..ENVELOPE_COMPONENTS)
        .map(|_| (rng.random_range(f_lo..f_hi), rng.random_range(0.0..TAU)))
        .collect();
    let norm = (ENVELOPE_COMPONENTS as f64 / 2.0).sqrt();
    (0..n)
        .map(|i| {
            let t = i as f64 / fs;
            comps.iter().map(|(f, p)| (TAU * f * t + p).sin()).sum::<f64>() / norm
        })
        .collect()
}

pub fn generate(spec: &SynthSpec) -> Result<SynthData> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n_samples();
    let fs = spec.sample_rate_hz;
    let bands = SynthSpec::bands();

    // s[channel][band]
    let mut drive = Vec::with_capacity(spec.n_channels);
    let mut channels = BTreeMap::new();
    let mut order = Vec::with_capacity(spec.n_channels);
    for c in 0..spec.n_channels {
        let mut x = vec![0.0; n];
        let mut per_band = Vec::with_capacity(bands.len());
        for band in &bands {
            let s: Vec<f64> = slow_process(&mut rng, n, fs, ENVELOPE_BAND_HZ.0, ENVELOPE_BAND_HZ.1)
                .into_iter()
                .map(|z| (z / 1.5).tanh())
                .collect();
            let centre = (band.low_hz * band.high_hz).sqrt();
            let freq = centre * (1.0 + rng.random_range(-CARRIER_SPREAD..CARRIER_SPREAD));
            let phase = rng.random_range(0.0..TAU);
            for (i, v) in x.iter_mut().enumerate() {
                let amp = (1.0 + ENVELOPE_DEPTH * s[i]).sqrt();
                *v += amp * (TAU * freq * i as f64 / fs + phase).cos();
            }
            per_band.push(s);
        }
        for v in &mut x {
            *v += BROADBAND_NOISE_STD * rng.sample::<f64, _>(StandardNormal);
        }
        let name = channel_name(c);
        channels.insert(name.clone(), TimeSeries::from_parts(name.clone(), fs, x));
        order.push(name);
        drive.push(per_band);
    }

    let n_pairs = spec.n_channels * bands.len();
    let first = rng.random_range(0..n_pairs);
    let second = loop {
        let k = rng.random_range(0..n_pairs);
        if k != first || n_pairs == 1 {
            break k;
        }
    };
    let terms: Vec<CausalTerm> = [("s_a", first), ("s_b", second)]
        .into_iter()
        .map(|(symbol, k)| CausalTerm {
            symbol: symbol.into(),
            channel: order[k / bands.len()].clone(),
            band: bands[k % bands.len()].name.clone(),
            delay_samples: rng.random_range(1..=2),
        })
        .collect();
    let pick = |k: usize| &drive[k / bands.len()][k % bands.len()];
    let (sa, sb) = (pick(first), pick(second));
    let (da, db) = (terms[0].delay_samples, terms[1].delay_samples);

    let clean: Vec<f64> = (0..n)
        .map(|i| {
            spec.nonlinearity
                .eval(sa[i.saturating_sub(da)], sb[i.saturating_sub(db)])
        })
        .collect();
    let mean = clean.iter().sum::<f64>() / n as f64;
    let std = (clean.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
    let scale = if std > 0.0 { std } else { 1.0 };
    let noise_std = if spec.snr_db.is_finite() {
        10f64.powf(-spec.snr_db / 20.0)
    } else {
        0.0
    };
    let target: Vec<f64> = clean
        .iter()
        .map(|v| {
            let noise = if noise_std > 0.0 {
                noise_std * rng.sample::<f64, _>(StandardNormal)
            } else {
                0.0
            };
            (((v - mean) / scale + noise) / 2.0).tanh()
        })
        .collect();

    Ok(SynthData {
        channels,
        target: TimeSeries::from_parts(TARGET_NAME, fs, target),
        ground_truth: GroundTruth {
            seed: spec.seed,
            nonlinearity: spec.nonlinearity,
            formula: spec.nonlinearity.formula().into(),
            snr_db: spec.snr_db.is_finite().then_some(spec.snr_db),
            terms,
            target_transform: "tanh((standardised formula + noise) / 2)".into(),
        },
        order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> SynthSpec {
        SynthSpec {
            n_channels: 3,
            duration_sec: 10.0,
            seed,
            ..Default::default()
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = generate(&small(7)).unwrap();
        let b = generate(&small(7)).unwrap();
        assert_eq!(a, b);
        let c = generate(&small(8)).unwrap();
        assert_ne!(a.target, c.target);
    }

    #[test]
    fn shapes_and_ranges() {
        let d = generate(&SynthSpec::default()).unwrap();
        assert_eq!(d.channels.len(), 14);
        assert_eq!(d.target.len(), 7680);
        assert!(d.target.samples().iter().all(|v| v.abs() < 1.0));
        let names: Vec<String> = d.channel_list().iter().map(|c| c.name().to_string()).collect();
        assert_eq!(names[0], "AF3");
        assert_eq!(names[13], "AF4");
        assert_eq!(d.ground_truth.terms.len(), 2);
        assert_ne!(d.ground_truth.terms[0], d.ground_truth.terms[1]);
        assert_eq!(channel_name(14), "CH15");
    }

    #[test]
    fn spec_validation() {
        assert!(SynthSpec {
            n_channels: 0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(SynthSpec {
            sample_rate_hz: 50.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(SynthSpec {
            snr_db: f64::NAN,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(SynthSpec {
            snr_db: f64::INFINITY,
            ..Default::default()
        }
        .validate()
        .is_ok());
        assert_eq!("bilinear".parse::<Nonlinearity>().unwrap(), Nonlinearity::Bilinear);
        assert!("cubic".parse::<Nonlinearity>().is_err());
    }

    #[test]
    fn noise_level_only_changes_the_target() {
        let noisy = generate(&small(3)).unwrap();
        let clean = generate(&SynthSpec {
            snr_db: f64::INFINITY,
            ..small(3)
        })
        .unwrap();
        assert_eq!(clean.ground_truth.snr_db, None);
        assert_eq!(noisy.channels, clean.channels);
        assert_eq!(noisy.ground_truth.terms, clean.ground_truth.terms);
        assert_ne!(noisy.target, clean.target);
    }
}
