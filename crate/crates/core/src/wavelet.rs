//! Real Morlet continuous wavelet transform and band-averaged power.
//!
//! Scales are expressed in samples. A scale `s` responds most strongly to
//! the frequency `5 / (2π s Δt)`; [`scale_for_frequency`] and
//! [`frequency_for_scale`] convert between the two.

use std::collections::HashSet;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::dsp;
use crate::error::{Error, Result};
use crate::signal::{self, TimeSeries};

/// Angular centre frequency of the mother wavelet (rad per unit time).
pub const MORLET_OMEGA: f64 = 5.0;

/// Half-width of the truncated wavelet, in units of scale. `exp(-12.5)`
/// is below 4e-6 so the truncation is invisible at f64 power levels we use.
pub const MORLET_SUPPORT: f64 = 5.0;

pub const DEFAULT_SCALES_PER_BAND: usize = 8;

pub fn morlet(t: f64) -> f64 {
    (-0.5 * t * t).exp() * (MORLET_OMEGA * t).cos()
}

pub fn scale_for_frequency(freq_hz: f64, sample_rate_hz: f64) -> f64 {
    MORLET_OMEGA * sample_rate_hz / (2.0 * PI * freq_hz)
}

pub fn frequency_for_scale(scale: f64, sample_rate_hz: f64) -> f64 {
    MORLET_OMEGA * sample_rate_hz / (2.0 * PI * scale)
}

/// Samples at each end whose coefficients at `scale` see the zero padding.
pub fn edge_samples(scale: f64) -> usize {
    (MORLET_SUPPORT * scale).ceil() as usize
}

fn kernel(scale: f64) -> Vec<f64> {
    let half = edge_samples(scale) as isize;
    (-half..=half).map(|m| morlet(m as f64 / scale) / scale).collect()
}

/// Continuous wavelet transform: one row per scale, one column per sample.
///
/// `W[s][t'] = (1/s) Σ_t x[t] ψ((t - t') / s)`, zero-padded at the ends.
pub fn cwt(x: &TimeSeries, scales: &[f64]) -> Result<Vec<Vec<f64>>> {
    if scales.is_empty() {
        return Err(Error::Empty("cwt scales"));
    }
    if let Some(s) = scales.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
        return Err(Error::InvalidArgument(format!("cwt scale must be positive, got {s}")));
    }
    // ψ is even, so convolution and correlation coincide.
    Ok(scales
        .iter()
        .map(|&s| dsp::convolve_same(x.samples(), &kernel(s)))
        .collect())
}

/// A named frequency band `[low_hz, high_hz]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandDef {
    pub name: String,
    pub low_hz: f64,
    pub high_hz: f64,
}

impl BandDef {
    pub fn new(name: impl Into<String>, low_hz: f64, high_hz: f64) -> Result<Self> {
        let name = name.into();
        if name.is_empty() || name.contains([',', ':']) {
            return Err(Error::InvalidArgument(format!("invalid band name `{name}`")));
        }
        if !(low_hz.is_finite() && high_hz.is_finite() && low_hz > 0.0 && low_hz < high_hz) {
            return Err(Error::InvalidArgument(format!(
                "band `{name}` needs 0 < low < high, got ({low_hz}, {high_hz})"
            )));
        }
        Ok(Self { name, low_hz, high_hz })
    }

    /// Theta, alpha and beta.
    pub fn default_bands() -> Vec<BandDef> {
        vec![
            BandDef::new("theta", 4.0, 8.0).unwrap(),
            BandDef::new("alpha", 8.0, 13.0).unwrap(),
            BandDef::new("beta", 13.0, 31.0).unwrap(),
        ]
    }

    /// Parses `theta:4:8,alpha:8:13,...`.
    pub fn parse_list(s: &str) -> Result<Vec<BandDef>> {
        let bands: Vec<BandDef> = s
            .split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(BandDef::from_str)
            .collect::<Result<_>>()?;
        if bands.is_empty() {
            return Err(Error::Empty("band list"));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = bands.iter().find(|b| !seen.insert(b.name.as_str())) {
            return Err(Error::InvalidArgument(format!("duplicate band `{}`", dup.name)));
        }
        Ok(bands)
    }

    /// `n` log-spaced wavelet scales whose centre frequencies run from
    /// `low_hz` to `high_hz` inclusive (the geometric centre when `n == 1`).
    pub fn scales(&self, sample_rate_hz: f64, n: usize) -> Vec<f64> {
        let (lo, hi) = (self.low_hz.ln(), self.high_hz.ln());
        (0..n)
            .map(|i| {
                let frac = if n == 1 { 0.5 } else { i as f64 / (n - 1) as f64 };
                scale_for_frequency((lo + frac * (hi - lo)).exp(), sample_rate_hz)
            })
            .collect()
    }

    /// Edge region of this band's power series (support of its widest scale).
    pub fn edge_samples(&self, sample_rate_hz: f64) -> usize {
        edge_samples(scale_for_frequency(self.low_hz, sample_rate_hz))
    }
}

impl FromStr for BandDef {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let bad = || Error::InvalidArgument(format!("band spec `{s}` is not NAME:LOW:HIGH"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let low = parts[1].parse::<f64>().map_err(|_| bad())?;
        let high = parts[2].parse::<f64>().map_err(|_| bad())?;
        BandDef::new(parts[0], low, high)
    }
}

impl fmt::Display for BandDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.name, self.low_hz, self.high_hz)
    }
}

/// Time-varying band power: per-sample mean of `|W|²` over the band's scales.
pub fn band_power(x: &TimeSeries, band: &BandDef, scales_per_band: usize) -> Result<TimeSeries> {
    if scales_per_band == 0 {
        return Err(Error::InvalidArgument("scales_per_band must be at least 1".into()));
    }
    let nyquist = x.sample_rate_hz() / 2.0;
    if band.high_hz >= nyquist {
        return Err(Error::InvalidArgument(format!(
            "band `{}` ({}-{} Hz) is not below Nyquist ({nyquist} Hz)",
            band.name, band.low_hz, band.high_hz
        )));
    }
    let rows = cwt(x, &band.scales(x.sample_rate_hz(), scales_per_band))?;
    let mut power = vec![0.0; x.len()];
    for row in &rows {
        for (p, w) in power.iter_mut().zip(row) {
            *p += w * w;
        }
    }
    let k = rows.len() as f64;
    power.iter_mut().for_each(|p| *p /= k);
    Ok(TimeSeries::from_parts(
        format!("{}.{}", x.name(), band.name),
        x.sample_rate_hz(),
        power,
    ))
}

/// Feature extraction settings applied to every channel.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureConfig {
    pub bands: Vec<BandDef>,
    pub scales_per_band: usize,
    /// Band-pass applied to raw channels before the transform.
    pub band_pass_hz: Option<(f64, f64)>,
    /// Moving-average window applied to each power series.
    pub smoothing_sec: Option<f64>,
}

impl FeatureConfig {
    /// Samples at each end of a feature series affected by the wavelet
    /// support of the widest scale.
    pub fn edge_samples(&self, sample_rate_hz: f64) -> usize {
        self.bands
            .iter()
            .map(|b| b.edge_samples(sample_rate_hz))
            .max()
            .unwrap_or(0)
    }
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            bands: BandDef::default_bands(),
            scales_per_band: DEFAULT_SCALES_PER_BAND,
            band_pass_hz: Some((2.0, 42.0)),
            smoothing_sec: Some(signal::DEFAULT_SMOOTHING_SEC),
        }
    }
}

/// Candidate input series sharing one sample rate and length, with unique
/// names. Order is significant (channel-major from extraction).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureBank {
    features: Vec<TimeSeries>,
}

impl FeatureBank {
    pub fn new(features: Vec<TimeSeries>) -> Result<Self> {
        if let Some(first) = features.first() {
            for f in &features[1..] {
                signal::check_same_rate(first.sample_rate_hz(), f.sample_rate_hz())?;
                if f.len() != first.len() {
                    return Err(Error::LengthMismatch {
                        expected: first.len(),
                        found: f.len(),
                    });
                }
            }
        }
        let mut seen = HashSet::new();
        if let Some(dup) = features.iter().find(|f| !seen.insert(f.name())) {
            return Err(Error::InvalidArgument(format!(
                "duplicate feature name `{}`",
                dup.name()
            )));
        }
        Ok(Self { features })
    }

    pub fn features(&self) -> &[TimeSeries] {
        &self.features
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.features.iter().map(|f| f.name())
    }

    pub fn get(&self, name: &str) -> Option<&TimeSeries> {
        self.features.iter().find(|f| f.name() == name)
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    /// Common series length (0 for an empty bank).
    pub fn series_len(&self) -> usize {
        self.features.first().map_or(0, |f| f.len())
    }

    pub fn sample_rate_hz(&self) -> Option<f64> {
        self.features.first().map(|f| f.sample_rate_hz())
    }

    /// Same contiguous sample range `[start, end)` of every feature.
    pub fn slice(&self, start: usize, end: usize) -> Result<Self> {
        let features = self
            .features
            .iter()
            .map(|f| f.slice(start, end))
            .collect::<Result<_>>()?;
        Ok(Self { features })
    }

    /// Checks that `series` is sample-aligned with the bank.
    pub fn check_aligned(&self, series: &TimeSeries) -> Result<()> {
        if let Some(rate) = self.sample_rate_hz() {
            signal::check_same_rate(rate, series.sample_rate_hz())?;
            if series.len() != self.series_len() {
                return Err(Error::LengthMismatch {
                    expected: self.series_len(),
                    found: series.len(),
                });
            }
        }
        Ok(())
    }
}

/// Power series for every (channel, band) pair, named `channel.band`, in
/// channel-major order.
pub fn build_feature_bank(channels: &[TimeSeries], cfg: &FeatureConfig) -> Result<FeatureBank> {
    if cfg.bands.is_empty() {
        return Err(Error::Empty("band list"));
    }
    // Validates alignment and channel-name uniqueness up front.
    FeatureBank::new(channels.to_vec())?;

    let mut features = Vec::with_capacity(channels.len() * cfg.bands.len());
    for ch in channels {
        let pre = match cfg.band_pass_hz {
            Some((lo, hi)) => signal::band_pass(ch, lo, hi)?,
            None => ch.clone(),
        };
        for band in &cfg.bands {
            let mut power = band_power(&pre, band, cfg.scales_per_band)?;
            if let Some(sec) = cfg.smoothing_sec {
                let w = signal::window_for_seconds(&power, sec);
                power = signal::moving_average(&power, w)?;
            }
            features.push(power);
        }
    }
    FeatureBank::new(features)
}
