//! Uniformly sampled signals and the elementary operations the pipeline
//! needs on them: integer-factor resampling, zero-phase band-pass filtering,
//! centred moving-average smoothing and RMSE.

use crate::dsp;
use crate::error::{Error, Result};

/// Default smoothing window, in seconds.
pub const DEFAULT_SMOOTHING_SEC: f64 = 1.0;

/// A uniformly sampled, finite, non-empty real signal.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    name: String,
    sample_rate_hz: f64,
    samples: Vec<f64>,
}

impl TimeSeries {
    pub fn new(name: impl Into<String>, sample_rate_hz: f64, samples: Vec<f64>) -> Result<Self> {
        let name = name.into();
        let invalid = |reason: String| Error::InvalidSeries {
            name: name.clone(),
            reason,
        };
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(invalid(format!("sample rate must be positive, got {sample_rate_hz}")));
        }
        if samples.is_empty() {
            return Err(invalid("no samples".into()));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!("non-finite value at sample {i}")));
        }
        Ok(Self {
            name,
            sample_rate_hz,
            samples,
        })
    }

    /// Builds a series without validation; callers guarantee the invariants.
    pub(crate) fn from_parts(name: impl Into<String>, sample_rate_hz: f64, samples: Vec<f64>) -> Self {
        debug_assert!(sample_rate_hz > 0.0 && !samples.is_empty());
        debug_assert!(samples.iter().all(|v| v.is_finite()));
        Self {
            name: name.into(),
            sample_rate_hz,
            samples,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always false; kept for API symmetry with slices.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_sec(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Same name and rate, new samples (validated).
    pub fn with_samples(&self, samples: Vec<f64>) -> Result<Self> {
        Self::new(self.name.clone(), self.sample_rate_hz, samples)
    }

    /// Contiguous sub-range `[start, end)`.
    pub fn slice(&self, start: usize, end: usize) -> Result<Self> {
        if start >= end || end > self.len() {
            return Err(Error::InvalidArgument(format!(
                "slice {start}..{end} out of range for `{}` of length {}",
                self.name,
                self.len()
            )));
        }
        Ok(Self::from_parts(
            self.name.clone(),
            self.sample_rate_hz,
            self.samples[start..end].to_vec(),
        ))
    }

    /// Applies `f` pointwise; errors if the result is not finite.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        self.with_samples(self.samples.iter().map(|&v| f(v)).collect())
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.len() as f64
    }

    /// Population standard deviation.
    pub fn std(&self) -> f64 {
        let m = self.mean();
        (self.samples.iter().map(|v| (v - m).powi(2)).sum::<f64>() / self.len() as f64).sqrt()
    }
}

fn rate_matches(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs())
}

pub(crate) fn check_same_rate(expected: f64, found: f64) -> Result<()> {
    if rate_matches(expected, found) {
        Ok(())
    } else {
        Err(Error::RateMismatch { expected, found })
    }
}

/// Integer-factor resampling with a linear-phase anti-alias / anti-image
/// low-pass. The pass band extends to 0.4 of the lower of the two rates.
pub fn resample(ts: &TimeSeries, target_rate_hz: f64) -> Result<TimeSeries> {
    if !(target_rate_hz.is_finite() && target_rate_hz > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "target rate must be positive, got {target_rate_hz}"
        )));
    }
    let src = ts.sample_rate_hz();
    if rate_matches(src, target_rate_hz) {
        return Ok(TimeSeries::from_parts(ts.name(), target_rate_hz, ts.samples().to_vec()));
    }
    let samples = if src > target_rate_hz {
        let factor = integer_factor(src, target_rate_hz)?;
        decimate(ts.samples(), factor)
    } else {
        let factor = integer_factor(target_rate_hz, src)?;
        interpolate(ts.samples(), factor)
    };
    Ok(TimeSeries::from_parts(ts.name(), target_rate_hz, samples))
}

fn integer_factor(high: f64, low: f64) -> Result<usize> {
    let ratio = high / low;
    let k = ratio.round();
    if (ratio - k).abs() > 1e-9 * ratio {
        return Err(Error::InvalidArgument(format!(
            "only integer resampling factors are supported ({high} Hz / {low} Hz = {ratio})"
        )));
    }
    Ok(k as usize)
}

fn decimate(x: &[f64], factor: usize) -> Vec<f64> {
    let k = factor as f64;
    let h = dsp::fir_lowpass(0.45 / k, dsp::hamming_taps(0.1 / k));
    let filtered = dsp::filter_zero_phase(x, &h);
    filtered.into_iter().step_by(factor).collect()
}

fn interpolate(x: &[f64], factor: usize) -> Vec<f64> {
    let l = factor as f64;
    let mut h = dsp::fir_lowpass(0.45 / l, dsp::hamming_taps(0.1 / l));
    let centre = h.len() / 2;
    // Each polyphase branch gets exact gain 1/L so constants pass unchanged.
    for phase in 0..factor {
        let idx: Vec<usize> = (phase..h.len()).step_by(factor).collect();
        let sum: f64 = idx.iter().map(|&j| h[j]).sum();
        if sum.abs() > f64::EPSILON {
            idx.iter().for_each(|&j| h[j] /= sum * l);
        }
    }
    let pad = centre / factor + 1;
    let ext = dsp::odd_extend(x, pad);
    let mut stuffed = vec![0.0; ext.len() * factor];
    for (i, &v) in ext.iter().enumerate() {
        stuffed[i * factor] = v * l;
    }
    let y = dsp::convolve_same(&stuffed, &h);
    let start = pad * factor;
    y[start..start + x.len() * factor].to_vec()
}

/// Zero-phase band-pass between `low_hz` and `high_hz`.
///
/// Linear-phase windowed-sinc FIR whose constant group delay is removed by
/// centring the kernel. Cutoffs sit midway in transition bands ending at
/// `0.5 * low_hz` and `min(1.5 * high_hz, nyquist)`, so the whole
/// `[low_hz, high_hz]` range is pass band.
pub fn band_pass(ts: &TimeSeries, low_hz: f64, high_hz: f64) -> Result<TimeSeries> {
    let fs = ts.sample_rate_hz();
    let nyquist = fs / 2.0;
    if !(low_hz > 0.0 && low_hz < high_hz) {
        return Err(Error::InvalidArgument(format!(
            "band-pass cutoffs must satisfy 0 < low < high, got ({low_hz}, {high_hz})"
        )));
    }
    if high_hz >= nyquist {
        return Err(Error::InvalidArgument(format!(
            "band-pass upper cutoff {high_hz} Hz is not below Nyquist ({nyquist} Hz)"
        )));
    }
    let h = band_pass_kernel(fs, low_hz, high_hz);
    Ok(TimeSeries::from_parts(
        ts.name(),
        fs,
        dsp::filter_zero_phase(ts.samples(), &h),
    ))
}

pub(crate) fn band_pass_kernel(fs: f64, low_hz: f64, high_hz: f64) -> Vec<f64> {
    let nyquist = fs / 2.0;
    let low_cut = 0.75 * low_hz;
    let high_cut = (1.25 * high_hz).min(0.5 * (high_hz + nyquist));
    let width = (0.5 * low_hz).min(2.0 * (high_cut - high_hz));
    dsp::fir_bandpass(low_cut / fs, high_cut / fs, dsp::hamming_taps(width / fs))
}

/// Centred moving average. Windows shrink at the edges instead of padding;
/// for even `window_samples` the extra sample sits after the centre.
pub fn moving_average(ts: &TimeSeries, window_samples: usize) -> Result<TimeSeries> {
    let n = ts.len();
    if window_samples == 0 || window_samples > n {
        return Err(Error::InvalidArgument(format!(
            "moving-average window must be in 1..={n}, got {window_samples}"
        )));
    }
    let x = ts.samples();
    let (lo, hi) = x.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    let before = (window_samples - 1) / 2;
    let after = window_samples - 1 - before;
    let samples = (0..n)
        .map(|i| {
            let w = &x[i.saturating_sub(before)..(i + after + 1).min(n)];
            (w.iter().sum::<f64>() / w.len() as f64).clamp(lo, hi)
        })
        .collect();
    Ok(TimeSeries::from_parts(ts.name(), ts.sample_rate_hz(), samples))
}

/// Smoothing window of `seconds` at the series' rate, clamped to `[1, len]`.
pub fn window_for_seconds(ts: &TimeSeries, seconds: f64) -> usize {
    ((seconds * ts.sample_rate_hz()).round() as usize).clamp(1, ts.len())
}

pub fn rmse(predicted: &TimeSeries, actual: &TimeSeries) -> Result<f64> {
    rmse_slices(predicted.samples(), actual.samples())
}

pub fn rmse_slices(predicted: &[f64], actual: &[f64]) -> Result<f64> {
    if predicted.len() != actual.len() {
        return Err(Error::LengthMismatch {
            expected: actual.len(),
            found: predicted.len(),
        });
    }
    if actual.is_empty() {
        return Err(Error::Empty("rmse of empty series"));
    }
    let sse: f64 = predicted.iter().zip(actual).map(|(p, a)| (p - a).powi(2)).sum();
    Ok((sse / actual.len() as f64).sqrt())
}
