//! FIR design and convolution helpers shared by the filtering, resampling
//! and wavelet code.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Below this many multiply-adds direct convolution beats the FFT round trip.
const DIRECT_CONV_LIMIT: usize = 1 << 16;

/// Linear convolution trimmed to the input length, with the kernel centre
/// (index `kernel.len() / 2`) aligned to each output sample. Samples outside
/// `x` are treated as zero.
pub(crate) fn convolve_same(x: &[f64], kernel: &[f64]) -> Vec<f64> {
    if x.is_empty() || kernel.is_empty() {
        return vec![0.0; x.len()];
    }
    if x.len().saturating_mul(kernel.len()) <= DIRECT_CONV_LIMIT {
        convolve_same_direct(x, kernel)
    } else {
        convolve_same_fft(x, kernel)
    }
}

pub(crate) fn convolve_same_direct(x: &[f64], kernel: &[f64]) -> Vec<f64> {
    let n = x.len() as isize;
    let centre = (kernel.len() / 2) as isize;
    (0..n)
        .map(|i| {
            kernel
                .iter()
                .enumerate()
                .filter_map(|(j, &k)| {
                    let src = i + centre - j as isize;
                    (0..n).contains(&src).then(|| x[src as usize] * k)
                })
                .sum()
        })
        .collect()
}

fn convolve_same_fft(x: &[f64], kernel: &[f64]) -> Vec<f64> {
    let full = x.len() + kernel.len() - 1;
    let size = full.next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(size);
    let inverse = planner.plan_fft_inverse(size);

    let mut a: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
    a.resize(size, Complex::new(0.0, 0.0));
    let mut b: Vec<Complex<f64>> = kernel.iter().map(|&v| Complex::new(v, 0.0)).collect();
    b.resize(size, Complex::new(0.0, 0.0));

    forward.process(&mut a);
    forward.process(&mut b);
    for (ai, bi) in a.iter_mut().zip(&b) {
        *ai *= bi;
    }
    inverse.process(&mut a);

    let scale = 1.0 / size as f64;
    let centre = kernel.len() / 2;
    a[centre..centre + x.len()].iter().map(|c| c.re * scale).collect()
}

/// Number of Hamming-window taps (always odd) for a transition band of
/// `width` cycles/sample.
pub(crate) fn hamming_taps(width: f64) -> usize {
    let n = (3.3 / width).ceil() as usize;
    n.max(3) | 1
}

fn hamming(n: usize, len: usize) -> f64 {
    0.54 - 0.46 * (2.0 * std::f64::consts::PI * n as f64 / (len - 1) as f64).cos()
}

fn sinc_lowpass(cutoff: f64, m: f64) -> f64 {
    if m == 0.0 {
        2.0 * cutoff
    } else {
        (2.0 * std::f64::consts::PI * cutoff * m).sin() / (std::f64::consts::PI * m)
    }
}

/// Windowed-sinc low-pass with unit DC gain. `cutoff` in cycles/sample.
pub(crate) fn fir_lowpass(cutoff: f64, taps: usize) -> Vec<f64> {
    let mid = (taps / 2) as f64;
    let mut h: Vec<f64> = (0..taps)
        .map(|n| sinc_lowpass(cutoff, n as f64 - mid) * hamming(n, taps))
        .collect();
    let dc: f64 = h.iter().sum();
    h.iter_mut().for_each(|v| *v /= dc);
    h
}

/// Windowed-sinc band-pass between `low` and `high` cycles/sample, scaled to
/// unit gain at the geometric band centre.
pub(crate) fn fir_bandpass(low: f64, high: f64, taps: usize) -> Vec<f64> {
    let mid = (taps / 2) as f64;
    let mut h: Vec<f64> = (0..taps)
        .map(|n| {
            let m = n as f64 - mid;
            (sinc_lowpass(high, m) - sinc_lowpass(low, m)) * hamming(n, taps)
        })
        .collect();
    let gain = frequency_response(&h, (low * high).sqrt());
    h.iter_mut().for_each(|v| *v /= gain);
    h
}

/// Magnitude response of a real FIR at `freq` cycles/sample.
pub(crate) fn frequency_response(h: &[f64], freq: f64) -> f64 {
    let w = 2.0 * std::f64::consts::PI * freq;
    let (re, im) = h.iter().enumerate().fold((0.0, 0.0), |(re, im), (n, &v)| {
        let phase = w * n as f64;
        (re + v * phase.cos(), im - v * phase.sin())
    });
    (re * re + im * im).sqrt()
}

/// Point-symmetric ("odd") extension by `pad` samples on each side. Keeps
/// constants and linear trends continuous across the boundary.
pub(crate) fn odd_extend(x: &[f64], pad: usize) -> Vec<f64> {
    let n = x.len();
    let last = n - 1;
    let mut out = Vec::with_capacity(n + 2 * pad);
    for i in (1..=pad).rev() {
        out.push(2.0 * x[0] - x[i.min(last)]);
    }
    out.extend_from_slice(x);
    for i in 1..=pad {
        out.push(2.0 * x[last] - x[last - i.min(last)]);
    }
    out
}

/// Zero-phase FIR filtering: odd-extend, convolve with the centred kernel,
/// trim back to the input length.
pub(crate) fn filter_zero_phase(x: &[f64], kernel: &[f64]) -> Vec<f64> {
    let pad = kernel.len() / 2;
    let ext = odd_extend(x, pad);
    let y = convolve_same(&ext, kernel);
    y[pad..pad + x.len()].to_vec()
}
