//! Histogram plug-in mutual information and MI-ordered feature ranking.

use std::cmp::Ordering;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::TimeSeries;
use crate::wavelet::FeatureBank;

pub const DEFAULT_MI_BINS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiEstimate {
    pub nats: f64,
    /// One of the variables occupied a single bin; `nats` is 0.
    pub degenerate: bool,
}

pub fn mutual_information(x: &TimeSeries, y: &TimeSeries, bins: usize) -> Result<MiEstimate> {
    let est = mutual_information_slices(x.samples(), y.samples(), bins)?;
    if est.degenerate {
        warn!(
            "mutual information of `{}` and `{}`: constant variable",
            x.name(),
            y.name()
        );
    }
    Ok(est)
}

/// Equal-width histogram over each variable's own `[min, max]`, then
/// `Σ p(x,y) ln(p(x,y) / (p(x) p(y)))` over occupied cells, in nats.
///
/// The estimate is bit-for-bit symmetric in its arguments.
pub fn mutual_information_slices(x: &[f64], y: &[f64], bins: usize) -> Result<MiEstimate> {
    if bins < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 bins, got {bins}")));
    }
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.len() < bins {
        return Err(Error::InsufficientData {
            needed: bins,
            available: x.len(),
        });
    }
    let (bx, by) = match (quantize(x, bins), quantize(y, bins)) {
        (Some(bx), Some(by)) => (bx, by),
        _ => {
            return Ok(MiEstimate {
                nats: 0.0,
                degenerate: true,
            })
        }
    };

    let n = x.len() as u64;
    let mut joint = vec![0u64; bins * bins];
    let mut cx = vec![0u64; bins];
    let mut cy = vec![0u64; bins];
    for (&i, &j) in bx.iter().zip(&by) {
        joint[i * bins + j] += 1;
        cx[i] += 1;
        cy[j] += 1;
    }
    let mut terms: Vec<f64> = joint
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(cell, &c)| {
            let (i, j) = (cell / bins, cell % bins);
            let ratio = (c * n) as f64 / (cx[i] * cy[j]) as f64;
            c as f64 / n as f64 * ratio.ln()
        })
        .collect();
    // A fixed summation order makes MI(x, y) and MI(y, x) identical.
    terms.sort_by(f64::total_cmp);
    let nats: f64 = terms.iter().sum();
    Ok(MiEstimate {
        nats: if nats < 0.0 { 0.0 } else { nats },
        degenerate: false,
    })
}

fn quantize(v: &[f64], bins: usize) -> Option<Vec<usize>> {
    let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
        (lo.min(x), hi.max(x))
    });
    let width = hi - lo;
    if !(width > 0.0) {
        return None;
    }
    let last = bins - 1;
    Some(
        v.iter()
            .map(|&x| (((x - lo) / width * bins as f64) as usize).min(last))
            .collect(),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiEntry {
    pub name: String,
    pub mi_nats: f64,
}

/// Features sorted by descending MI with a target; equal scores are
/// ordered by name.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MiRanking {
    entries: Vec<MiEntry>,
}

impl MiRanking {
    pub fn from_scores(scores: impl IntoIterator<Item = (String, f64)>) -> Self {
        let mut entries: Vec<MiEntry> = scores
            .into_iter()
            .map(|(name, mi_nats)| MiEntry { name, mi_nats })
            .collect();
        entries.sort_by(|a, b| match b.mi_nats.total_cmp(&a.mi_nats) {
            Ordering::Equal => a.name.cmp(&b.name),
            o => o,
        });
        Self { entries }
    }

    pub fn entries(&self) -> &[MiEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn top(&self) -> Option<&MiEntry> {
        self.entries.first()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.entries.iter().position(|e| e.name == name)
    }

    /// `name,mi_nats` CSV with header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,mi_nats\n");
        for e in &self.entries {
            out.push_str(&format!("{},{}\n", e.name, e.mi_nats));
        }
        out
    }
}

pub fn rank_features(bank: &FeatureBank, target: &TimeSeries, bins: usize) -> Result<MiRanking> {
    if bank.is_empty() {
        return Err(Error::Empty("feature bank"));
    }
    bank.check_aligned(target)?;
    let scores = bank
        .features()
        .iter()
        .map(|f| Ok((f.name().to_string(), mutual_information(f, target, bins)?.nats)))
        .collect::<Result<Vec<_>>>()?;
    Ok(MiRanking::from_scores(scores))
}
