//! Fuzzy parallel cascades for nonlinear multi-input single-output system
//! identification from multichannel time series.
//!
//! Pipeline: [`wavelet`] band-power features, [`mi`] input ranking,
//! [`fpc`] cascade identification, compared against the [`baseline`]
//! least-squares model by the [`experiment`] harness.

// `!(x > 0.0)` style guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baseline;
mod dsp;
pub mod error;
pub mod experiment;
pub mod fpc;
pub mod fuzzy;
pub mod io;
pub mod mi;
pub mod persist;
pub mod signal;
pub mod synth;
pub mod wavelet;

pub use error::{Error, Result};
pub use signal::TimeSeries;
pub use wavelet::FeatureBank;
