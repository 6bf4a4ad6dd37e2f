use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid time series `{name}`: {reason}")]
    InvalidSeries { name: String, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("length mismatch: expected {expected} samples, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("sample rate mismatch: expected {expected} Hz, found {found} Hz")]
    RateMismatch { expected: f64, found: f64 },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("variable `{0}` has zero range, cannot build a fuzzy partition")]
    DegenerateDomain(String),

    #[error("insufficient data: need at least {needed} samples, have {available}")]
    InsufficientData { needed: usize, available: usize },

    #[error("feature `{0}` not found")]
    MissingFeature(String),

    #[error("no cascade reduced the inner-validation residual (first r_cr = {r_cr:.6})")]
    NoCascadeAccepted { r_cr: f64 },

    #[error("malformed model payload: {0}")]
    MalformedModel(String),

    #[error("model version mismatch: payload has version {found}, this build reads version {expected}")]
    VersionMismatch { found: u32, expected: u32 },

    #[error("model kind mismatch: expected `{expected}`, found `{found}`")]
    KindMismatch { expected: String, found: String },

    #[error("csv: {0}")]
    Csv(String),

    #[error("{}: {source}", path.display())]
    File {
        path: std::path::PathBuf,
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}
