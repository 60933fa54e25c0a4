use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("pixel data truncated: expected {expected} samples, found {found}")]
    TruncatedData { expected: usize, found: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("invalid dimensions {width}x{height}")]
    InvalidDimensions { width: usize, height: usize },
    #[error("pixel buffer holds {found} values, expected {expected}")]
    BufferLength { expected: usize, found: usize },
    #[error("non-finite intensity at index {0}")]
    NonFinite(usize),
    #[error("invalid range: lo {lo} must be below hi {hi}")]
    InvalidRange { lo: f64, hi: f64 },
    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("sigma must be non-negative, got {0}")]
    NegativeSigma(f64),
    #[error("variance must be non-negative, got {0}")]
    NegativeVariance(f64),
    #[error("density must lie in [0, 1], got {0}")]
    DensityOutOfRange(f64),

    #[error("image {width}x{height} too small (need at least {min}x{min})")]
    ImageTooSmall {
        width: usize,
        height: usize,
        min: usize,
    },
    #[error("dimensions {width}x{height} not divisible by 2^{levels}")]
    IndivisibleDims {
        width: usize,
        height: usize,
        levels: usize,
    },
    #[error("orientation block size {0} below minimum of 4")]
    BlockTooSmall(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown filter `{0}`")]
    UnknownFilter(String),
    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },
}

impl Error {
    pub(crate) fn parse(input: &str, reason: impl Into<String>) -> Self {
        Error::Parse {
            input: input.to_string(),
            reason: reason.into(),
        }
    }
}
