use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the analysis pipeline.
///
/// Variants fall into three families (see [`Error::kind`]): problems with the
/// input data, numerical failures inside an estimator, and invalid
/// configuration.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at row {row}, column `{column}`: {message}")]
    Parse { row: usize, column: String, message: String },

    #[error("OHLC invariant violated at row {row}: {message}")]
    InvalidBar { row: usize, message: String },

    #[error("dates not strictly increasing at row {row}: {date}")]
    NonMonotoneDates { row: usize, date: String },

    #[error("monthly series must start in the first month of a quarter, found {0}")]
    QuarterMisaligned(String),

    #[error("monthly series is not contiguous at {0}")]
    NonContiguous(String),

    #[error("no overlapping dates between predictor file and calendar")]
    NoOverlap,

    #[error("duplicate column name `{0}`")]
    DuplicateColumn(String),

    #[error("insufficient data: need at least {needed}, got {got} ({context})")]
    InsufficientData { needed: usize, got: usize, context: &'static str },

    #[error("series lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("series has zero variance ({0})")]
    ZeroVariance(&'static str),

    #[error("negative value {value} at index {index} where non-negative input is required")]
    NegativeInput { index: usize, value: f64 },

    #[error("non-positive price {0}")]
    NonPositivePrice(f64),

    #[error("missing value at {0}")]
    MissingValue(String),

    #[error("singular design matrix (condition number {condition:.3e})")]
    Singular { condition: f64 },

    #[error("no specification converged")]
    NoConvergence,

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

/// Coarse classification used by front ends to map errors to exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Data,
    Numerical,
    Config,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io { .. }
            | Error::Parse { .. }
            | Error::InvalidBar { .. }
            | Error::NonMonotoneDates { .. }
            | Error::QuarterMisaligned(_)
            | Error::NonContiguous(_)
            | Error::NoOverlap
            | Error::DuplicateColumn(_)
            | Error::InsufficientData { .. }
            | Error::LengthMismatch(..)
            | Error::NegativeInput { .. }
            | Error::NonPositivePrice(_)
            | Error::MissingValue(_) => ErrorKind::Data,
            Error::ZeroVariance(_) | Error::Singular { .. } | Error::NoConvergence => ErrorKind::Numerical,
            Error::InvalidSpec(_) | Error::Config(_) => ErrorKind::Config,
        }
    }
}

pub(crate) fn ensure_same_len(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::LengthMismatch(a, b));
    }
    Ok(())
}
