use thiserror::Error;

/// Errors raised by the estimators, the tuning procedures and the dataset layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("no observation has positive kernel weight at x = {x}")]
    EmptyNeighborhood { x: f64 },

    #[error("invalid threshold count k = {k} ({available} weighted observations available)")]
    InvalidK { k: usize, available: usize },

    #[error("data must be strictly positive")]
    NonPositiveData,

    #[error("estimated cumulative hazard at the threshold is zero")]
    ZeroHazardAtThreshold,

    #[error("tail denominator vanishes: no uncensored events above the threshold")]
    ZeroDenominator,

    #[error("survival level must lie in (0, 1), got {0}")]
    InvalidLevel(f64),

    #[error("bandwidth must be positive, got {0}")]
    InvalidBandwidth(f64),

    #[error("invalid observation: {0}")]
    InvalidObservation(String),

    #[error("empty input")]
    EmptyInput,

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("file contains no data rows")]
    EmptyFile,

    #[error("i/o error: {0}")]
    Io(String),

    #[error("configuration error: {0}")]
    Config(String),
}

/// Coarse grouping used for process exit codes and FFI status codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorFamily {
    Parse,
    Config,
    Estimation,
}

impl Error {
    pub fn family(&self) -> ErrorFamily {
        match self {
            Error::Parse { .. } | Error::EmptyFile | Error::Io(_) => ErrorFamily::Parse,
            Error::Config(_) | Error::InvalidBandwidth(_) => ErrorFamily::Config,
            _ => ErrorFamily::Estimation,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
