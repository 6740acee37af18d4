use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("scenario vector must have at least one entry")]
    EmptyVector,

    #[error("non-finite entry {value} at index {index}")]
    NonFiniteEntry { index: usize, value: f64 },

    #[error("discount factor {value} at index {index} is outside [0, 1]")]
    DiscountOutOfRange { index: usize, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("risk statistic returned a non-finite value {0}")]
    NonFiniteValue(f64),

    #[error("invalid weight vector: {0}")]
    InvalidWeight(String),

    #[error("grid step {0} does not divide 1")]
    InvalidStep(f64),

    #[error("dimension {0} exceeds the penalty surface cap of {max}", max = crate::duality::MAX_SURFACE_DIMENSION)]
    DimensionTooLarge(usize),

    #[error("no acceptable point found in the search box of half-width {0}")]
    NoFeasiblePoint(f64),

    #[error("penalty surface has no finite entry")]
    EmptySurface,

    #[error("penalty surface failed at {} grid point(s): {}", .0.len(), .0.first().map(String::as_str).unwrap_or(""))]
    SurfacePoints(Vec<String>),

    #[error("{path}: {message}")]
    Format { path: String, message: String },

    #[error("usage: {0}")]
    Usage(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn format(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
