use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("coincident points ({x}, {y}): angle is undefined")]
    CoincidentPoints { x: f64, y: f64 },

    #[error("invalid position matrix: {0}")]
    InvalidPositions(String),

    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("beam index {index} out of range 1..={max}")]
    BeamIndexOutOfRange { index: usize, max: usize },

    #[error("invalid value for `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("invalid sweep specification `{spec}`: {reason}")]
    InvalidSweep { spec: String, reason: String },

    #[error("unknown strategy `{0}` (expected idealized, naive, one-step or two-step)")]
    UnknownStrategy(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed scenario JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV output error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
