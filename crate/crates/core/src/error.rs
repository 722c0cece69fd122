use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("label {label} out of range for factor {factor} of dimension {dim}")]
    Index {
        factor: usize,
        label: usize,
        dim: usize,
    },
    #[error("total dimension {requested} exceeds the cap of {cap}")]
    Capacity { requested: usize, cap: usize },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("invalid model: {0}")]
    Model(String),
    #[error("invalid completion: {0}")]
    Completion(String),
    #[error("calibration violated: residual {residual:e}")]
    Calibration { residual: f64 },
    #[error("invalid operator: {0}")]
    Operator(String),
    #[error("invalid field `{field}`: {message}")]
    Validation { field: String, message: String },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }
}
