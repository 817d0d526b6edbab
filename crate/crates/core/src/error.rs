use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize, what: &'static str },

    #[error("duplicate index in row {row}")]
    DuplicateIndex { row: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("prior probability {value} at index {index} is outside (0, 1/2)")]
    InvalidPrior { index: usize, value: f64 },

    #[error("weight {value} at index {index} is not a positive finite number")]
    InvalidWeight { index: usize, value: f64 },

    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
