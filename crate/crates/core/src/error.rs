use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: malformed npy at byte {offset}: {reason}")]
    Npy {
        path: PathBuf,
        offset: u64,
        reason: String,
    },

    #[error("{path}: row {row}: {reason}")]
    Csv {
        path: PathBuf,
        row: usize,
        reason: String,
    },

    #[error("rank ≠ 2: expected a 2-D array, found shape {shape:?}")]
    Rank { shape: Vec<usize> },

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("invalid shape: {0}")]
    Shape(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("k = {k} out of range for {n} tokens")]
    KOutOfRange { k: usize, n: usize },

    #[error("infeasible size cap: {cap} × {k} clusters cannot hold {n} tokens")]
    InfeasibleCap { cap: usize, k: usize, n: usize },

    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("invalid synthetic spec: {0}")]
    Synthetic(String),

    #[error("invalid assignment: {0}")]
    Assignment(String),

    #[error("invalid merge trace: {0}")]
    Trace(String),

    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
