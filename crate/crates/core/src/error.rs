use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unknown dataset `{0}`")]
    UnknownDataset(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("column `{0}` not found")]
    MissingColumn(String),

    #[error("non-numeric value {value:?} in column `{column}` at line {line}")]
    NonNumeric {
        column: String,
        line: u64,
        value: String,
    },

    #[error("dimension mismatch: expected {expected} features, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("targets do not match the task: {0}")]
    TaskMismatch(&'static str),

    #[error("split would leave the {0} partition empty")]
    EmptyPartition(&'static str),

    #[error("projection sampling produced only zero vectors after {0} attempts")]
    DegenerateSampling(usize),

    #[error("loss is not finite ({loss}) at position {position:?}")]
    NonFiniteLoss { loss: f64, position: Vec<f64> },

    #[error("unsupported model document: {0}")]
    ModelFormat(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("failed to start worker pool: {0}")]
    ThreadPool(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
