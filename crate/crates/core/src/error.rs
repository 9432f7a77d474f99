//! Shared error type for the crate.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("empty training set")]
    EmptyTrainingSet,

    #[error("vocabulary threshold {0} outside [0, 1]")]
    InvalidThreshold(f64),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("all differences are zero; the signed-rank test is undefined")]
    AllDifferencesZero,

    #[error("differences have zero variance; the paired t-test is undefined")]
    ZeroVariance,

    #[error("no pairable values; agreement is undefined")]
    NoPairableValues,

    #[error("annotation mismatch: {0}")]
    AnnotationMismatch(String),

    #[error("debate {0} has no winner (tied votes)")]
    UnlabeledDebate(String),

    #[error("non-finite loss at epoch {epoch} on debate {debate_id}")]
    NonFiniteLoss { epoch: usize, debate_id: String },

    #[error("epsilon {0} is not a valid finite-difference step")]
    InvalidEpsilon(f64),

    #[error("checkpoint: {0}")]
    Checkpoint(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
