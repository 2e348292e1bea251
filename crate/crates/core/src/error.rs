use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad failure class, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Load,
    Config,
    Numerical,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed header in {path}: {reason}")]
    MalformedHeader { path: PathBuf, reason: String },

    #[error("payload size mismatch in {path}: expected {expected} bytes, found {actual}")]
    PayloadSizeMismatch {
        path: PathBuf,
        expected: u64,
        actual: u64,
    },

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("class {class} has zero samples after label remap")]
    EmptyClass { class: usize },

    #[error("class {class} too small to stratify ({count} sample)")]
    ClassTooSmall { class: usize, count: usize },

    #[error("row {row} is the all-zero vector")]
    ZeroRow { row: usize },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("label {label} out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },

    #[error("zero-variance dataset")]
    ZeroVarianceDataset,

    #[error("zero variance: {0}")]
    ZeroVariance(String),

    #[error("rank-0 covariance")]
    RankZeroCovariance,

    #[error("underdetermined fit: {rows} rows for {features} features (need at least {})", features + 1)]
    Underdetermined { rows: usize, features: usize },

    #[error("fold '{fold}' training side is underdetermined: {rows} rows for {features} features")]
    UnderdeterminedFold {
        fold: String,
        rows: usize,
        features: usize,
    },

    #[error("missing feature '{0}'")]
    MissingFeature(String),

    #[error("unknown statistic '{0}'")]
    UnknownStatistic(String),

    #[error("empty sweep")]
    EmptySweep,

    #[error("{0}")]
    Numerical(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::MalformedHeader { .. }
            | Error::PayloadSizeMismatch { .. }
            | Error::NonFinite { .. }
            | Error::EmptyClass { .. }
            | Error::InvalidDataset(_)
            | Error::Json(_)
            | Error::Csv(_) => ErrorKind::Load,
            Error::InvalidConfig(_)
            | Error::ShapeMismatch(_)
            | Error::LabelOutOfRange { .. }
            | Error::MissingFeature(_)
            | Error::UnknownStatistic(_)
            | Error::EmptySweep
            | Error::Underdetermined { .. }
            | Error::UnderdeterminedFold { .. }
            | Error::ClassTooSmall { .. } => ErrorKind::Config,
            Error::ZeroRow { .. }
            | Error::ZeroVarianceDataset
            | Error::ZeroVariance(_)
            | Error::RankZeroCovariance
            | Error::Numerical(_) => ErrorKind::Numerical,
            Error::Io { .. } => ErrorKind::Io,
        }
    }
}
