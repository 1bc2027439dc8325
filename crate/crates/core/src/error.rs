use std::path::PathBuf;

/// Errors produced anywhere in the screening pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("schema error: missing column `{0}`")]
    MissingColumn(String),

    #[error("row {row}: cannot parse label `{value}` in column `{column}` (expected 0 or 1)")]
    BadLabel { row: usize, column: String, value: String },

    #[error("duplicate document id `{0}`")]
    DuplicateId(String),

    #[error("predicate `{0}` has no examples of both classes; cannot stratify the seed set")]
    Stratification(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid value for `{key}`: {reason}")]
    InvalidValue { key: String, reason: String },

    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),

    #[error("training set needs both classes")]
    SingleClass,

    #[error("non-finite loss in training epoch {epoch}")]
    NonFinite { epoch: usize },

    #[error("dimension mismatch: model has {expected} features, vector index {found} out of range")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),

    #[error("no model for predicate `{0}`")]
    MissingModel(String),

    #[error("budget exhausted: {requested} votes requested, {remaining} remaining")]
    BudgetExhausted { requested: u64, remaining: u64 },

    #[error("pair ({item}, {predicate}) is already labeled")]
    AlreadyLabeled { item: String, predicate: String },

    #[error("cannot aggregate an empty vote list")]
    EmptyVotes,

    #[error("item `{0}` has no screening decision")]
    MissingDecision(String),

    #[error("grid cell {cell} failed: {source}")]
    Cell {
        cell: String,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn invalid(key: &str, reason: impl Into<String>) -> Self {
        Error::InvalidValue {
            key: key.to_string(),
            reason: reason.into(),
        }
    }
}
