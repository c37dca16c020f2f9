use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("header mismatch: expected {expected:?}, found {found:?}")]
    HeaderMismatch {
        expected: Vec<String>,
        found: Vec<String>,
    },
    #[error("row {row}: expected {expected} cells, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row}, column {column:?}: cannot parse {value:?} as a number")]
    BadNumber {
        row: usize,
        column: String,
        value: String,
    },
    #[error("row {row}, column {column:?}: label {label:?} is not declared")]
    UnknownLabel {
        row: usize,
        column: String,
        label: String,
    },
    #[error("row {row}, column {column:?}: missing value")]
    MissingValue { row: usize, column: String },
    #[error("invalid cell {value:?} in column {column:?}: {reason}")]
    InvalidCell {
        column: String,
        value: String,
        reason: &'static str,
    },
    #[error("unknown column {0:?}")]
    UnknownColumn(String),
    #[error("invalid schema: {0}")]
    Schema(String),
    #[error("invalid dataset: {0}")]
    Dataset(String),
    #[error("impurity {kind} is incompatible with a {target} target")]
    ImpurityMismatch {
        kind: &'static str,
        target: &'static str,
    },
    #[error("empty sample subset")]
    EmptySubset,
    #[error("column {0} cannot be used as a split variable")]
    NotAnInput(usize),
    #[error("no context column designated")]
    NoContext,
    #[error("context value {0} is out of range")]
    UnknownContextValue(u32),
    #[error("no samples with context value {0}")]
    EmptyContextSlice(u32),
    #[error("forest was built on {forest} samples but dataset has {dataset}")]
    ForestMismatch { forest: usize, dataset: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid distribution: {0}")]
    Distribution(String),
    #[error("enumeration guard exceeded: {0}")]
    GuardExceeded(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
