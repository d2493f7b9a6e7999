//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

/// Errors reported by corpus loading, vectorization, training, and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("empty corpus: {0}")]
    EmptyCorpus(String),

    #[error("line {line}: {message}")]
    MalformedRow { line: usize, message: String },

    #[error("line {line}: label {label:?} not in label map")]
    UnmappedLabel { line: usize, label: String },

    #[error("duplicate document id {0:?}")]
    DuplicateId(String),

    #[error("class {class} has {available} documents, {needed} requested")]
    InsufficientClass {
        class: crate::corpus::Polarity,
        available: usize,
        needed: usize,
    },

    #[error("fold count must be at least 2, got {0}")]
    TooFewFolds(usize),

    #[error("class {class} has {available} documents, fewer than {folds} folds")]
    ClassSmallerThanFolds {
        class: crate::corpus::Polarity,
        available: usize,
        folds: usize,
    },

    #[error("document {0:?} missing from fold plan")]
    MissingFromPlan(String),

    #[error("fold {0} training data collapsed to a single class")]
    FoldCollapsed(usize),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("length mismatch: {left} vs {right} ({what})")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    #[error("feature index {index} out of range for {size} columns")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("training data contains a single class")]
    SingleClass,

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("cannot parse {what} at line {line}: {message}")]
    ParseFormat {
        what: &'static str,
        line: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
