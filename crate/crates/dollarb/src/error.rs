//! Crate-wide error type.

use std::path::PathBuf;

/// Everything that can go wrong across the pipeline, from file I/O up to
/// recognizer preconditions.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: invalid JSON: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    /// A malformed or inconsistent record inside a `.jsonl` dataset file.
    /// Always names the offending file and 1-based line.
    #[error("{path}:{line}: {message}")]
    Record {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid layout: {0}")]
    InvalidLayout(String),

    #[error("invalid gesture: {0}")]
    InvalidGesture(String),

    /// A caller-supplied parameter violates a precondition (bad filter order,
    /// window larger than the signal, nPC exceeding the channel count, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Not enough data to run the requested operation (empty template set,
    /// too few trials for a protocol, ...).
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// An iterative numerical routine failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
