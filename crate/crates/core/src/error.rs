use std::io;

use thiserror::Error;

/// Errors produced by the core library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("line {line}: {message}")]
    Malformed { line: u64, message: String },

    #[error("duplicate {kind} id {id} (line {line})")]
    DuplicateId { kind: &'static str, id: u64, line: u64 },

    #[error("data inconsistency in paper {paper_id}: {message}")]
    DataInconsistency { paper_id: u64, message: String },

    #[error("{solver} did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged {
        solver: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{0}")]
    Undefined(String),

    #[error("graph cache: {0}")]
    Cache(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
