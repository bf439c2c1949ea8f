use thiserror::Error;

/// Failures of symbolic operations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("symbol tables do not match: {0}")]
    TableMismatch(String),
    #[error("parity error: {0}")]
    Parity(String),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("not a perfect square: {0}")]
    NotSquare(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
