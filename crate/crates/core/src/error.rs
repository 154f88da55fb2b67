//! Error types.

use thiserror::Error;

/// Failures of the jet calculus and its text/JSON forms.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetError {
    #[error("not a total x-derivative: {0}")]
    NotExact(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("malformed JSON: {0}")]
    Schema(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("cannot invert coordinate change: {0}")]
    Inversion(String),
    #[error("gradient system is not closed: {0}")]
    NotClosed(String),
    #[error("index out of bounds: {0}")]
    OutOfBounds(String),
    #[error("invalid generator: {0}")]
    InvalidGenerator(String),
    #[error("inconsistent table: {0}")]
    InconsistentTable(String),
    #[error("outside the derivable range: {0}")]
    OutOfDerivableRange(String),
    #[error("data integrity failure: {0}")]
    DataIntegrity(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
