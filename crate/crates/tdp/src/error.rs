//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by instance loading, genotype handling, the pressing
/// solver, the notation parser and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    /// Requested built-in instance does not exist.
    #[error("unknown builtin instance `{0}`")]
    NotFound(String),

    /// Malformed document or notation text.
    #[error("parse error at {at}: {message}")]
    Parse { at: String, message: String },

    /// A structurally valid document violates an instance invariant.
    #[error("invalid field `{field}`: {message}")]
    Validation { field: String, message: String },

    /// Index outside the valid range.
    #[error("index {index} out of range for length {len}")]
    Index { index: usize, len: usize },

    /// Genotype violates the invariants of its model.
    #[error("invalid genotype: {0}")]
    InvalidGenotype(String),

    /// Pressing counts outside the admissible domain.
    #[error("invalid pressings: {0}")]
    InvalidPressings(String),

    /// Neighbourhood move not applicable to the given genotype.
    #[error("invalid move: {0}")]
    InvalidMove(String),

    /// Parameter outside its documented range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Algorithm notation is syntactically valid but inconsistent.
    #[error("algorithm spec error: {0}")]
    Spec(String),

    /// An evaluation or enumeration budget would be exceeded.
    #[error("budget error: {0}")]
    Budget(String),

    /// Operation requires a non-empty solution pool.
    #[error("empty solution pool")]
    EmptyPool,

    /// Operation requires non-empty input data.
    #[error("empty input: {0}")]
    EmptyInput(String),

    /// Input records are inconsistent or incomplete.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(at: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse { at: at.into(), message: message.into() }
    }

    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation { field: field.into(), message: message.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
