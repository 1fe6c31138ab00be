//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by construction and by the few operations whose
/// preconditions depend on runtime data.
#[derive(Debug, Error)]
pub enum Error {
    /// Two operands that must share a length do not.
    #[error("dimension mismatch in {context}: {left} vs {right}")]
    DimensionMismatch {
        context: &'static str,
        left: usize,
        right: usize,
    },

    /// An index fell outside the addressed vector.
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    /// A vector was constructed empty.
    #[error("complex vectors must have at least one entry")]
    EmptyVector,

    /// A NaN or infinity showed up where a finite number is required.
    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },

    /// Sector bounds violate 0 <= d1 < d2 < N or the width does not divide N.
    #[error("invalid sector: {0}")]
    InvalidSector(String),

    /// A spectral mask violates its support or unit-modulus contract.
    #[error("invalid mask: {0}")]
    InvalidMask(String),

    /// A shift set contains duplicates or out-of-range entries.
    #[error("invalid shift set: {0}")]
    InvalidShifts(String),

    /// An experiment or scenario configuration is inconsistent.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A config file line failed to parse.
    #[error("config parse error at line {line}: {message}")]
    ConfigParse { line: usize, message: String },

    /// Demasking hit a mask entry with magnitude too small to divide by.
    #[error("mask entry {index} is numerically zero, cannot demask")]
    SingularMask { index: usize },

    /// A metric is undefined for the given inputs (zero denominator and such).
    #[error("degenerate metric: {0}")]
    DegenerateMetric(&'static str),

    /// A brute-force routine was asked for a problem size it refuses.
    #[error("{what} supports at most {max}, got {got}")]
    TooLarge {
        what: &'static str,
        max: usize,
        got: usize,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
