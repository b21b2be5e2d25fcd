//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by any layer of the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// Two operands have incompatible qubit counts or dimensions.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A qubit or cell index is outside the valid range.
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    /// A geometric precondition (adjacency, alignment, footprint) failed.
    #[error("geometry violation: {0}")]
    Geometry(String),

    /// A grid region is already occupied.
    #[error("overlap: {0}")]
    Overlap(String),

    /// A size cap (dense-oracle qubit limit, table enumeration bound) was hit.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// The circuit text failed to parse.
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    /// A gate kind or parameterization has no decomposition.
    #[error("unsupported gate: {0}")]
    UnsupportedGate(String),

    /// A schedule step cannot be executed at the requested tier.
    #[error("step {step} unsupported at the {tier} tier: {msg}")]
    UnsupportedAtTier { step: usize, tier: String, msg: String },

    /// A value-level precondition failed (wrong patch state, bad phase, ...).
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// Decoding hit a syndrome with no table entry.
    #[error("decode failure: {0}")]
    DecodeFailure(String),

    /// File or stream I/O failed.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// JSON (de)serialization failed.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
