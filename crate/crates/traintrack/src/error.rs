use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TrackError {
    /// The ribbon structure itself is malformed (dangling or duplicate slot
    /// references). Distinct from a violated track invariant.
    #[error("structural error: {0}")]
    Structural(String),
    /// An operation was called on an argument that does not satisfy its
    /// precondition, e.g. splitting a branch that is not large.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// A measure does not allow the requested move.
    #[error("measure incompatible: {0}")]
    Measure(String),
    /// A search or algorithm ran past its configured budget.
    #[error("budget exceeded: {0}")]
    Budget(String),
    /// An internal invariant failed; signals a bug rather than bad input.
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("parse error at line {line}, column {column}: {msg}")]
    Parse { line: usize, column: usize, msg: String },
    /// The guide gives equal weight to both sides of a split, leaving the
    /// direction undecided.
    #[error("guide is balanced at large branch {0}")]
    Balanced(u32),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T, E = TrackError> = std::result::Result<T, E>;
