//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Two sequences (or a sequence and an operator section) disagree in length.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// An index is outside the finite section.
    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    /// A requested combination of inputs has no implementation.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Enumeration or dense-computation budget exceeded.
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    /// Iterative parameter search exhausted its bracket or iteration budget.
    /// Carries the (alpha, residual) evaluations made before giving up.
    #[error("no convergence: {context}; trace: {trace:?}")]
    NoConvergence {
        context: String,
        trace: Vec<(f64, f64)>,
    },

    /// Scenario or CLI configuration is invalid.
    #[error("configuration error: {0}")]
    Config(String),

    /// A quantity violated a contract it is required to satisfy
    /// (e.g. a zero index-function value paired with a nonzero error).
    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
