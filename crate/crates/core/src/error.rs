use thiserror::Error;

/// Errors raised by every operation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input violates a structural invariant (bad probability vector, ragged matrix, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// A parameter lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("moment targets are infeasible: {0}")]
    Infeasible(String),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    /// Transition structure is not irreducible; `class` is a closed class that traps the chain.
    #[error("reducible transition structure: closed class {class:?}")]
    Reducible { class: Vec<usize> },

    #[error("no admissible bi-infinite sequence (nilpotent transition matrix)")]
    NoAdmissibleSequence,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn validation(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
