use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A physical parameter was NaN, infinite or outside its allowed range.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The requested truncation would need more Fock levels than allowed.
    #[error("truncation needs N_max = {needed} > hard cap {cap}")]
    CutoffExceeded { needed: usize, cap: usize },

    /// A state is too tightly truncated for the requested operation.
    #[error("insufficient cutoff: {0}")]
    InsufficientCutoff(String),

    /// The closed-form propagator was asked for couplings where it does not hold.
    #[error("closed form requires {0}")]
    AnalyticInvalid(&'static str),

    /// The tridiagonal eigensolver did not converge.
    #[error("eigensolver failed to converge after {iterations} iterations at index {index}")]
    NoConvergence { index: usize, iterations: usize },

    /// The purification condition has no finite solution for these inputs.
    #[error("no finite solution: {0}")]
    NoSolution(String),

    /// Husimi superlevel set is empty.
    #[error("empty superlevel set at threshold {0}")]
    EmptySuperlevel(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
