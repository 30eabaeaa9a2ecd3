use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("non-finite entry encountered")]
    NonFinite,

    #[error("matrix is singular")]
    Singular,

    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("size guard exceeded: {what} would need {requested} entries (limit {limit})")]
    SizeGuard {
        what: &'static str,
        requested: u128,
        limit: u128,
    },

    #[error("Kraus operators are not complete (deviation {deviation:e})")]
    IncompleteChannel { deviation: f64 },

    #[error("measurement basis is not orthonormal (deviation {deviation:e})")]
    NonOrthonormalBasis { deviation: f64 },

    #[error("branch `{branch}` is not unitary up to a constant")]
    BranchNotUnitary { branch: String },

    #[error("outcome {outcome} has zero probability for every input")]
    ZeroProbabilityOutcome { outcome: usize },

    #[error("ill-conditioned reconstruction (condition number {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
