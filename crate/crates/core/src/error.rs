use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid mode selection: {0}")]
    InvalidModes(String),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("unphysical covariance matrix: smallest symplectic eigenvalue {0}")]
    Unphysical(f64),

    #[error("matrix is not symplectic (residual {0:e})")]
    NotSymplectic(f64),

    #[error("matrix is not unitary (residual {0:e})")]
    NotUnitary(f64),

    #[error("covariance is singular or not positive definite (determinant {0:e})")]
    Singular(f64),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("cascade ordering exhausts all power before stage {stage}")]
    ExhaustedPower { stage: usize },

    #[error("too many receivers: {m} (limit {limit})")]
    TooManyReceivers { m: usize, limit: usize },

    #[error("region is unbounded: {0}")]
    Unbounded(String),

    #[error("Fock truncation too coarse: tail mass {tail:e} exceeds {limit:e}")]
    Truncation { tail: f64, limit: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
