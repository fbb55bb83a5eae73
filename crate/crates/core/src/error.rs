use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |M - M^dagger| = {residual:e})")]
    NonHermitianInput { residual: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("trace is {trace}, expected 1")]
    TraceNotOne { trace: f64 },

    #[error("invalid rank {rank} for total dimension {dim}")]
    InvalidRank { rank: usize, dim: usize },

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("spectrum has repeated eigenvalues; the minimum needs a non-degenerate spectrum")]
    DegenerateSpectrum,

    #[error("state vector has norm {norm}, expected 1")]
    NotNormalized { norm: f64 },

    #[error("skew information {value:e} is zero: the probe is blind to this generator")]
    ZeroSusceptibility { value: f64 },

    #[error("rational function has a pole at N = {n}")]
    PoleEvaluation { n: i64 },
}

impl Error {
    pub(crate) fn param(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }
}
