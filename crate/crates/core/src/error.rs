use thiserror::Error;

use crate::sdp::SdpStatus;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix trace is {trace:.12} instead of 1")]
    NotUnitTrace { trace: f64 },

    #[error("matrix is not positive semidefinite (minimum eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid dimension {0}")]
    InvalidDimension(usize),

    #[error("invalid spin {0}: 2j must be a positive integer")]
    InvalidSpin(f64),

    #[error("Jacobi iteration did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("monotone function `{name}` is not regular (f(0) = {f_zero})")]
    IrregularFunction { name: String, f_zero: f64 },

    #[error("monotone function `{name}` failed validation: {reason}")]
    InvalidMonotoneFunction { name: String, reason: String },

    #[error("marginals are incompatible with the coupling set: {0}")]
    MarginalMismatch(String),

    #[error("ensemble does not reproduce the {which} state (deviation {deviation:.3e})")]
    EnsembleMismatch { which: &'static str, deviation: f64 },

    #[error("invalid coupling set: {0}")]
    InvalidCouplingSet(String),

    #[error("malformed SDP: {0}")]
    MalformedProblem(String),

    #[error("linear constraints are inconsistent (residual {residual:.3e})")]
    Infeasible { residual: f64 },

    #[error("SDP solver stopped with status {status:?} after {iterations} iterations (gap {gap:.3e})")]
    Solver {
        status: SdpStatus,
        iterations: usize,
        gap: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
