use alloc::string::String;

use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("operator is not Hermitian (max |H - H^dagger| = {0:e})")]
    NotHermitian(f64),

    #[error("eigendecomposition did not converge")]
    Eigendecomposition,

    #[error("truncation n_max = {n_max} insufficient: {detail}")]
    Truncation { n_max: usize, detail: String },

    #[error("step refinement did not converge after {halvings} halvings (last change {change:e})")]
    StepRefinement { halvings: u32, change: f64 },

    #[error("Krylov exponential not converged in dimension {dim} (residual {residual:e})")]
    Krylov { dim: usize, residual: f64 },

    #[error("operation requires the lab frame")]
    WrongFrame,

    #[error("no splitting point for level ({n}, {sign}) below lambda = {limit}: exceeds scan range")]
    ExceedsScanRange { n: usize, sign: char, limit: f64 },

    #[error("branch tracking ambiguous at lambda = {lambda}: best overlap {overlap}")]
    BranchTracking { lambda: f64, overlap: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
