//! Error taxonomy shared across the crate.

use thiserror::Error;

/// Failure modes for model construction, solving, and observable evaluation.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Chain or boundary parameters violate a documented constraint.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// The assembled superoperator is not trace preserving.
    #[error("superoperator is not trace preserving (left null-vector defect {defect:.3e})")]
    NotTracePreserving { defect: f64 },

    /// A direct factorization failed.
    #[error("factorization failed: {0}")]
    Factorization(String),

    /// An iterative solver failed to meet its residual target.
    #[error("solver did not converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    /// The requested operation does not support this problem size.
    #[error("unsupported problem size: {0}")]
    UnsupportedSize(String),

    /// A nominally real expectation value came back with a large imaginary part.
    #[error("imaginary residue {residue:.3e} on {context}, above the 1e-10 guard")]
    ImaginaryResidue { context: String, residue: f64 },

    /// The requested observable has no defined value for this boundary drive.
    #[error("observable unavailable: {0}")]
    ObservableUnavailable(String),

    /// Matrix dimensions do not match the chain configuration.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}
