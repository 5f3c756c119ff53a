use thiserror::Error;

/// Errors produced by the analytic and channel-model layers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument was outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A series or quadrature failed to reach the requested tolerance.
    /// Carries the partial result and a bound on the remaining error.
    #[error("accuracy error in {context}: estimated error {est_error:.3e} (partial result {partial:.6e})")]
    Accuracy {
        context: &'static str,
        partial: f64,
        est_error: f64,
    },

    /// A matrix that must be Hermitian was not.
    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),

    /// A matrix that must be positive semidefinite had an eigenvalue below
    /// the clipping threshold.
    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    PsdViolation(f64),

    /// The projection of the direct channel onto the RIS-BS steering vector
    /// vanished, so the common phase of the optimal RIS configuration is
    /// undefined.
    #[error("degenerate projection: |a_b^H h_d| is numerically zero")]
    DegenerateProjection,

    /// Moment matching for the envelope-sum statistic produced a
    /// non-positive variance (can happen at extreme correlation).
    #[error("degenerate envelope-sum variance {0:.3e}; fall back to the deterministic limit")]
    DegenerateYVariance(f64),

    /// Vector or matrix dimensions disagree.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
