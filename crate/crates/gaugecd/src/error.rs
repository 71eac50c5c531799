//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Crate-wide error type.
///
/// Numerical routines distinguish between *usage* errors (bad dimensions,
/// out-of-range arguments), *solver* errors (an iteration failed to converge,
/// the integrator underflowed its step size) and *geometric* errors (a query
/// point lies on the cut locus, where the quantities we compute are not
/// defined).
#[derive(Debug, Error)]
pub enum Error {
    /// Mismatched or invalid dimensions in the input data.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// An argument is outside the domain of the operation.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The adaptive integrator could not meet its tolerance: the step size
    /// underflowed, which indicates ill-conditioned input.
    #[error("ODE step-size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    /// A ratio of determinants was requested past the first conjugate time,
    /// where it is no longer positive.
    #[error("conjugate time {t_c} is not larger than the requested endpoint")]
    ConjugateTime { t_c: f64 },

    /// The shooting solver did not converge to the requested residual.
    #[error("solver did not converge: {0}")]
    NonConvergence(String),

    /// The query point lies on (or too close to) the cut locus, where the
    /// geodesic problem is degenerate.
    #[error("point on or too close to the cut locus: {0}")]
    CutLocus(String),

    /// A bounded search failed (e.g. no exponent satisfies the requested
    /// lower bound on the sampled grid).
    #[error("unbounded search: {0}")]
    Unbounded(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
