//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the numerical operations in this crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An input lies outside the mathematical domain of the operation
    /// (e.g. a point on or outside the unit circle).
    #[error("domain error: {0}")]
    Domain(String),

    /// A parameter violates a structural precondition (e.g. `2k <= 1`).
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Quadrature refinement did not reach the requested relative
    /// tolerance. Carries the last two estimates so callers can judge how
    /// far off the run was.
    #[error(
        "accuracy error: quadrature not converged after {refinements} refinements \
         (last two estimates {previous:.17e}, {latest:.17e})"
    )]
    Accuracy {
        latest: f64,
        previous: f64,
        refinements: usize,
    },

    /// The constrained minimizer ran out of iterations.
    #[error(
        "optimization error: no convergence after {iterations} iterations \
         (value {value:.17e}, relative change {rel_change:.3e})"
    )]
    Optimization {
        iterations: usize,
        value: f64,
        rel_change: f64,
    },

    /// A bracketing or bisection search failed to find what it needs
    /// (e.g. no N-witness below the overflow cap).
    #[error("search error: {0}")]
    Search(String),

    /// The ODE integrator failed (step-size underflow or overflow guard).
    #[error("integration error: {0}")]
    Integration(String),

    /// A mathematically guaranteed property failed on computed data.
    /// This is the loud counterpart of an assertion: it is reported, never
    /// silently ignored.
    #[error("property violation: {0}")]
    PropertyViolation(String),

    /// Skip signal: the holomorphic factor vanishes at the requested point,
    /// so the pointwise gradient comparison is not defined there.
    #[error("holomorphic factor vanishes at the requested point")]
    HoloZero,
}

pub type Result<T> = std::result::Result<T, Error>;
