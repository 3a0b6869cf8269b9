use thiserror::Error;

/// Failures raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the documented domain of the operation.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Two independent computation routes disagreed beyond tolerance.
    #[error("cross-check failed for {what}: relative error {rel_err:e} exceeds {tol:e}")]
    CrossCheck {
        what: &'static str,
        rel_err: f64,
        tol: f64,
    },

    /// A hard invariant (e.g. kernel positivity or majorant chain) was violated.
    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    /// A series evaluation could not certify its tail within the term cap.
    #[error("tail bound {bound:e} still above tolerance {tol:e} after {terms} terms")]
    TailNotCertified { terms: usize, bound: f64, tol: f64 },

    /// The truncated majorant sum still had a non-negligible last term.
    #[error("majorant truncation at J={cap}: last term {last:e} is not below {limit:e}")]
    TruncationTooShort { cap: usize, last: f64, limit: f64 },

    /// Adaptive quadrature exhausted its subdivision budget.
    #[error("quadrature on [{a}, {b}] did not reach tolerance {tol:e} (estimate {estimate:e})")]
    QuadratureNonConvergence {
        a: f64,
        b: f64,
        tol: f64,
        estimate: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
