use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A series did not settle within the term budget.
    #[error("{what} did not converge after {terms} terms (last estimate {estimate:e})")]
    Convergence {
        what: &'static str,
        terms: usize,
        estimate: f64,
    },

    /// A series converged but cancellation ate the significant digits.
    #[error("precision loss in {what}: value {value:e} with error estimate {error:e}")]
    PrecisionLoss { what: &'static str, value: f64, error: f64 },

    /// Adaptive quadrature ran out of budget before meeting the tolerance.
    #[error("quadrature failed to reach tolerance: value {value:e}, error estimate {error:e}")]
    Quadrature { value: f64, error: f64 },

    #[error("matrix is not numerically positive definite (lambda_min {lambda_min:e}, lambda_max {lambda_max:e})")]
    NotPositiveDefinite { lambda_min: f64, lambda_max: f64 },

    #[error("degenerate kernel: {0}")]
    DegenerateKernel(String),

    #[error("invalid input: {0}")]
    Input(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
