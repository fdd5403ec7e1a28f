use thiserror::Error;

/// Errors raised by the numerical engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An adaptive integration ran out of subdivisions before meeting its tolerance.
    #[error("{context}: no convergence (estimate {estimate:e}, error bound {error_bound:e})")]
    Numeric {
        context: String,
        estimate: f64,
        error_bound: f64,
    },

    /// The requested computation is too large to enumerate.
    #[error("resource limit: {0}")]
    Resource(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Re-labels a numeric failure, scaling the carried estimate.
    pub(crate) fn rescaled(self, context: &str, scale: f64) -> Self {
        match self {
            Error::Numeric {
                estimate,
                error_bound,
                ..
            } => Error::Numeric {
                context: context.to_string(),
                estimate: estimate * scale,
                error_bound: error_bound * scale.abs(),
            },
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
