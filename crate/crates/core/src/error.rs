use thiserror::Error;

/// Errors produced by the numerical kernels, the analytic model and the
/// configuration layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical procedure stopped before reaching its tolerance. The best
    /// estimate and its error bound are kept so callers can decide what to do.
    #[error("no convergence: best estimate {estimate:e} with error bound {error:e}")]
    Convergence { estimate: f64, error: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("not supported by the analytic model: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
