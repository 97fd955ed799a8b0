use thiserror::Error;

/// Errors raised by the formflux estimators and geometry.
#[derive(Debug, Error)]
pub enum Error {
    /// Mismatched dimensions, degrees or malformed arguments.
    #[error("argument error: {0}")]
    Argument(String),

    /// A configuration that cannot be honored (unsupported rule, bad exponent, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// The operation is not defined for this backend or shape.
    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// A domain operation produced the empty set.
    #[error("empty domain: {0}")]
    EmptyDomain(String),

    /// A sampler or estimator accepted too few draws to be meaningful.
    #[error(
        "estimator inefficiency: acceptance ratio {acceptance:.3e} over {draws} draws ({detail})"
    )]
    Inefficient {
        acceptance: f64,
        draws: u64,
        detail: String,
    },

    /// An evaluation produced NaN or infinity.
    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
