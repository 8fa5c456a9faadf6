use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative numeric routine failed to reach its tolerance.
    #[error("numeric error: {message} (best estimate {best}, error bound {bound:e})")]
    Numeric {
        message: String,
        best: f64,
        bound: f64,
    },

    /// An observation is not strictly inside (0, 1).
    #[error("data error at index {index}: value {value} is outside the open unit interval")]
    Data { index: usize, value: f64 },

    /// Chart design (L calibration) failed.
    #[error("design error: {0}")]
    Design(String),

    /// Monte Carlo estimation or model fitting failed.
    #[error("estimation error: {0}")]
    Estimation(String),

    /// A statistical test could not be computed.
    #[error("test error: {0}")]
    Test(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>, best: f64, bound: f64) -> Self {
        Error::Numeric {
            message: msg.into(),
            best,
            bound,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
