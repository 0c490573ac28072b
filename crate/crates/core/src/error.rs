use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the real domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// `|Xu ∧ Xv|` vanished (within tolerance) at the evaluation point.
    #[error("degenerate point: |Xu ∧ Xv| = {norm:e} below tolerance {tolerance:e}")]
    Degenerate { norm: f64, tolerance: f64 },

    #[error("point is not spacelike: W = {w:e} (tolerance {tolerance:e})")]
    NonSpacelike { w: f64, tolerance: f64 },

    #[error("integration failed: {reason} (reached span [{reached_from}, {reached_to}])")]
    Integration { reason: String, reached_from: f64, reached_to: f64 },

    #[error("t = {t} lies outside the solved span [{from}, {to}]")]
    OutOfSpan { t: f64, from: f64, to: f64 },

    #[error("ill-conditioned fit (condition estimate {condition:e}); try a smaller degree or a narrower interval")]
    IllConditioned { condition: f64 },

    #[error("non-finite residual sample at v = {v}")]
    NonFinite { v: f64 },

    #[error("formula input `{0}` is missing")]
    MissingSymbol(&'static str),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
