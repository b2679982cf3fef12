use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the set where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Parameters violate the validity regime of an asymptotic formula.
    #[error("regime violation: {0}")]
    Regime(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("sample is empty")]
    EmptySample,

    #[error("unknown density id `{0}` (expected one of a..j)")]
    UnknownDensity(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
