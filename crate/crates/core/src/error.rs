use thiserror::Error;

/// Errors raised by the numerical kernels, family operations and bound solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("{0}")]
    Domain(String),

    /// A target value lies outside the attainable range of a function.
    #[error("{0}")]
    Range(String),

    /// The operation is not defined for the given family.
    #[error("{op} is not supported for the {family} family")]
    Unsupported {
        op: &'static str,
        family: &'static str,
    },

    /// A root solver could not bracket or converge.
    #[error("solver failure: {0}")]
    Solver(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn range(msg: impl Into<String>) -> Error {
    Error::Range(msg.into())
}
