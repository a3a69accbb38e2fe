use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// The adaptive quadrature ran out of subdivisions before reaching the
    /// requested tolerance. The best available value is carried along.
    #[error("quadrature did not converge: value {value_re}{value_im:+}i, estimated error {est_abs_err:e}")]
    NonConvergence {
        value_re: f64,
        value_im: f64,
        est_abs_err: f64,
    },

    #[error("malformed input: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
