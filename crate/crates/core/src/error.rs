use thiserror::Error;

/// Errors raised by the numerical kernel and the selection algorithms.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("problem size {n} exceeds the brute-force capacity of {max}")]
    Capacity { n: usize, max: usize },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("matrix is numerically singular")]
    Singular,

    #[error("transfer is not reachable to the requested tolerance (residual {residual_sq:e})")]
    NumericallyInfeasible { residual_sq: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_err(msg: impl Into<String>) -> Error {
    Error::Dimension(msg.into())
}

pub(crate) fn input_err(msg: impl Into<String>) -> Error {
    Error::Input(msg.into())
}
