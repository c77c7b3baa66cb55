use thiserror::Error;

use crate::popa::PopaParam;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid Popa parameter: {0}")]
    InvalidParam(String),

    #[error("{value} is outside the domain of G_{param}")]
    OffDomain { param: PopaParam, value: f64 },

    #[error("Popa parameter mismatch: G_{left} vs G_{right}")]
    ParamMismatch { left: PopaParam, right: PopaParam },

    #[error("kernel with kappa = 0 is constant and has no inverse")]
    NonInvertibleKernel,

    #[error("{what} must be positive, got {value} at x = {at}")]
    NonPositive {
        what: &'static str,
        at: f64,
        value: f64,
    },

    #[error("non-finite value {value} at x = {at}")]
    NonFinite { at: f64, value: f64 },

    #[error("x = {x} outside tabulated range [{lo}, {hi}]")]
    OutOfRange { x: f64, lo: f64, hi: f64 },

    #[error("evaluation failed at grid step {step} (x = {x}): {source}")]
    Evaluation {
        step: usize,
        x: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("Beck partition needs {needed} points, limit is {limit}")]
    PartitionTooFine { needed: f64, limit: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
