use thiserror::Error;

/// Errors raised by the library. The CLI maps each variant onto a stable exit code.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid direction: {0}")]
    InvalidDirection(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("correlation value {value} lies outside [-1 - {tol}, 1 + {tol}]")]
    InvalidCorrelation { value: f64, tol: f64 },

    #[error("model '{model}' broke its contract: {detail}")]
    ModelContract { model: String, detail: String },

    #[error("no records match the requested setting pair")]
    EmptySelection,

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
