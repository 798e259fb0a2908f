use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Device parameters that do not describe a usable coupled DQD.
    #[error("invalid device: {0}")]
    InvalidDevice(String),

    /// An argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A target mean of exactly 0 or 1 needs infinite detuning.
    #[error("unreachable bias: target mean {0} requires infinite detuning")]
    UnreachableBias(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    /// Stream length mismatch in a bitwise operation.
    #[error("shape mismatch: {left} bits vs {right} bits")]
    Shape { left: usize, right: usize },

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
}
