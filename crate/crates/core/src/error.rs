use std::io;

/// Errors raised by netlist construction, simulation and analysis.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter is outside the domain an operation accepts.
    #[error("invalid parameter: {0}")]
    Parameter(String),
    /// The netlist violates a structural requirement (arity, cycles, missing phases).
    #[error("structural error: {0}")]
    Structural(String),
    /// A numeric argument lies outside the mathematical domain of a model.
    #[error("domain error: {0}")]
    Domain(String),
    /// Required configuration (timing annotations, gate table entries) is missing.
    #[error("configuration error: {0}")]
    Config(String),
    /// A matching-network request cannot be met.
    #[error("design error: {message} (achievable ripple {achievable_db:.2} dB)")]
    Design { message: String, achievable_db: f64 },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}

pub(crate) fn structural(msg: impl Into<String>) -> Error {
    Error::Structural(msg.into())
}
