use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// Input data violate a structural invariant (e.g. S0 <= 0).
    #[error("invariant violated at {at}: {what}")]
    Invariant { what: String, at: f64 },

    /// A precondition of an analytic bound does not hold; `at` is a witness.
    #[error("precondition violated at {at}: {what}")]
    Precondition { what: String, at: f64 },

    #[error("solver aborted at t = {time} (x = {x}): {reason}")]
    SolverAbort { time: f64, x: f64, reason: String },

    #[error("unknown {kind} `{name}`")]
    UnknownStrategy { kind: &'static str, name: String },

    #[error("parse error in {path}: {msg}")]
    Parse { path: PathBuf, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
