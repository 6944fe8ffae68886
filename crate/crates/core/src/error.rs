use std::io;

use thiserror::Error;

/// Errors raised across the learning pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent input data.
    #[error("input error: {0}")]
    Input(String),

    /// A model violates one of its structural invariants.
    #[error("model error: {0}")]
    Model(String),

    /// Text that could not be parsed (DIMACS, solver output, LP, CSV, JSON).
    #[error("parse error: {0}")]
    Parse(String),

    /// An external solver misbehaved: process failure, unparsable output,
    /// or an answer that does not verify.
    #[error("solver bridge error: {0}")]
    Bridge(String),

    /// The conflict or time budget ran out before the solver decided.
    #[error("solver budget exceeded after {conflicts} conflicts / {elapsed_ms} ms")]
    BudgetExceeded { conflicts: u64, elapsed_ms: u64 },

    /// A solver solution could not be turned into a model.
    #[error("decode error: {0}")]
    Decode(String),

    /// A decoded model does not extend the learning set it was decoded from.
    #[error("decoded model does not extend the learning set: {0}")]
    Faithfulness(String),

    /// The brute-force oracle refused an instance that is too large.
    #[error("instance too large for exhaustive enumeration: {0}")]
    TooLarge(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Parse(err.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Parse(err.to_string())
    }
}
