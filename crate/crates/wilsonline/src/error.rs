//! Error taxonomy shared by every module.
//!
//! Three failure classes matter to callers: bad inputs (`Validation`,
//! `Domain`, `Unsupported`, and the I/O wrappers), and violated internal
//! numerical invariants (`InvariantViolation`). The CLI maps the first
//! class to exit code 2 and the second to exit code 3.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngineError {
    /// Input data fails structural validation (bad file, bad matrix, bad grid).
    #[error("validation error: {0}")]
    Validation(String),

    /// An argument is outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A request is well-formed but outside the engine's scope.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Two internal computation routes that must agree did not.
    #[error("numerical invariant violated: {0}")]
    InvariantViolation(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl EngineError {
    /// Process exit code for the CLI: 2 for input problems, 3 for violated
    /// numerical invariants.
    pub fn exit_code(&self) -> i32 {
        match self {
            EngineError::InvariantViolation(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, EngineError>;
