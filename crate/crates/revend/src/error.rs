//! Error taxonomy shared by the library and the CLI exit-code contract.

use thiserror::Error;

/// Failure classes. Each maps to a stable process exit code so scripted
/// callers can distinguish bad input from numerical breakdown.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Flag or argument misuse (CLI layer).
    #[error("usage: {0}")]
    Usage(String),
    /// File could not be read or written.
    #[error("io: {0}")]
    Io(String),
    /// Text input did not parse; `offset` is a byte position into the source.
    #[error("parse error at byte {offset}: {msg}")]
    Parse { offset: usize, msg: String },
    /// Input violates a mathematical precondition (curve leaves the model
    /// half-plane, nonpositive parameter, point on the rotation axis, ...).
    #[error("domain: {0}")]
    Domain(String),
    /// A numerical procedure failed to reach its tolerance or produced
    /// non-finite values.
    #[error("numeric: {0}")]
    Numeric(String),
    /// A catalog entry classified differently from its declared expectation.
    #[error("expectation mismatch: {0}")]
    Mismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code: 0 success, 1 usage, 2 input/domain, 3 numeric,
    /// 4 expectation mismatch.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 1,
            Error::Io(_) | Error::Parse { .. } | Error::Domain(_) => 2,
            Error::Numeric(_) => 3,
            Error::Mismatch(_) => 4,
        }
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}
