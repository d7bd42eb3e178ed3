use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input violates a precondition (wrong shape, empty set, non-finite value).
    #[error("domain error: {0}")]
    Domain(String),

    /// Input exceeds a hard size cap.
    #[error("capacity error: {0}")]
    Capacity(String),

    /// An LP or SDP solve did not reach the requested accuracy.
    #[error("solver error: {0}")]
    Solver(String),

    /// Malformed matrix file or inline matrix expression.
    #[error("parse error: {0}")]
    Parse(String),

    /// A condition that is mathematically guaranteed failed numerically.
    #[error("internal invariant violation: {0}")]
    Internal(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the CLI: 1 bad input, 2 solver failure,
    /// 3 capacity cap exceeded.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Parse(_) | Error::Io(_) => 1,
            Error::Solver(_) | Error::Internal(_) => 2,
            Error::Capacity(_) => 3,
        }
    }
}
