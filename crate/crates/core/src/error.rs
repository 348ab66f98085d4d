use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// A workload or report file could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    /// Input parsed but violates a data invariant.
    #[error("invalid workload: {0}")]
    Validation(String),

    /// Caller passed arguments outside an operation's domain.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A schedule is not in the state an operation requires.
    #[error("invalid schedule state: {0}")]
    State(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
