use std::fmt;

/// Errors raised anywhere in the model, optimizers, or experiment harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} bits, found {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("encoding error: {0}")]
    Encoding(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{0}")]
    Invariant(InvariantViolations),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("selection error: {0}")]
    Selection(String),

    #[error("structural error: {0}")]
    Structure(String),

    #[error("experiment failure: {0}")]
    Experiment(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Every invariant a value failed, in check order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantViolations(pub Vec<String>);

impl InvariantViolations {
    pub fn names(&self) -> &[String] {
        &self.0
    }
}

impl fmt::Display for InvariantViolations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invariant violations: {}", self.0.join("; "))
    }
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
