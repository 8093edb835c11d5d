use thiserror::Error;

/// Errors raised by every pipeline in the crate.
///
/// The variants are grouped by how a caller should react: usage and parse
/// errors are bad input, hypothesis failures mean a theorem does not apply,
/// inconclusive results mean a search or precision budget ran out.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("precision exhausted: {0}")]
    Precision(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("hypothesis `{name}` violated: {detail}")]
    Hypothesis { name: String, detail: String },
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    pub fn hypothesis(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Hypothesis {
            name: name.into(),
            detail: detail.into(),
        }
    }

    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Hypothesis { .. } => 2,
            Error::Inconclusive(_) | Error::Precision(_) | Error::Resource(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
