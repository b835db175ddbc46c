use thiserror::Error;

/// Hard cap on the domain size.
pub const MAX_DOMAIN: usize = 16;
/// Hard cap on `k^n`, the number of candidate tuples of a relation.
pub const MAX_UNIVERSE: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("size guard exceeded: {0}")]
    Guard(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("search budget of {0} nodes exceeded")]
    BudgetExceeded(u64),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
