use thiserror::Error;

use crate::report::Report;

#[derive(Debug, Error)]
pub enum Error {
    #[error("enumeration budget exceeded: {what} (cap {cap}, {partial} found before stopping)")]
    BudgetExceeded {
        what: String,
        cap: usize,
        partial: usize,
    },
    #[error("category mismatch: {0}")]
    CategoryMismatch(String),
    #[error("context mismatch: {0}")]
    ContextMismatch(String),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("invalid input: {}", .0.summary())]
    Invalid(Report),
    #[error("scope error: {0}")]
    Scope(String),
    #[error("{line}:{col}: {message}")]
    Script {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("load error: {0}")]
    Load(String),
    #[error("internal invariant breach: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn budget(what: impl Into<String>, cap: usize, partial: usize) -> Error {
    Error::BudgetExceeded {
        what: what.into(),
        cap,
        partial,
    }
}
