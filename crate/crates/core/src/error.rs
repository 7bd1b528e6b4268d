use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A drift configuration that violates an assumption the operation needs.
    #[error("assumption violated: {0}")]
    AssumptionViolated(String),

    /// Enumeration would exceed its outcome budget.
    #[error("outcome budget exceeded: {count} outcomes requested, cap is {cap}")]
    BudgetExceeded { count: u128, cap: u128 },

    /// Sample without spread (constant data) handed to a statistical test.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
