use thiserror::Error;

/// Errors raised by the laboratory operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("mixture weights are not on the probability simplex: {0}")]
    NotSimplex(String),

    #[error("optimizer did not converge: {0}")]
    NonConvergence(String),

    #[error("efficiency bracket failure: {0}")]
    BracketFailure(String),

    #[error("pass probabilities are inconsistent: q1={q1}, q2={q2}, q12={q12}")]
    InconsistentProbabilities { q1: f64, q2: f64, q12: f64 },

    #[error("arm {arm} timestamps are not sorted at index {index}")]
    UnsortedLog { arm: u8, index: usize },

    #[error("malformed event log: {0}")]
    MalformedLog(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
