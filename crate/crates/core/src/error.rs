use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input value violates its documented domain.
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("state space too large: {wlans} WLANs (limit {limit})")]
    StateSpaceTooLarge { wlans: usize, limit: usize },

    /// An iterative method failed to reach its tolerance.
    #[error("numerical failure in {context}: residual {residual:e}")]
    Numerical { context: &'static str, residual: f64 },

    #[error("contract violation: {0}")]
    Contract(String),

    /// Signals a construction bug, e.g. a singular generator matrix.
    #[error("internal error: {0}")]
    Internal(String),

    #[error("malformed scenario file: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad user input rather than numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. } | Error::StateSpaceTooLarge { .. } | Error::Json(_)
        )
    }
}
