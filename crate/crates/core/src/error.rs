use crate::quat::Quaternion;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, AdhmError>;

#[derive(Debug, Error)]
pub enum AdhmError {
    /// Input outside the domain of an operation (zero quaternion inverse,
    /// evaluation at a pole, non-positive weight, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The (embedded) linear system is singular or its condition number is
    /// above the rejection threshold. `at` names the spacetime point or grid
    /// node where the invertibility condition failed, when known.
    #[error("singular system (condition number {condition:.3e}){}", fmt_at(.at))]
    Singular {
        condition: f64,
        at: Option<Quaternion>,
    },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// Malformed data file or inconsistent input; the message carries the
    /// offending field.
    #[error("invalid input: {0}")]
    Input(String),

    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn fmt_at(at: &Option<Quaternion>) -> String {
    match at {
        Some(q) => format!(" at x = {q}"),
        None => String::new(),
    }
}

impl AdhmError {
    /// Attach the evaluation point to a singular-system error.
    pub fn at(self, x: Quaternion) -> Self {
        match self {
            AdhmError::Singular { condition, .. } => AdhmError::Singular {
                condition,
                at: Some(x),
            },
            other => other,
        }
    }

    pub fn is_singular(&self) -> bool {
        matches!(self, AdhmError::Singular { .. })
    }
}
