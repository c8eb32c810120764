use thiserror::Error;

/// Errors raised while loading instances or evaluating conditions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("unknown domain `{0}`")]
    UnknownDomain(String),
    #[error("schema violation at `{path}`: {reason}")]
    SchemaViolation { path: String, reason: String },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("expression produced a non-finite value")]
    NonFinite,
}

impl ModelError {
    pub fn schema(path: impl Into<String>, reason: impl Into<String>) -> Self {
        ModelError::SchemaViolation {
            path: path.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = ModelError> = std::result::Result<T, E>;
