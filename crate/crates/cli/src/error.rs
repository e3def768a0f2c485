use serde::Serialize;
use serde_json::json;
use tripsolve::query::QueryError;

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    /// Infeasible query, timed out solve, or repair that did not resolve.
    pub const UNRESOLVED: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const INTERNAL: u8 = 3;
}

/// Error reported as JSON on stderr (CLI) or in a response body (HTTP).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, thiserror::Error)]
#[error("{message}")]
pub struct AppError {
    pub code: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pointer: Option<String>,
    #[serde(skip)]
    pub exit: u8,
}

impl AppError {
    pub fn usage(code: &'static str, message: impl Into<String>) -> Self {
        AppError { code, message: message.into(), pointer: None, exit: exit::USAGE }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        AppError { code: "internal", message: message.into(), pointer: None, exit: exit::INTERNAL }
    }

    /// Query errors carry their JSON pointer; `prefix` locates the query in
    /// an enclosing document.
    pub fn query(e: &QueryError, prefix: &str) -> Self {
        let code = match e {
            QueryError::Syntax(_) => "invalid-json",
            QueryError::Schema { .. } => "schema-violation",
            QueryError::Vocabulary { .. } => "unknown-tag",
            QueryError::Inapplicable(..) => "inapplicable-modification",
        };
        AppError {
            code,
            message: e.to_string(),
            pointer: e.pointer().map(|p| format!("{prefix}{p}")),
            exit: exit::USAGE,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({ "error": self })
    }
}
