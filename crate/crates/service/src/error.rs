use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Body of every non-success response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiError {
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub details: Option<serde_json::Value>,
}

impl std::fmt::Display for ApiError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.code, self.message)?;
        if let Some(d) = &self.details {
            write!(f, " {d}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum WsError {
    #[error("{code}: {message}")]
    BadRequest { code: &'static str, message: String, details: Option<serde_json::Value> },
    #[error("{what} '{id}' not found")]
    NotFound { what: &'static str, id: String },
    #[error("{code}: {message}")]
    Conflict { code: &'static str, message: String },
    #[error("internal error: {0}")]
    Internal(String),
}

impl WsError {
    pub fn bad(code: &'static str, message: impl Into<String>) -> Self {
        WsError::BadRequest { code, message: message.into(), details: None }
    }

    pub fn internal(e: impl std::fmt::Display) -> Self {
        WsError::Internal(e.to_string())
    }

    pub fn status(&self) -> u16 {
        match self {
            WsError::BadRequest { .. } => 400,
            WsError::NotFound { .. } => 404,
            WsError::Conflict { .. } => 409,
            WsError::Internal(_) => 500,
        }
    }

    pub fn to_api(&self) -> ApiError {
        match self {
            WsError::BadRequest { code, message, details } => {
                ApiError { code: code.to_string(), message: message.clone(), details: details.clone() }
            }
            WsError::NotFound { what, id } => ApiError {
                code: "not_found".into(),
                message: self.to_string(),
                details: Some(serde_json::json!({ "kind": what, "id": id })),
            },
            WsError::Conflict { code, message } => {
                ApiError { code: code.to_string(), message: message.clone(), details: None }
            }
            WsError::Internal(m) => ApiError { code: "internal".into(), message: m.clone(), details: None },
        }
    }
}

impl From<std::io::Error> for WsError {
    fn from(e: std::io::Error) -> Self {
        WsError::Internal(e.to_string())
    }
}
