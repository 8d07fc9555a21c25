use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde_json::json;

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error("{0}")]
    BadRequest(String),

    #[error("no session '{0}'")]
    NotFound(String),

    /// An answer for a query that is not pending; nothing changed.
    #[error("{reason}")]
    Conflict { reason: String, answered: u64 },

    #[error("snapshot: {0}")]
    Snapshot(String),
}

impl From<scobo::Error> for ServiceError {
    fn from(e: scobo::Error) -> Self {
        ServiceError::BadRequest(e.to_string())
    }
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let (status, code) = match &self {
            ServiceError::BadRequest(_) => (StatusCode::BAD_REQUEST, "invalid_request"),
            ServiceError::NotFound(_) => (StatusCode::NOT_FOUND, "unknown_session"),
            ServiceError::Conflict { .. } => (StatusCode::CONFLICT, "stale_query"),
            ServiceError::Snapshot(_) => (StatusCode::INTERNAL_SERVER_ERROR, "snapshot_failed"),
        };
        let mut body = json!({ "error": code, "reason": self.to_string() });
        if let ServiceError::Conflict { answered, .. } = self {
            body["accepted"] = json!(false);
            body["queries_answered"] = json!(answered);
        }
        (status, Json(body)).into_response()
    }
}
