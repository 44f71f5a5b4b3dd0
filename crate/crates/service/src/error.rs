use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use fcax_core::Error as CoreError;
use serde_json::json;

/// An error as sent to clients: status, machine-readable code, message.
#[derive(Debug, thiserror::Error)]
#[error("{code}: {message}")]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
        }
    }

    pub fn not_found(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "E_UNKNOWN_SESSION", format!("no session {id:?}"))
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "E_BAD_REQUEST", message)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "E_INTERNAL", message)
    }
}

impl From<CoreError> for ApiError {
    fn from(e: CoreError) -> Self {
        let status = match &e {
            CoreError::UnknownExpert(_) => StatusCode::NOT_FOUND,
            CoreError::StalePremise
            | CoreError::DuplicateAnswer { .. }
            | CoreError::AttributeNotPending(_)
            | CoreError::NoActiveQuestion
            | CoreError::QuestionOutstanding
            | CoreError::Conflict(_)
            | CoreError::ExamplesContradict(_) => StatusCode::CONFLICT,
            CoreError::Parse { .. } => StatusCode::BAD_REQUEST,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        Self::new(status, e.code(), e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({ "error": { "code": self.code, "message": self.message } });
        (self.status, Json(body)).into_response()
    }
}

pub type ApiResult<T> = Result<T, ApiError>;
