//! Errors rendered as `application/problem+json`.

use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use recomb_pipeline::PipelineError;
use serde_json::{json, Value};

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    /// Short machine-readable slug, rendered as `/problems/<slug>`.
    pub kind: &'static str,
    pub detail: String,
    pub extra: Option<Value>,
}

impl ApiError {
    pub fn new(status: StatusCode, kind: &'static str, detail: impl Into<String>) -> Self {
        Self { status, kind, detail: detail.into(), extra: None }
    }

    pub fn with_extra(mut self, extra: Value) -> Self {
        self.extra = Some(extra);
        self
    }

    pub fn not_found(what: &str, id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not-found", format!("no {what} {id:?}"))
    }

    pub fn bad_request(detail: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad-request", detail)
    }

    pub fn storage(e: std::io::Error) -> Self {
        tracing::error!(error = %e, "storage failure");
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "storage", e.to_string())
    }
}

impl From<PipelineError> for ApiError {
    fn from(e: PipelineError) -> Self {
        let detail = e.to_string();
        match e {
            PipelineError::Core(_) => Self::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid-input", detail),
            PipelineError::Provider { stage, source } => {
                Self::new(StatusCode::BAD_GATEWAY, "provider-failure", detail)
                    .with_extra(json!({ "stage": stage, "retryable": source.is_retryable() }))
            }
            PipelineError::Parse { stage, raw, .. } => {
                Self::new(StatusCode::BAD_GATEWAY, "unreadable-answer", detail)
                    .with_extra(json!({ "stage": stage, "raw": raw }))
            }
            PipelineError::NoDrafts(issues) => Self::new(StatusCode::BAD_GATEWAY, "no-drafts", detail)
                .with_extra(json!({ "issues": issues })),
            PipelineError::InvalidState(_) => Self::new(StatusCode::CONFLICT, "invalid-state", detail),
            PipelineError::Storage(e) => Self::storage(e),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({
            "type": format!("/problems/{}", self.kind),
            "title": self.status.canonical_reason().unwrap_or("error"),
            "status": self.status.as_u16(),
            "detail": self.detail,
        });
        if let (Some(Value::Object(extra)), Value::Object(obj)) = (self.extra, &mut body) {
            obj.extend(extra);
        }
        (
            self.status,
            [(header::CONTENT_TYPE, "application/problem+json")],
            body.to_string(),
        )
            .into_response()
    }
}

pub type ApiResult<T> = Result<T, ApiError>;
