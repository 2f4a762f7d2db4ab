use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use glyphlab_core::data::DataError;
use glyphlab_core::palette::PaletteError;
use glyphlab_core::sampler::{OverrideError, SampleError};
use glyphlab_core::scales::ResolveError;
use glyphlab_core::session::SessionError;
use serde::Serialize;

/// Every failure leaves the service as `{code, message}` JSON.
#[derive(Debug, thiserror::Error)]
#[error("{code}: {message}")]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    pub details: Option<serde_json::Value>,
}

#[derive(Serialize)]
struct Body<'a> {
    code: &'a str,
    message: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    details: Option<&'a serde_json::Value>,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError { status, code, message: message.into(), details: None }
    }

    pub fn session_not_found(id: &str) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, "session_not_found", format!("no session `{id}`"))
    }

    pub fn storage(e: impl std::fmt::Display) -> Self {
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "storage", e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        if self.status.is_server_error() {
            tracing::error!(code = self.code, message = %self.message);
        }
        let body = Body { code: self.code, message: &self.message, details: self.details.as_ref() };
        (self.status, Json(body)).into_response()
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "bad_request", r.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(r: QueryRejection) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "bad_request", r.body_text())
    }
}

impl From<DataError> for ApiError {
    fn from(e: DataError) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "invalid_table", e.to_string())
    }
}

impl From<PaletteError> for ApiError {
    fn from(e: PaletteError) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "invalid_palette", e.to_string())
    }
}

impl From<ResolveError> for ApiError {
    fn from(e: ResolveError) -> Self {
        let (status, code) = match e {
            ResolveError::RowOutOfRange(_) => (StatusCode::NOT_FOUND, "unknown_row"),
            ResolveError::MissingValue { .. } => (StatusCode::UNPROCESSABLE_ENTITY, "missing_value"),
            ResolveError::NonPositiveSize => (StatusCode::UNPROCESSABLE_ENTITY, "non_positive_size"),
            ResolveError::Mismatch(_) => (StatusCode::INTERNAL_SERVER_ERROR, "design_mismatch"),
        };
        ApiError::new(status, code, e.to_string())
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        use StatusCode as S;
        let message = e.to_string();
        let (status, code) = match &e {
            SessionError::InvalidDesignation(violations) => {
                let mut err = ApiError::new(S::UNPROCESSABLE_ENTITY, "invalid_designation", message);
                err.details = serde_json::to_value(violations).ok();
                return err;
            }
            SessionError::Data(_) => (S::BAD_REQUEST, "invalid_table"),
            SessionError::Sample(SampleError::PaletteExhausted) => (S::CONFLICT, "palette_exhausted"),
            SessionError::Sample(SampleError::ColorBudgetExceeded { .. }) => {
                (S::UNPROCESSABLE_ENTITY, "color_budget_exceeded")
            }
            SessionError::Sample(_) => (S::UNPROCESSABLE_ENTITY, "invalid_designation"),
            SessionError::Override(OverrideError::ShapeAlreadyUsed(_)) => (S::CONFLICT, "shape_already_used"),
            SessionError::Override(OverrideError::IncompatibleChannel(_)) => {
                (S::UNPROCESSABLE_ENTITY, "incompatible_channel")
            }
            SessionError::Override(OverrideError::UnknownTarget(_)) => (S::NOT_FOUND, "unknown_target"),
            SessionError::UnknownDesign(_) => (S::NOT_FOUND, "unknown_design"),
            SessionError::UnknownRow(_) => (S::NOT_FOUND, "unknown_row"),
            SessionError::BadGlyphKey(_) => (S::BAD_REQUEST, "bad_glyph_key"),
            SessionError::NothingSelected => (S::CONFLICT, "nothing_selected"),
            SessionError::NonPositiveSize => (S::UNPROCESSABLE_ENTITY, "non_positive_size"),
            SessionError::CorruptSnapshot => (S::INTERNAL_SERVER_ERROR, "corrupt_snapshot"),
        };
        ApiError::new(status, code, message)
    }
}
