use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use thiserror::Error;

use crate::protocol::{ErrorCode, ErrorView, LegalView, StateView};

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("unknown session {0}")]
    UnknownSession(String),
    #[error("stale sequence number {got}; the pending request is {expected}")]
    StaleSeq { expected: u64, got: u64, state: Box<StateView> },
    #[error("no action is expected from you now")]
    NotYourTurn(Box<StateView>),
    #[error("illegal action: {message}")]
    IllegalAction { message: String, legal: LegalView },
    #[error("the current hand is still being played")]
    HandInProgress,
    #[error("session is closed")]
    SessionClosed,
    #[error("bad config: {0}")]
    BadConfig(String),
    #[error("bad request: {0}")]
    BadRequest(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl ServiceError {
    pub fn code(&self) -> ErrorCode {
        match self {
            ServiceError::UnknownSession(_) => ErrorCode::UnknownSession,
            ServiceError::StaleSeq { .. } => ErrorCode::StaleSeq,
            ServiceError::NotYourTurn(_) => ErrorCode::NotYourTurn,
            ServiceError::IllegalAction { .. } => ErrorCode::IllegalAction,
            ServiceError::HandInProgress => ErrorCode::HandInProgress,
            ServiceError::SessionClosed => ErrorCode::SessionClosed,
            ServiceError::BadConfig(_) => ErrorCode::BadConfig,
            ServiceError::BadRequest(_) => ErrorCode::BadRequest,
            ServiceError::Internal(_) => ErrorCode::Internal,
        }
    }

    pub fn status(&self) -> StatusCode {
        match self {
            ServiceError::UnknownSession(_) => StatusCode::NOT_FOUND,
            ServiceError::StaleSeq { .. } | ServiceError::NotYourTurn(_) | ServiceError::HandInProgress => {
                StatusCode::CONFLICT
            }
            ServiceError::SessionClosed => StatusCode::GONE,
            ServiceError::IllegalAction { .. } | ServiceError::BadConfig(_) | ServiceError::BadRequest(_) => {
                StatusCode::UNPROCESSABLE_ENTITY
            }
            ServiceError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }

    pub fn view(&self) -> ErrorView {
        let (legal, state) = match self {
            ServiceError::StaleSeq { state, .. } => (state.legal, Some((**state).clone())),
            ServiceError::NotYourTurn(state) => (None, Some((**state).clone())),
            ServiceError::IllegalAction { legal, .. } => (Some(*legal), None),
            _ => (None, None),
        };
        ErrorView { code: self.code(), message: self.to_string(), legal, state }
    }
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        (self.status(), Json(self.view())).into_response()
    }
}
