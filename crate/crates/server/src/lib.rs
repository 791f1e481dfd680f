//! HTTP/JSON endpoints for interactive exploration sessions.
//!
//! | method | path                          | body / query              |
//! |--------|-------------------------------|---------------------------|
//! | POST   | `/sessions`                   | `{schema, examples}`      |
//! | GET    | `/sessions/{id}`              |                           |
//! | POST   | `/sessions/{id}/answer`       | `{token, answer}`         |
//! | GET    | `/sessions/{id}/journal`      | `?offset=&limit=`         |
//!
//! Every error is a JSON object `{reason, message}`. Rejected answers use the
//! reason codes `condition_i`, `condition_iii`, `consistency` and
//! `stale_token`.

use std::future::Future;
use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

use attrex_core::format::{AnswerRecord, ExampleRecord, SchemaFile};
use attrex_core::session::{JournalPage, SessionManager, SessionSnapshot, SharedSession};
use attrex_core::{Error, RejectReason};

const DEFAULT_PAGE: usize = 100;
const MAX_PAGE: usize = 1000;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateRequest {
    pub schema: SchemaFile,
    #[serde(default)]
    pub examples: Vec<ExampleRecord>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnswerRequest {
    pub token: String,
    pub answer: AnswerRecord,
}

#[derive(Debug, Deserialize)]
pub struct PageQuery {
    #[serde(default)]
    pub offset: usize,
    pub limit: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ErrorBody {
    pub reason: String,
    pub message: String,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn new(status: StatusCode, reason: &str, message: impl Into<String>) -> Self {
        Self {
            status,
            body: ErrorBody {
                reason: reason.to_owned(),
                message: message.into(),
            },
        }
    }

    fn not_found(id: &str) -> Self {
        Self::new(
            StatusCode::NOT_FOUND,
            "not_found",
            format!("no session {id}"),
        )
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        match e {
            Error::Rejected { reason, message } => {
                let status = match reason {
                    RejectReason::StaleToken => StatusCode::CONFLICT,
                    _ => StatusCode::UNPROCESSABLE_ENTITY,
                };
                Self::new(status, &reason.to_string(), message)
            }
            Error::NoCompletion { .. } | Error::Inconsistent { .. } => Self::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "inconsistent_examples",
                message,
            ),
            Error::Io(_) | Error::Contract(_) | Error::CorruptJournal { .. } => {
                log::error!("internal error: {message}");
                Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
            }
            _ => Self::new(StatusCode::BAD_REQUEST, "bad_request", message),
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", e.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", e.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

type AppState = Arc<SessionManager>;

pub fn router(manager: Arc<SessionManager>) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(state))
        .route("/sessions/{id}/answer", post(answer))
        .route("/sessions/{id}/journal", get(journal))
        .with_state(manager)
}

/// Serves until `shutdown` resolves.
pub async fn serve(
    listener: tokio::net::TcpListener,
    manager: Arc<SessionManager>,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(manager))
        .with_graceful_shutdown(shutdown)
        .await
}

fn lookup(manager: &SessionManager, id: &str) -> Result<SharedSession, ApiError> {
    manager.get(id).ok_or_else(|| ApiError::not_found(id))
}

fn lock(session: &SharedSession) -> std::sync::MutexGuard<'_, attrex_core::session::Session> {
    session
        .lock()
        .unwrap_or_else(|poisoned| poisoned.into_inner())
}

async fn create(
    State(manager): State<AppState>,
    body: Result<Json<CreateRequest>, JsonRejection>,
) -> Result<(StatusCode, Json<SessionSnapshot>), ApiError> {
    let Json(request) = body?;
    let schema = request.schema.into_schema()?;
    let examples = request
        .examples
        .iter()
        .map(|r| r.decode(&schema))
        .collect::<Result<Vec<_>, _>>()?;
    let session = manager.create(schema, examples)?;
    let snapshot = lock(&session).snapshot();
    log::info!("created session {}", snapshot.session_id);
    Ok((StatusCode::CREATED, Json(snapshot)))
}

async fn state(
    State(manager): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<SessionSnapshot>, ApiError> {
    let session = lookup(&manager, &id)?;
    let snapshot = lock(&session).snapshot();
    Ok(Json(snapshot))
}

async fn answer(
    State(manager): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<AnswerRequest>, JsonRejection>,
) -> Result<Json<SessionSnapshot>, ApiError> {
    let session = lookup(&manager, &id)?;
    let Json(request) = body?;
    let mut guard = lock(&session);
    let answer = request.answer.decode(guard.schema())?;
    guard.submit_answer(&request.token, answer)?;
    Ok(Json(guard.snapshot()))
}

async fn journal(
    State(manager): State<AppState>,
    Path(id): Path<String>,
    query: Result<Query<PageQuery>, QueryRejection>,
) -> Result<Json<JournalPage>, ApiError> {
    let session = lookup(&manager, &id)?;
    let Query(page) = query?;
    let limit = page.limit.unwrap_or(DEFAULT_PAGE).min(MAX_PAGE);
    let result = lock(&session).journal_page(page.offset, limit);
    Ok(Json(result))
}
