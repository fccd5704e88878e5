//! JSON routes over [`AnnotationService`].

use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use factvc_core::corpus::FieldError;
use serde::{Deserialize, Serialize};

use crate::service::{AnnotationService, ServiceError, Submission};

#[derive(Debug, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fields: Vec<FieldError>,
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let (status, kind) = match &self {
            ServiceError::UnknownAnnotator(_) | ServiceError::UnknownTask(_) => (StatusCode::NOT_FOUND, "not_found"),
            ServiceError::Conflict(_) => (StatusCode::CONFLICT, "conflict"),
            ServiceError::Validation(_) => (StatusCode::UNPROCESSABLE_ENTITY, "validation"),
            ServiceError::BadRequest(_) => (StatusCode::BAD_REQUEST, "bad_request"),
            ServiceError::Store(e) => {
                log::error!("store failure: {e}");
                (StatusCode::INTERNAL_SERVER_ERROR, "internal")
            }
        };
        let fields = match &self {
            ServiceError::Validation(f) => f.clone(),
            _ => Vec::new(),
        };
        (status, Json(ErrorBody { error: kind.into(), message: self.to_string(), fields })).into_response()
    }
}

type Shared = Arc<AnnotationService>;

#[derive(Deserialize)]
struct TaskQuery {
    annotator: Option<String>,
}

async fn next_task(State(s): State<Shared>, Query(q): Query<TaskQuery>) -> Result<Response, ServiceError> {
    let annotator = q
        .annotator
        .filter(|a| !a.is_empty())
        .ok_or_else(|| ServiceError::BadRequest("query parameter `annotator` is required".into()))?;
    Ok(Json(s.next_task(&annotator)?).into_response())
}

async fn caption(State(s): State<Shared>, Path(task_id): Path<String>) -> Result<Response, ServiceError> {
    Ok(Json(s.caption(&task_id)?).into_response())
}

/// Parse the body ourselves so type errors come back as field errors.
fn parse_submission(body: &[u8]) -> Result<Submission, ServiceError> {
    let mut de = serde_json::Deserializer::from_slice(body);
    let sub = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if inner.is_syntax() || inner.is_eof() {
            return ServiceError::BadRequest(format!("malformed JSON: {inner}"));
        }
        let message = inner.to_string();
        let named = message.split('`').nth(1).map(str::to_string);
        let field = match (path.as_str(), named) {
            (".", Some(n)) => n,
            (".", None) => "<body>".into(),
            (p, Some(n)) if message.contains("field") => format!("{p}.{n}"),
            (p, _) => p.into(),
        };
        ServiceError::Validation(vec![FieldError { field, message }])
    })?;
    de.end().map_err(|e| ServiceError::BadRequest(format!("trailing data: {e}")))?;
    Ok(sub)
}

async fn submit(State(s): State<Shared>, body: Bytes) -> Result<Response, ServiceError> {
    let sub = parse_submission(&body)?;
    Ok(Json(s.submit(sub)?).into_response())
}

async fn progress(State(s): State<Shared>) -> Response {
    Json(s.progress()).into_response()
}

async fn agreement(State(s): State<Shared>) -> Response {
    Json(s.live_agreement()).into_response()
}

async fn protocol(State(s): State<Shared>) -> Response {
    Json(s.protocol().clone()).into_response()
}

pub fn router(service: Shared) -> Router {
    Router::new()
        .route("/api/task", get(next_task))
        .route("/api/caption/{task_id}", get(caption))
        .route("/api/annotations", post(submit))
        .route("/api/progress", get(progress))
        .route("/api/agreement", get(agreement))
        .route("/api/protocol", get(protocol))
        .with_state(service)
}

/// Serve until Ctrl-C on a fresh multi-threaded runtime.
pub fn serve_blocking(service: AnnotationService, addr: SocketAddr) -> std::io::Result<()> {
    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr).await?;
        log::info!("annotation service listening on http://{}", listener.local_addr()?);
        axum::serve(listener, router(Arc::new(service)))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
    })
}
