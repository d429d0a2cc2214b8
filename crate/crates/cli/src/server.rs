//! Session service routes.
//!
//! Bodies are the library's JSON documents: a sketch bundle in, layouts,
//! validation reports, session logs and iteration traces out. Errors come
//! back as `{"error": kind, "message": text}`.

use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use sketchbim::extract::SketchBundle;
use sketchbim::session::{score_session, SessionError, SessionManager};
use sketchbim::Layout;
use tower_http::cors::CorsLayer;

pub type Shared = Arc<SessionManager>;

pub struct ApiError(StatusCode, String, String);

impl ApiError {
    fn bad_request(kind: &str, message: impl ToString) -> Self {
        ApiError(StatusCode::BAD_REQUEST, kind.into(), message.to_string())
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let (status, kind) = match &e {
            SessionError::UnknownSession(_) => (StatusCode::NOT_FOUND, "UnknownSession".to_string()),
            SessionError::PhaseViolation { .. } => (StatusCode::CONFLICT, "PhaseViolation".into()),
            SessionError::Edit(err) => (StatusCode::UNPROCESSABLE_ENTITY, err.kind().into()),
            SessionError::Extract(_) => (StatusCode::UNPROCESSABLE_ENTITY, "ExtractionFailed".into()),
            SessionError::Compile(_) => (StatusCode::UNPROCESSABLE_ENTITY, "CompileFailed".into()),
            SessionError::Build(_) => (StatusCode::UNPROCESSABLE_ENTITY, "BuildFailed".into()),
            SessionError::NoSketch => (StatusCode::CONFLICT, "NoSketch".into()),
            SessionError::Io(_) => (StatusCode::INTERNAL_SERVER_ERROR, "Storage".into()),
        };
        ApiError(status, kind, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(json!({"error": self.1, "message": self.2}))).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

/// Runs a session call off the async workers; extraction and builds are
/// CPU bound.
async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> Result<T, SessionError> + Send + 'static,
) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError(StatusCode::INTERNAL_SERVER_ERROR, "Internal".into(), e.to_string()))?
        .map_err(ApiError::from)
}

pub fn router(manager: Shared) -> Router {
    Router::new()
        .route("/sessions", post(create).get(list))
        .route("/sessions/{id}/layout", get(layout))
        .route("/sessions/{id}/feedback", post(feedback))
        .route("/sessions/{id}/finalize", post(finalize))
        .route("/sessions/{id}/build", post(build))
        .route("/sessions/{id}/log", get(log))
        .route("/sessions/{id}/model.obj", get(model))
        .route("/sessions/{id}/metrics", get(metrics_query).post(metrics_body))
        .layer(CorsLayer::permissive())
        .with_state(manager)
}

async fn create(State(m): State<Shared>, body: String) -> ApiResult<Response> {
    let bundle = SketchBundle::from_json(&body).map_err(|e| ApiError::bad_request("Bundle", e))?;
    let started = blocking(move || m.start_session(bundle)).await?;
    Ok((StatusCode::CREATED, Json(started)).into_response())
}

async fn list(State(m): State<Shared>) -> Json<Vec<String>> {
    Json(m.ids())
}

async fn layout(State(m): State<Shared>, Path(id): Path<String>) -> ApiResult<Json<Layout>> {
    Ok(Json(m.layout(&id)?))
}

#[derive(Deserialize)]
pub struct FeedbackBody {
    pub text: String,
}

async fn feedback(State(m): State<Shared>, Path(id): Path<String>, body: String) -> ApiResult<Response> {
    // a JSON {"text": ...} object, or the feedback as plain text
    let text = match serde_json::from_str::<FeedbackBody>(&body) {
        Ok(b) => b.text,
        Err(_) => body,
    };
    let r = blocking(move || m.submit_feedback(&id, &text)).await?;
    Ok(Json(r).into_response())
}

async fn finalize(State(m): State<Shared>, Path(id): Path<String>) -> ApiResult<Response> {
    let r = blocking(move || m.finalize(&id)).await?;
    Ok(Json(r).into_response())
}

#[derive(Serialize)]
struct BuildSummary {
    files: Vec<&'static str>,
    repairs: usize,
    warnings: Vec<String>,
    plan: sketchbim::bim::BuildPlan,
}

async fn build(State(m): State<Shared>, Path(id): Path<String>) -> ApiResult<Response> {
    let art = blocking(move || m.finalize_and_build(&id)).await?;
    Ok(Json(BuildSummary {
        files: sketchbim::session::Artifacts::FILES.to_vec(),
        repairs: art.repairs,
        warnings: art.warnings,
        plan: art.plan,
    })
    .into_response())
}

async fn log(State(m): State<Shared>, Path(id): Path<String>) -> ApiResult<Response> {
    Ok(Json(m.session_log(&id)?).into_response())
}

async fn model(State(m): State<Shared>, Path(id): Path<String>) -> ApiResult<Response> {
    let obj = blocking(move || m.model_obj(&id)).await?;
    Ok(([(header::CONTENT_TYPE, "model/obj")], obj).into_response())
}

#[derive(Deserialize)]
pub struct MetricsQuery {
    /// Ground-truth layout document.
    pub gt: String,
}

fn metrics(m: &SessionManager, id: &str, gt: &str) -> ApiResult<Response> {
    let gt = Layout::from_json(gt).map_err(|e| ApiError::bad_request("GroundTruth", e))?;
    let log = m.session_log(id)?;
    let trace = score_session(&log, &gt).map_err(|e| ApiError::bad_request("EmptyLog", e))?;
    Ok(Json(trace).into_response())
}

async fn metrics_query(State(m): State<Shared>, Path(id): Path<String>, Query(q): Query<MetricsQuery>) -> ApiResult<Response> {
    metrics(&m, &id, &q.gt)
}

async fn metrics_body(State(m): State<Shared>, Path(id): Path<String>, body: String) -> ApiResult<Response> {
    metrics(&m, &id, &body)
}
