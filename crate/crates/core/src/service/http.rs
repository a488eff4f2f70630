use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;

use super::{ApiError, ApiErrorKind, ResponseSubmission, StatusFilter, Store};
use crate::domain::{AlertId, PatientId};

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match self.kind {
            ApiErrorKind::Validation => StatusCode::UNPROCESSABLE_ENTITY,
            ApiErrorKind::NotFound => StatusCode::NOT_FOUND,
            ApiErrorKind::Conflict => StatusCode::CONFLICT,
            ApiErrorKind::InvalidMode | ApiErrorKind::BadRequest => StatusCode::BAD_REQUEST,
        };
        (status, Json(self)).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> Result<T, ApiError> {
    payload.map(|Json(v)| v).map_err(|e| ApiError::new(ApiErrorKind::BadRequest, e.body_text()))
}

fn parse_id<T: std::str::FromStr>(text: &str, what: &str) -> Result<T, ApiError> {
    text.parse().map_err(|_| ApiError::not_found(what, text))
}

/// The API routes over a shared store.
pub fn router(store: Arc<Store>) -> Router {
    Router::new()
        .route("/cohorts", post(create_cohort).get(list_cohorts))
        .route("/cohorts/{id}", get(get_cohort))
        .route("/cohorts/{id}/advance", post(advance))
        .route("/cohorts/{id}/alerts", get(list_alerts))
        .route("/cohorts/{id}/alerts/{aid}/response", post(submit_response))
        .route("/cohorts/{id}/patients", get(patients))
        .route("/cohorts/{id}/hcps", get(hcps))
        .route("/cohorts/{id}/patients/{pid}/timeline", get(timeline))
        .route("/cohorts/{id}/patients/{pid}/summary", get(summary))
        .route("/cohorts/{id}/stats", get(stats))
        .route("/cohorts/{id}/export", get(export))
        .fallback(|| async { ApiError::new(ApiErrorKind::NotFound, "no such route") })
        .with_state(store)
}

/// Binds `addr` and serves until the process ends. Binding errors are
/// returned before any request is accepted.
pub async fn serve(store: Arc<Store>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(store)).await
}

async fn create_cohort(
    State(store): State<Arc<Store>>,
    payload: Result<Json<serde_json::Value>, JsonRejection>,
) -> Result<(StatusCode, Json<super::CohortHandle>), ApiError> {
    let config = body(payload)?;
    let handle = tokio::task::spawn_blocking(move || store.create_cohort_json(config))
        .await
        .map_err(|e| ApiError::new(ApiErrorKind::BadRequest, e.to_string()))??;
    Ok((StatusCode::CREATED, Json(handle)))
}

async fn list_cohorts(State(store): State<Arc<Store>>) -> ApiResult<Vec<super::CohortHandle>> {
    let handles = store.cohort_ids().iter().filter_map(|id| store.handle(id).ok()).collect();
    Ok(Json(handles))
}

async fn get_cohort(State(store): State<Arc<Store>>, Path(id): Path<String>) -> ApiResult<super::CohortHandle> {
    store.handle(&id).map(Json)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AdvanceBody {
    days: u32,
}

async fn advance(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
    payload: Result<Json<AdvanceBody>, JsonRejection>,
) -> ApiResult<super::AdvanceReport> {
    let days = body(payload)?.days;
    tokio::task::spawn_blocking(move || store.advance(&id, days))
        .await
        .map_err(|e| ApiError::new(ApiErrorKind::BadRequest, e.to_string()))?
        .map(Json)
}

#[derive(Deserialize)]
struct AlertQuery {
    #[serde(default)]
    status: StatusFilter,
}

async fn list_alerts(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
    query: Result<Query<AlertQuery>, axum::extract::rejection::QueryRejection>,
) -> ApiResult<Vec<super::AlertView>> {
    let Query(query) = query.map_err(|e| ApiError::new(ApiErrorKind::BadRequest, e.body_text()))?;
    store.list_alerts(&id, query.status).map(Json)
}

async fn submit_response(
    State(store): State<Arc<Store>>,
    Path((id, aid)): Path<(String, String)>,
    payload: Result<Json<ResponseSubmission>, JsonRejection>,
) -> ApiResult<super::RecordedResponse> {
    let submission = body(payload)?;
    let alert_id: AlertId = parse_id(&aid, "alert")?;
    store.submit_response(&id, alert_id, submission).map(Json)
}

async fn patients(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
) -> ApiResult<Vec<crate::domain::PatientProfile>> {
    store.patients(&id).map(Json)
}

async fn hcps(State(store): State<Arc<Store>>, Path(id): Path<String>) -> ApiResult<Vec<crate::domain::HcpProfile>> {
    store.hcps(&id).map(Json)
}

async fn timeline(
    State(store): State<Arc<Store>>,
    Path((id, pid)): Path<(String, String)>,
) -> ApiResult<Vec<crate::domain::TimelineItem>> {
    let patient_id: PatientId = parse_id(&pid, "patient")?;
    store.timeline(&id, patient_id).map(Json)
}

async fn summary(
    State(store): State<Arc<Store>>,
    Path((id, pid)): Path<(String, String)>,
) -> ApiResult<crate::stats::PatientSummary> {
    let patient_id: PatientId = parse_id(&pid, "patient")?;
    store.summary(&id, patient_id).map(Json)
}

async fn stats(State(store): State<Arc<Store>>, Path(id): Path<String>) -> ApiResult<crate::stats::CohortStats> {
    store.stats(&id).map(Json)
}

async fn export(State(store): State<Arc<Store>>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let bundle = store.export(&id)?;
    let disposition = format!("attachment; filename=\"{id}.tar\"");
    Ok((
        [(header::CONTENT_TYPE, "application/x-tar".to_owned()), (header::CONTENT_DISPOSITION, disposition)],
        bundle.to_tar(),
    )
        .into_response())
}
