use std::net::SocketAddr;
use std::sync::Arc;
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::Deserialize;
use serde_json::{json, Value};
use tokio::sync::Semaphore;
use tripsolve::data::Database;
use tripsolve::encoder::{solve_query, EncodingParams, SolveLimits};
use tripsolve::query::{parse_query_value, Query};
use tripsolve::repair::{RepairConfig, RepairSession, SessionError, SessionState, Variant};
use tripsolve_nl::{translate, EndpointConfig};
use uuid::Uuid;

use crate::error::AppError;
use crate::provider::ProviderKind;
use crate::render;
use crate::store::{Entry, Job, JobStore, Lookup, SessionStore};

pub struct ServiceConfig {
    pub limits: SolveLimits,
    pub params: EncodingParams,
    pub repair: RepairConfig,
    pub provider: ProviderKind,
    pub endpoint: EndpointConfig,
    pub session_ttl: Duration,
    pub workers: usize,
    /// `POST /plan` answers 202 with a job id to poll.
    pub asynchronous: bool,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            limits: SolveLimits::default(),
            params: EncodingParams::default(),
            repair: RepairConfig::default(),
            provider: ProviderKind::Rules,
            endpoint: EndpointConfig::offline(),
            session_ttl: crate::store::DEFAULT_TTL,
            workers: 4,
            asynchronous: false,
        }
    }
}

struct Inner {
    db: Database,
    cfg: ServiceConfig,
    sessions: SessionStore,
    jobs: JobStore,
    workers: Arc<Semaphore>,
}

#[derive(Clone)]
pub struct AppState(Arc<Inner>);

impl AppState {
    pub fn new(db: Database, cfg: ServiceConfig) -> Self {
        let workers = Arc::new(Semaphore::new(cfg.workers.max(1)));
        let sessions = SessionStore::new(cfg.session_ttl);
        AppState(Arc::new(Inner { db, cfg, sessions, jobs: JobStore::default(), workers }))
    }

    pub fn sessions(&self) -> &SessionStore {
        &self.0.sessions
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    error: AppError,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError { status, error: AppError { code, message: message.into(), pointer: None, exit: 0 } }
    }

    fn bad_request(error: AppError) -> Self {
        ApiError { status: StatusCode::BAD_REQUEST, error }
    }
}

impl From<AppError> for ApiError {
    fn from(error: AppError) -> Self {
        let status = if error.exit == crate::error::exit::USAGE {
            StatusCode::BAD_REQUEST
        } else {
            StatusCode::INTERNAL_SERVER_ERROR
        };
        ApiError { status, error }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        json_response(self.status, &self.error.to_json())
    }
}

fn json_response(status: StatusCode, body: &Value) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], render::to_text(body)).into_response()
}

fn parse_body(bytes: &[u8]) -> Result<Value, ApiError> {
    serde_json::from_slice(bytes)
        .map_err(|e| ApiError::bad_request(AppError::usage("invalid-json", format!("request body is not JSON: {e}"))))
}

fn field<T: for<'de> Deserialize<'de>>(body: &Value, name: &str) -> Result<Option<T>, ApiError> {
    match body.get(name) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => T::deserialize(v).map(Some).map_err(|e| {
            ApiError::bad_request(AppError {
                pointer: Some(format!("/{name}")),
                ..AppError::usage("schema-violation", e.to_string())
            })
        }),
    }
}

fn query_of(body: &Value) -> Result<Query, ApiError> {
    let q = body.get("query").ok_or_else(|| {
        ApiError::bad_request(AppError {
            pointer: Some("/query".into()),
            ..AppError::usage("schema-violation", "missing field `query`")
        })
    })?;
    parse_query_value(q).map_err(|e| ApiError::bad_request(AppError::query(&e, "/query")))
}

impl AppState {
    /// Runs `work` on the blocking pool once a worker is free.
    async fn blocking<T, F>(&self, work: F) -> Result<T, ApiError>
    where
        T: Send + 'static,
        F: FnOnce(&Inner) -> T + Send + 'static,
    {
        let permit = Arc::clone(&self.0.workers).acquire_owned().await.map_err(|_| AppError::internal("worker pool closed"))?;
        let inner = Arc::clone(&self.0);
        let out = tokio::task::spawn_blocking(move || {
            let out = work(&inner);
            drop(permit);
            out
        })
        .await
        .map_err(|e| AppError::internal(format!("worker failed: {e}")))?;
        Ok(out)
    }
}

async fn healthz() -> &'static str {
    "ok"
}

fn plan_job(inner: &Inner, q: &Query, limits: &SolveLimits) -> (StatusCode, Value) {
    match solve_query(q, &inner.db, &inner.cfg.params, limits) {
        Ok(outcome) => (StatusCode::OK, render::plan_outcome(&outcome)),
        Err(e) => (StatusCode::INTERNAL_SERVER_ERROR, AppError::internal(e.to_string()).to_json()),
    }
}

async fn plan(State(state): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let body = parse_body(&body)?;
    let q = query_of(&body)?;
    let mut limits = state.0.cfg.limits.clone();
    if let Some(secs) = field::<f64>(&body, "time_limit")? {
        if !(secs > 0.0 && secs.is_finite()) {
            return Err(ApiError::bad_request(AppError {
                pointer: Some("/time_limit".into()),
                ..AppError::usage("schema-violation", "time_limit must be a positive number of seconds")
            }));
        }
        limits.total = Duration::from_secs_f64(secs);
        limits.per_tuple = limits.per_tuple.min(limits.total);
    }
    if let Some(optimal) = field::<bool>(&body, "optimal")? {
        limits.optimal = optimal;
    }
    if state.0.cfg.asynchronous {
        let id = state.0.jobs.start();
        let worker = state.clone();
        tokio::spawn(async move {
            let result = worker.blocking(move |inner| plan_job(inner, &q, &limits)).await;
            let (status, body) = match result {
                Ok(r) => r,
                Err(e) => (e.status, e.error.to_json()),
            };
            worker.0.jobs.finish(id, status.as_u16(), body);
        });
        return Ok(json_response(StatusCode::ACCEPTED, &json!({ "job": id, "status": "running" })));
    }
    let (status, body) = state.blocking(move |inner| plan_job(inner, &q, &limits)).await?;
    Ok(json_response(status, &body))
}

async fn plan_job_status(State(state): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let missing = || ApiError::new(StatusCode::NOT_FOUND, "job-not-found", format!("no plan job {id}"));
    let uuid = Uuid::parse_str(&id).map_err(|_| missing())?;
    match state.0.jobs.get(&uuid).ok_or_else(missing)? {
        Job::Running => Ok(json_response(StatusCode::ACCEPTED, &json!({ "job": uuid, "status": "running" }))),
        Job::Done { status, body } => {
            Ok(json_response(StatusCode::from_u16(status).unwrap_or(StatusCode::OK), &body))
        }
    }
}

/// Status for a session view: 422 when the session ended without a plan
/// other than by the user's choice.
fn view_status(state: SessionState) -> StatusCode {
    match state {
        SessionState::Exhausted | SessionState::Failed | SessionState::TimedOut => StatusCode::UNPROCESSABLE_ENTITY,
        _ => StatusCode::OK,
    }
}

/// The part of a session a client needs to answer the next suggestion.
pub fn session_view(id: Uuid, s: &RepairSession) -> Value {
    let t = s.transcript();
    let mut view = json!({
        "session_id": id,
        "state": t["state"],
        "iterations": s.iterations.len(),
        "query": t["current"],
        "reasons": t["reasons"],
        "suggestion": t["pending"].get(0).cloned().unwrap_or(Value::Null),
        "suggestions": t["pending"],
    });
    for key in ["note", "plan", "cost"] {
        if let Some(v) = t.get(key) {
            view[key] = v.clone();
        }
    }
    if let Some(last) = t["iterations"].as_array().and_then(|a| a.last()) {
        view["last"] = last.clone();
    }
    view
}

fn session_error(e: SessionError) -> ApiError {
    match e {
        SessionError::Finished(s) => {
            ApiError::new(StatusCode::CONFLICT, "session-finished", format!("session is already {}", s.as_str()))
        }
        SessionError::Modification(q) => ApiError::bad_request(AppError::query(&q, "/response/modification")),
        SessionError::Plan(p) => AppError::internal(p.to_string()).into(),
    }
}

async fn repair_start(State(state): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let body = parse_body(&body)?;
    let q = query_of(&body)?;
    let mut config = state.0.cfg.repair.clone();
    if let Some(v) = field::<Variant>(&body, "variant")? {
        config.variant = v;
    }
    if let Some(n) = field::<usize>(&body, "max_iterations")? {
        config.max_iterations = n;
    }
    let mut provider = state.0.cfg.provider.build(&state.0.cfg.endpoint).map_err(ApiError::from)?;
    let (session, provider) = state
        .blocking(move |inner| RepairSession::start(q, &inner.db, provider.as_mut(), config).map(|s| (s, provider)))
        .await?
        .map_err(session_error)?;
    let status = view_status(session.state);
    let (id, slot) = state.0.sessions.insert(Entry { session, provider });
    let entry = slot.entry.lock().expect("session lock");
    Ok(json_response(status, &session_view(id, &entry.session)))
}

fn lookup(state: &AppState, id: &str) -> Result<(Uuid, Arc<crate::store::Slot>), ApiError> {
    let not_found = || ApiError::new(StatusCode::NOT_FOUND, "session-not-found", format!("no repair session {id}"));
    let uuid = Uuid::parse_str(id).map_err(|_| not_found())?;
    match state.0.sessions.get(&uuid) {
        Ok(slot) => Ok((uuid, slot)),
        Err(Lookup::NotFound) => Err(not_found()),
        Err(Lookup::Expired) => {
            Err(ApiError::new(StatusCode::NOT_FOUND, "session-expired", format!("repair session {id} has expired")))
        }
    }
}

async fn repair_feedback(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let body = parse_body(&body)?;
    let response: tripsolve::repair::Response = field(&body, "response")?.ok_or_else(|| {
        ApiError::bad_request(AppError {
            pointer: Some("/response".into()),
            ..AppError::usage("schema-violation", "missing field `response`")
        })
    })?;
    let (uuid, slot) = lookup(&state, &id)?;
    let view = state
        .blocking(move |inner| {
            let mut entry = match slot.entry.try_lock() {
                Ok(e) => e,
                Err(std::sync::TryLockError::WouldBlock) => {
                    return Err(ApiError::new(
                        StatusCode::CONFLICT,
                        "feedback-in-progress",
                        "another response for this session is being processed",
                    ))
                }
                Err(std::sync::TryLockError::Poisoned(_)) => return Err(AppError::internal("session lock poisoned").into()),
            };
            let Entry { session, provider } = &mut *entry;
            session.respond(&inner.db, provider.as_mut(), response).map_err(session_error)?;
            Ok((view_status(session.state), session_view(uuid, session)))
        })
        .await??;
    Ok(json_response(view.0, &view.1))
}

async fn repair_transcript(State(state): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let (uuid, slot) = lookup(&state, &id)?;
    let entry = slot.entry.try_lock().map_err(|_| {
        ApiError::new(StatusCode::CONFLICT, "feedback-in-progress", "a response for this session is being processed")
    })?;
    let mut t = entry.session.transcript();
    t["session_id"] = json!(uuid);
    t["provider"] = json!(entry.provider.name());
    Ok(json_response(StatusCode::OK, &t))
}

async fn translate_text(State(state): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let body = parse_body(&body)?;
    let text: String = field(&body, "text")?.ok_or_else(|| {
        ApiError::bad_request(AppError {
            pointer: Some("/text".into()),
            ..AppError::usage("schema-violation", "missing field `text`")
        })
    })?;
    let result = state.blocking(move |inner| translate(&text, &inner.cfg.endpoint)).await?;
    match result {
        Ok(t) => {
            let status = if t.is_valid() { StatusCode::OK } else { StatusCode::UNPROCESSABLE_ENTITY };
            Ok(json_response(status, &serde_json::to_value(&t).expect("translations serialize")))
        }
        Err(e) => Err(ApiError::new(StatusCode::BAD_GATEWAY, "endpoint-error", e.to_string())),
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/healthz", get(healthz))
        .route("/plan", post(plan))
        .route("/plan/{job}", get(plan_job_status))
        .route("/repair", post(repair_start))
        .route("/repair/{id}", get(repair_transcript))
        .route("/repair/{id}/feedback", post(repair_feedback))
        .route("/translate", post(translate_text))
        .with_state(state)
}

pub async fn serve(state: AppState, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    let sweeper = state.clone();
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(Duration::from_secs(60));
        loop {
            tick.tick().await;
            sweeper.0.sessions.purge();
        }
    });
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
