//! HTTP session API for stepping a scheduled day interval by interval.
//!
//! Each session owns a [`Simulation`] in scheduled mode. Mutations on one
//! session are serialized by its mutex; different sessions run in parallel.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use hems_core::io::{parse_live_request, parse_scenario, report_json};
use hems_core::{Error, FieldIssue, Mode, Simulation, SubmitError};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Default)]
struct Store {
    next_id: AtomicU64,
    sessions: RwLock<HashMap<String, Arc<Mutex<Simulation>>>>,
}

impl Store {
    fn insert(&self, sim: Simulation) -> String {
        let n = self.next_id.fetch_add(1, Ordering::Relaxed) + 1;
        let id = format!("s{n:06}");
        self.sessions
            .write()
            .expect("store lock")
            .insert(id.clone(), Arc::new(Mutex::new(sim)));
        id
    }

    fn get(&self, id: &str) -> Result<Arc<Mutex<Simulation>>, ApiError> {
        self.sessions
            .read()
            .expect("store lock")
            .get(id)
            .cloned()
            .ok_or(ApiError::NotFound(id.to_string()))
    }
}

/// Shared state for the router; cheap to clone.
#[derive(Clone, Default)]
pub struct AppState(Arc<Store>);

impl AppState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a session for an already-parsed scenario and returns its id.
    pub fn create_session(&self, scenario: hems_core::Scenario) -> hems_core::Result<String> {
        Ok(self.0.insert(Simulation::new(scenario, Mode::Scheduled)?))
    }
}

#[derive(Debug)]
enum ApiError {
    BadJson(String),
    Invalid(Vec<FieldIssue>),
    NotFound(String),
    Conflict(String),
    Rejected(SubmitError),
    Internal(String),
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        match e {
            Error::Validation(issues) => ApiError::Invalid(issues),
            Error::Json(e) => ApiError::BadJson(e.to_string()),
            other => ApiError::Internal(other.to_string()),
        }
    }
}

fn rejection_kind(e: &SubmitError) -> &'static str {
    match e {
        SubmitError::Finished => "finished",
        SubmitError::InThePast { .. } => "in_the_past",
        SubmitError::Late { .. } => "late",
        SubmitError::UnknownAppliance(_) => "unknown_appliance",
        SubmitError::Invalid(_) => "invalid",
        SubmitError::Overlap(_) => "overlap",
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, body) = match self {
            ApiError::BadJson(m) => (
                StatusCode::BAD_REQUEST,
                json!({"error": "malformed_json", "message": m}),
            ),
            ApiError::Invalid(issues) => (
                StatusCode::UNPROCESSABLE_ENTITY,
                json!({"error": "validation", "issues": issues}),
            ),
            ApiError::NotFound(id) => (
                StatusCode::NOT_FOUND,
                json!({"error": "not_found", "message": format!("no session `{id}`")}),
            ),
            ApiError::Conflict(m) => (
                StatusCode::CONFLICT,
                json!({"error": "invalid_state", "message": m}),
            ),
            ApiError::Rejected(e) => (
                StatusCode::UNPROCESSABLE_ENTITY,
                json!({"accepted": false, "kind": rejection_kind(&e), "reason": e.to_string()}),
            ),
            ApiError::Internal(m) => (
                StatusCode::INTERNAL_SERVER_ERROR,
                json!({"error": "internal", "message": m}),
            ),
        };
        (status, Json(body)).into_response()
    }
}

#[derive(Serialize)]
struct ApplianceTimeline<'a> {
    name: &'a str,
    category: hems_core::LoadCategory,
    rating_kw: f64,
    on: Vec<bool>,
    forced: Vec<bool>,
}

#[derive(Serialize)]
struct IntervalRow {
    k: u16,
    time: String,
    total_kw: f64,
    pil_kw: f64,
    pil_eff_kw: f64,
    price: f64,
    cost: f64,
    penalty: f64,
    room_c: Option<f64>,
}

/// Full state of a session after the last processed interval.
fn snapshot(id: &str, sim: &Simulation) -> Value {
    let rows = sim.rows();
    let appliances: Vec<ApplianceTimeline> = sim
        .scenario()
        .appliances
        .iter()
        .enumerate()
        .map(|(i, a)| ApplianceTimeline {
            name: &a.name,
            category: a.category,
            rating_kw: a.rating_kw,
            on: rows.iter().map(|r| r.on[i]).collect(),
            forced: rows.iter().map(|r| r.forced[i]).collect(),
        })
        .collect();
    let intervals: Vec<IntervalRow> = rows
        .iter()
        .map(|r| IntervalRow {
            k: r.k.get(),
            time: r.k.start_time().to_string(),
            total_kw: r.total_kw,
            pil_kw: r.pil_kw,
            pil_eff_kw: r.pil_eff_kw,
            price: r.price,
            cost: r.bill.total(),
            penalty: r.bill.penalty_cost,
            room_c: r.room_c,
        })
        .collect();
    json!({
        "id": id,
        "scenario": sim.scenario().name,
        "currency_label": sim.scenario().currency_label,
        "status": if sim.is_finished() { "finished" } else { "active" },
        "current_k": sim.current_k(),
        "room_c": sim.room_c(),
        "appliances": appliances,
        "intervals": intervals,
        "bill": sim.running_bill(),
        "requests": sim.request_views(),
    })
}

fn lock(session: &Mutex<Simulation>) -> std::sync::MutexGuard<'_, Simulation> {
    session
        .lock()
        .unwrap_or_else(|poisoned| poisoned.into_inner())
}

async fn create(
    State(state): State<AppState>,
    body: String,
) -> Result<(StatusCode, Json<Value>), ApiError> {
    let scenario = parse_scenario(&body)?;
    let id = state.create_session(scenario)?;
    let session = state.0.get(&id)?;
    let snap = snapshot(&id, &lock(&session));
    Ok((StatusCode::CREATED, Json(json!({"id": id, "state": snap}))))
}

async fn show(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<Value>, ApiError> {
    let session = state.0.get(&id)?;
    let snap = snapshot(&id, &lock(&session));
    Ok(Json(snap))
}

async fn submit(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: String,
) -> Result<Json<Value>, ApiError> {
    let session = state.0.get(&id)?;
    let req = parse_live_request(&body)?;
    let mut sim = lock(&session);
    let at_k = sim.current_k() + 1;
    sim.submit_request(
        &req.appliance,
        req.start,
        req.deadline,
        req.run_minutes,
        at_k,
    )
    .map_err(ApiError::Rejected)?;
    Ok(Json(
        json!({"accepted": true, "at_k": at_k, "state": snapshot(&id, &sim)}),
    ))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AdvanceBody {
    to_k: u16,
}

async fn advance(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: String,
) -> Result<Json<Value>, ApiError> {
    let session = state.0.get(&id)?;
    let AdvanceBody { to_k } = serde_json::from_str(&body).map_err(|e| {
        if e.is_data() {
            ApiError::Invalid(vec![FieldIssue {
                path: "to_k".into(),
                message: e.to_string(),
            }])
        } else {
            ApiError::BadJson(e.to_string())
        }
    })?;
    let mut sim = lock(&session);
    if sim.is_finished() {
        return Err(ApiError::Conflict("the day is already finished".into()));
    }
    // advance_to only rejects before touching any interval, so a failed call leaves no partial state
    sim.advance_to(to_k)
        .map_err(|e| ApiError::Conflict(e.to_string()))?;
    Ok(Json(snapshot(&id, &sim)))
}

async fn export(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Response, ApiError> {
    let session = state.0.get(&id)?;
    let sim = lock(&session);
    if !sim.is_finished() {
        return Err(ApiError::Conflict(format!(
            "day not finished: processed {} of 288 intervals",
            sim.current_k()
        )));
    }
    let day = sim.result()?;
    Ok((
        [(header::CONTENT_TYPE, "application/json")],
        report_json(&day, None),
    )
        .into_response())
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(show))
        .route("/sessions/{id}/requests", post(submit))
        .route("/sessions/{id}/advance", post(advance))
        .route("/sessions/{id}/export", get(export))
        .with_state(state)
}

/// Serves the API on `addr` until the process stops.
pub async fn serve(state: AppState, addr: std::net::SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(state)).await
}
