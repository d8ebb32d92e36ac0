//! HTTP JSON API.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use copaint_core::canvas::load_canvas;
use copaint_core::user_model::{load_profile_with_warnings, save_profile, Profile};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;
use tokio::sync::Mutex as SessionLock;

use crate::engine::{new_profile, DisclosureRequest, Engine, ServiceError};
use crate::session::{Feedback, Session, SessionEvent, SessionState, SessionSummary};
use crate::store::{ProfileStore, StoreError};

pub struct AppState {
    pub engine: Arc<Engine>,
    pub store: Arc<ProfileStore>,
    sessions: Mutex<HashMap<String, Arc<SessionLock<Session>>>>,
    next_id: AtomicU64,
}

impl AppState {
    pub fn new(engine: Arc<Engine>, store: Arc<ProfileStore>) -> Arc<Self> {
        Arc::new(Self {
            engine,
            store,
            sessions: Mutex::default(),
            next_id: AtomicU64::new(1),
        })
    }

    fn session(&self, id: &str) -> Result<Arc<SessionLock<Session>>, ApiError> {
        self.sessions
            .lock()
            .expect("session table")
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::SessionNotFound(id.to_string()).into())
    }
}

pub struct ApiError(ServiceError);

impl<E: Into<ServiceError>> From<E> for ApiError {
    fn from(e: E) -> Self {
        ApiError(e.into())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let message = self.0.to_string();
        let (status, body) = match self.0 {
            ServiceError::Transition(t) => (
                StatusCode::CONFLICT,
                json!({"kind": "InvalidTransition", "error": message, "state": t.state, "event": t.event}),
            ),
            ServiceError::Store(StoreError::NotFound(_)) | ServiceError::SessionNotFound(_) => {
                (StatusCode::NOT_FOUND, json!({"kind": "NotFound", "error": message}))
            }
            ServiceError::Store(StoreError::InvalidId(_)) | ServiceError::BadRequest(_) => {
                (StatusCode::BAD_REQUEST, json!({"kind": "BadRequest", "error": message}))
            }
            ServiceError::Store(_) => (StatusCode::INTERNAL_SERVER_ERROR, json!({"kind": "Storage", "error": message})),
            ServiceError::Pipeline { stage, rationale, .. } => (
                StatusCode::UNPROCESSABLE_ENTITY,
                json!({"kind": "Pipeline", "error": message, "stage": stage, "rationale": rationale}),
            ),
        };
        (status, Json(body)).into_response()
    }
}

fn parse_json<T: DeserializeOwned>(body: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ServiceError::BadRequest(format!("invalid JSON body: {e}")).into())
}

fn profile_response(profile: &Profile) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], save_profile(profile)).into_response()
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/healthz", get(|| async { "ok" }))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(show_session))
        .route("/sessions/{id}/canvas", put(upload_canvas))
        .route("/sessions/{id}/turn", post(end_turn))
        .route("/sessions/{id}/feedback", post(feedback))
        .route("/sessions/{id}/close", post(close_session))
        .route("/profiles/{id}", get(get_profile).put(put_profile))
        .route("/profiles/{id}/disclosure", post(disclose))
        .with_state(state)
}

pub async fn serve(state: Arc<AppState>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct CreateSession {
    profile_ids: Vec<String>,
}

async fn create_session(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Response, ApiError> {
    let req: CreateSession = parse_json(&body)?;
    if req.profile_ids.is_empty() {
        return Err(ServiceError::BadRequest("profileIds must name at least one profile".into()).into());
    }
    for id in &req.profile_ids {
        // unknown people start from the population profile
        state.store.update(id, |current| {
            Ok::<_, StoreError>(current.unwrap_or_else(|| new_profile(id)))
        })?;
    }
    let id = format!("s{}", state.next_id.fetch_add(1, Ordering::Relaxed));
    let session = Session::new(&id, req.profile_ids, state.engine.config.history_capacity);
    let summary = SessionSummary::from(&session);
    state
        .sessions
        .lock()
        .expect("session table")
        .insert(id, Arc::new(SessionLock::new(session)));
    Ok((StatusCode::CREATED, Json(summary)).into_response())
}

async fn show_session(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<SessionSummary>, ApiError> {
    let session = state.session(&id)?;
    let guard = session.lock().await;
    Ok(Json(SessionSummary::from(&*guard)))
}

/// Stores the human's canvas. Uploading while feedback is pending counts as
/// skipping the rating.
async fn upload_canvas(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<SessionSummary>, ApiError> {
    let session = state.session(&id)?;
    let mut guard = session.lock().await;
    match guard.state {
        SessionState::HumanTurn => {}
        SessionState::AwaitingFeedback => {
            guard.advance(SessionEvent::Skip)?;
        }
        _ => {
            guard.expect(SessionEvent::EndTurn)?;
        }
    }
    let raster = load_canvas(&body).map_err(|e| ServiceError::BadRequest(format!("invalid PNG: {e}")))?;
    guard.canvas = Some(raster);
    Ok(Json(SessionSummary::from(&*guard)))
}

#[derive(Deserialize, Default)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
struct TurnRequest {
    declared_symbols: Vec<String>,
}

/// Ends the human's turn and runs the robot's. A session left in
/// `RobotTurn` by a failed attempt runs the robot's turn again.
async fn end_turn(State(state): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> Result<Response, ApiError> {
    let req: TurnRequest = if body.iter().all(u8::is_ascii_whitespace) {
        TurnRequest::default()
    } else {
        parse_json(&body)?
    };
    let session = state.session(&id)?;
    let mut guard = session.lock_owned().await;
    if guard.state != SessionState::RobotTurn {
        guard.expect(SessionEvent::EndTurn)?;
        if guard.canvas.is_none() {
            return Err(ServiceError::BadRequest("upload a canvas before ending the turn".into()).into());
        }
        guard.advance(SessionEvent::EndTurn)?;
    }
    let profiles = guard
        .profile_ids
        .iter()
        .map(|p| state.store.require(p))
        .collect::<Result<Vec<_>, _>>()?;
    let engine = state.engine.clone();
    let response = tokio::task::spawn_blocking(move || {
        let mut guard = guard;
        engine.run_robot_turn(&mut guard, &profiles, &req.declared_symbols)
    })
    .await
    .map_err(|e| ServiceError::BadRequest(format!("robot turn aborted: {e}")))??;
    Ok(Json(response).into_response())
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct FeedbackRequest {
    sam_valence: u8,
    sam_arousal: u8,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct FeedbackResponse {
    feedback: Feedback,
    state: SessionState,
    profile_ids: Vec<String>,
}

async fn feedback(State(state): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> Result<Response, ApiError> {
    let req: FeedbackRequest = parse_json(&body)?;
    let fb = Feedback::from_sam(req.sam_valence, req.sam_arousal).map_err(|e| ServiceError::BadRequest(e.to_string()))?;
    let session = state.session(&id)?;
    let guard = session.lock_owned().await;
    let (engine, store) = (state.engine.clone(), state.store.clone());
    let response = tokio::task::spawn_blocking(move || {
        let mut guard = guard;
        engine.record_feedback(&mut guard, fb, &store).map(|_| FeedbackResponse {
            feedback: fb,
            state: guard.state,
            profile_ids: guard.profile_ids.clone(),
        })
    })
    .await
    .map_err(|e| ServiceError::BadRequest(format!("feedback aborted: {e}")))??;
    Ok(Json(response).into_response())
}

async fn close_session(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<SessionSummary>, ApiError> {
    let session = state.session(&id)?;
    let mut guard = session.lock().await;
    guard.advance(SessionEvent::Close)?;
    Ok(Json(SessionSummary::from(&*guard)))
}

async fn get_profile(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Response, ApiError> {
    Ok(profile_response(&state.store.require(&id)?))
}

async fn put_profile(State(state): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> Result<Response, ApiError> {
    let (profile, warnings) =
        load_profile_with_warnings(&body).map_err(|e| ServiceError::BadRequest(e.to_string()))?;
    for w in &warnings {
        log::warn!("profile {id}: {w}");
    }
    if profile.id != id {
        return Err(ServiceError::BadRequest(format!("profile id `{}` does not match the path `{id}`", profile.id)).into());
    }
    let saved = state.store.update(&id, |_| Ok::<_, StoreError>(profile))?;
    Ok(profile_response(&saved))
}

async fn disclose(State(state): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> Result<Response, ApiError> {
    let req: DisclosureRequest = parse_json(&body)?;
    let saved = state.store.update(&id, |current| {
        let profile = current.ok_or_else(|| StoreError::NotFound(id.clone()))?;
        Ok::<_, StoreError>(req.apply(&profile))
    })?;
    Ok(profile_response(&saved))
}
