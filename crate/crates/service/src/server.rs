//! HTTP and WebSocket endpoints.
//!
//! | method | path | body | reply |
//! |---|---|---|---|
//! | POST | `/sessions` | `SessionConfig` | `Reply` |
//! | GET | `/sessions/{id}/state?viewer=human` | | `StateView` |
//! | POST | `/sessions/{id}/actions` | `SubmitRequest` | `Reply` |
//! | POST | `/sessions/{id}/next` | | `Reply` |
//! | POST | `/sessions/{id}/close` | | `Reply` |
//! | GET | `/sessions/{id}/hands` | | hand records |
//! | GET | `/sessions/{id}/events?after=k` | WebSocket | `ProtocolMessage`s with seq > k |
//!
//! Errors come back as `ErrorView` with a 4xx or 5xx status. On the event
//! socket a client may also send `SubmitRequest`s; errors for those are sent
//! on that socket only, as `{"seq": <current>, "type": "error", ...}`.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::Response;
use axum::routing::{get, post};
use axum::{Json, Router};
use limp_core::harness::HandRecord;
use serde::Deserialize;
use tokio::sync::broadcast::error::RecvError;

use crate::config::ServiceConfig;
use crate::error::ServiceError;
use crate::protocol::*;
use crate::session::{Session, SessionConfig};

type Shared = Arc<Mutex<Session>>;

pub struct AppState {
    config: ServiceConfig,
    sessions: RwLock<HashMap<String, Shared>>,
    counter: AtomicU64,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Arc<Self> {
        Arc::new(AppState { config, sessions: RwLock::new(HashMap::new()), counter: AtomicU64::new(0) })
    }

    fn get(&self, id: &str) -> Result<Shared, ServiceError> {
        self.sessions.read().expect("session map").get(id).cloned().ok_or_else(|| ServiceError::UnknownSession(id.into()))
    }

    fn new_id(&self) -> String {
        let n = self.counter.fetch_add(1, Ordering::Relaxed);
        format!("s{n}-{:08x}", rand::random::<u32>())
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/health", get(|| async { "ok" }))
        .route("/sessions", post(create))
        .route("/sessions/{id}/state", get(get_state))
        .route("/sessions/{id}/actions", post(submit))
        .route("/sessions/{id}/next", post(next_hand))
        .route("/sessions/{id}/close", post(close))
        .route("/sessions/{id}/hands", get(hands))
        .route("/sessions/{id}/events", get(events))
        .with_state(state)
}

/// Serves until the process is stopped.
pub async fn serve(config: ServiceConfig) -> Result<(), ServiceError> {
    let addr = config.addr()?;
    let listener = tokio::net::TcpListener::bind(addr).await.map_err(|e| ServiceError::Internal(e.to_string()))?;
    tracing::info!("listening on {}", listener.local_addr().map_err(|e| ServiceError::Internal(e.to_string()))?);
    axum::serve(listener, router(AppState::new(config))).await.map_err(|e| ServiceError::Internal(e.to_string()))
}

/// Runs `f` on the session off the async runtime; agent moves may solve an
/// endgame.
async fn with_session<T: Send + 'static>(
    session: Shared,
    f: impl FnOnce(&mut Session) -> Result<T, ServiceError> + Send + 'static,
) -> Result<T, ServiceError> {
    tokio::task::spawn_blocking(move || {
        let mut s = session.lock().map_err(|_| ServiceError::Internal("session lock poisoned".into()))?;
        f(&mut s)
    })
    .await
    .map_err(|e| ServiceError::Internal(e.to_string()))?
}

fn reply(s: &Session, messages: Vec<ProtocolMessage>) -> Reply {
    let viewer = if s.human_seat().is_some() { Viewer::Human } else { Viewer::Observer };
    Reply { session: s.id().to_string(), messages, state: s.view(viewer) }
}

async fn create(
    State(app): State<Arc<AppState>>,
    Json(config): Json<SessionConfig>,
) -> Result<(StatusCode, Json<Reply>), ServiceError> {
    let id = app.new_id();
    let dir = app.config.strategy_dir.clone();
    let logs = app.config.log_dir.clone();
    let session = tokio::task::spawn_blocking(move || Session::create(id, config, &dir, logs.as_deref()))
        .await
        .map_err(|e| ServiceError::Internal(e.to_string()))??;
    let r = reply(&session, session.log().to_vec());
    tracing::info!(session = %r.session, "created");
    app.sessions.write().expect("session map").insert(r.session.clone(), Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(r)))
}

#[derive(Deserialize)]
struct ViewerQuery {
    viewer: Option<Viewer>,
}

async fn get_state(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<ViewerQuery>,
) -> Result<Json<StateView>, ServiceError> {
    let session = app.get(&id)?;
    let s = session.lock().map_err(|_| ServiceError::Internal("session lock poisoned".into()))?;
    Ok(Json(s.view(q.viewer.unwrap_or(Viewer::Human))))
}

async fn submit(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Json(req): Json<SubmitRequest>,
) -> Result<Json<Reply>, ServiceError> {
    let session = app.get(&id)?;
    Ok(Json(
        with_session(session, move |s| {
            let m = s.submit(req.seq, req.action)?;
            Ok(reply(s, m))
        })
        .await?,
    ))
}

async fn next_hand(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<Reply>, ServiceError> {
    let session = app.get(&id)?;
    Ok(Json(
        with_session(session, |s| {
            let m = s.next_hand()?;
            Ok(reply(s, m))
        })
        .await?,
    ))
}

async fn close(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<Reply>, ServiceError> {
    let session = app.get(&id)?;
    Ok(Json(
        with_session(session, |s| {
            let m = s.close();
            Ok(reply(s, m))
        })
        .await?,
    ))
}

async fn hands(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<Vec<HandRecord>>, ServiceError> {
    let session = app.get(&id)?;
    let s = session.lock().map_err(|_| ServiceError::Internal("session lock poisoned".into()))?;
    Ok(Json(s.records()))
}

#[derive(Deserialize)]
struct EventsQuery {
    after: Option<u64>,
}

async fn events(
    ws: WebSocketUpgrade,
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<EventsQuery>,
) -> Response {
    let session = app.get(&id);
    ws.on_upgrade(move |socket| async move {
        match session {
            Ok(s) => stream(socket, s, q.after.unwrap_or(0)).await,
            Err(e) => {
                let mut socket = socket;
                let _ = send_direct(&mut socket, &ProtocolMessage { seq: 0, body: Body::Error(e.view()) }).await;
                let _ = socket.send(Message::Close(None)).await;
            }
        }
    })
}

async fn stream(mut socket: WebSocket, session: Shared, after: u64) {
    let (backlog, mut rx) = {
        let Ok(s) = session.lock() else { return };
        (s.messages_after(after), s.subscribe())
    };
    let mut last = after;
    for m in backlog {
        if send_direct(&mut socket, &m).await.is_err() {
            return;
        }
        last = m.seq;
    }
    loop {
        tokio::select! {
            got = rx.recv() => match got {
                Ok(m) => {
                    if m.seq > last {
                        if send_direct(&mut socket, &m).await.is_err() {
                            return;
                        }
                        last = m.seq;
                    }
                }
                Err(RecvError::Lagged(_)) => {
                    let missed = match session.lock() {
                        Ok(s) => s.messages_after(last),
                        Err(_) => return,
                    };
                    for m in missed {
                        if send_direct(&mut socket, &m).await.is_err() {
                            return;
                        }
                        last = m.seq;
                    }
                }
                Err(RecvError::Closed) => return,
            },
            incoming = socket.recv() => match incoming {
                Some(Ok(Message::Text(text))) => {
                    let outcome = match serde_json::from_str::<SubmitRequest>(&text) {
                        Ok(req) => with_session(session.clone(), move |s| s.submit(req.seq, req.action)).await.map(|_| ()),
                        Err(e) => Err(ServiceError::BadRequest(e.to_string())),
                    };
                    if let Err(e) = outcome {
                        let seq = session.lock().map(|s| s.seq()).unwrap_or(0);
                        if send_direct(&mut socket, &ProtocolMessage { seq, body: Body::Error(e.view()) }).await.is_err() {
                            return;
                        }
                    }
                }
                Some(Ok(Message::Close(_))) | None | Some(Err(_)) => return,
                Some(Ok(_)) => {}
            },
        }
    }
}

async fn send_direct(socket: &mut WebSocket, m: &ProtocolMessage) -> Result<(), axum::Error> {
    socket.send(Message::Text(serde_json::to_string(m).expect("message serializes").into())).await
}
