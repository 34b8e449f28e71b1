mod common;

use std::time::Duration;

use futures_util::{SinkExt, StreamExt};
use limp_core::game::{Action, Player};
use limp_service::protocol::{Body, ErrorCode, ErrorView, ProtocolMessage, Reply, StateView, SubmitRequest};
use limp_service::{router, AppState, ServiceConfig};
use serde_json::json;
use tempfile::TempDir;
use tokio_tungstenite::tungstenite::Message;

struct Server {
    base: String,
    ws: String,
    http: reqwest::Client,
    _dir: TempDir,
}

async fn start() -> Server {
    let dir = common::strategy_dir();
    let config = ServiceConfig { strategy_dir: dir.path().to_path_buf(), log_dir: Some(dir.path().join("logs")), ..Default::default() };
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(async move { axum::serve(listener, router(AppState::new(config))).await.unwrap() });
    Server { base: format!("http://{addr}"), ws: format!("ws://{addr}"), http: reqwest::Client::new(), _dir: dir }
}

impl Server {
    async fn create(&self, body: serde_json::Value) -> Reply {
        let r = self.http.post(format!("{}/sessions", self.base)).json(&body).send().await.unwrap();
        assert_eq!(r.status(), 201);
        r.json().await.unwrap()
    }

    async fn submit(&self, id: &str, seq: u64, action: Action) -> reqwest::Response {
        self.http
            .post(format!("{}/sessions/{id}/actions", self.base))
            .json(&SubmitRequest { seq, action })
            .send()
            .await
            .unwrap()
    }

    async fn post(&self, id: &str, what: &str) -> Reply {
        let r = self.http.post(format!("{}/sessions/{id}/{what}", self.base)).send().await.unwrap();
        assert!(r.status().is_success(), "{}", r.status());
        r.json().await.unwrap()
    }

    async fn state(&self, id: &str) -> StateView {
        self.http.get(format!("{}/sessions/{id}/state", self.base)).send().await.unwrap().json().await.unwrap()
    }
}

fn awaiting(reply: &Reply) -> Option<u64> {
    match reply.messages.last().map(|m| &m.body) {
        Some(Body::ActionRequest(_)) => reply.messages.last().map(|m| m.seq),
        _ => None,
    }
}

async fn next_message<S>(socket: &mut S) -> Option<ProtocolMessage>
where
    S: StreamExt<Item = Result<Message, tokio_tungstenite::tungstenite::Error>> + Unpin,
{
    loop {
        match tokio::time::timeout(Duration::from_secs(10), socket.next()).await.expect("socket stalled")? {
            Ok(Message::Text(t)) => return Some(serde_json::from_str(&t).unwrap()),
            Ok(Message::Close(_)) | Err(_) => return None,
            Ok(_) => {}
        }
    }
}

#[tokio::test(flavor = "multi_thread")]
async fn create_and_play_over_http() {
    let server = start().await;
    let reply = server.create(json!({"agent": "cfr:river.bin", "human_seat": 0, "seed": 5})).await;
    let id = reply.session.clone();
    assert_eq!(reply.state.blinds, [50, 100]);
    assert_eq!(reply.state.stacks, [19_950, 19_900]);
    let seq = awaiting(&reply).unwrap();

    let stale = server.submit(&id, seq - 1, Action::Call).await;
    assert_eq!(stale.status(), 409);
    let err: ErrorView = stale.json().await.unwrap();
    assert_eq!(err.code, ErrorCode::StaleSeq);
    assert_eq!(err.state.unwrap(), server.state(&id).await);

    let low = server.submit(&id, seq, Action::RaiseTo(120)).await;
    assert_eq!(low.status(), 422);
    let err: ErrorView = low.json().await.unwrap();
    assert_eq!(err.code, ErrorCode::IllegalAction);
    assert_eq!(err.legal.unwrap().raise_min, Some(200));

    let folded = server.submit(&id, seq, Action::Fold).await;
    assert_eq!(folded.status(), 200);
    let folded: Reply = folded.json().await.unwrap();
    assert!(folded.messages.iter().any(|m| matches!(m.body, Body::HandResult(_))));
    assert_eq!(folded.state.result_p1, Some(-50));

    let late = server.submit(&id, folded.messages.last().unwrap().seq, Action::Check).await;
    assert_eq!(late.status(), 409);
    assert_eq!(late.json::<ErrorView>().await.unwrap().code, ErrorCode::NotYourTurn);

    let next = server.post(&id, "next").await;
    assert_eq!(next.state.hand, 1);
    let closed = server.post(&id, "close").await;
    assert!(matches!(closed.messages.last().unwrap().body, Body::SessionSummary(_)));
    let hands: Vec<serde_json::Value> =
        server.http.get(format!("{}/sessions/{id}/hands", server.base)).send().await.unwrap().json().await.unwrap();
    assert_eq!(hands.len(), 1);

    let missing = server.http.get(format!("{}/sessions/nope/state", server.base)).send().await.unwrap();
    assert_eq!(missing.status(), 404);
    let bad = server.http.post(format!("{}/sessions", server.base)).json(&json!({"agent": "cfr:gone.bin"})).send().await.unwrap();
    assert_eq!(bad.status(), 422);
    let err: ErrorView = bad.json().await.unwrap();
    assert_eq!(err.code, ErrorCode::BadConfig);
    assert!(err.message.contains("gone.bin"));
}

#[tokio::test(flavor = "multi_thread")]
async fn event_stream_resumes_and_fans_out() {
    let server = start().await;
    let reply = server.create(json!({"agent": "uniform", "human_seat": 1, "seed": 8})).await;
    let id = reply.session.clone();
    let url = |after: u64| format!("{}/sessions/{id}/events?after={after}", server.ws);

    let (mut a, _) = tokio_tungstenite::connect_async(url(0)).await.unwrap();
    let (mut b, _) = tokio_tungstenite::connect_async(url(0)).await.unwrap();

    let mut state = reply;
    for _ in 0..3 {
        while let Some(seq) = awaiting(&state) {
            let action = common::passive_or_min_raise(&state.state, false);
            state = server.submit(&id, seq, action).await.json().await.unwrap();
        }
        state = server.post(&id, "next").await;
    }
    let closed = server.post(&id, "close").await;
    let total = closed.messages.last().unwrap().seq;

    let mut seen = vec![];
    for socket in [&mut a, &mut b] {
        let mut out: Vec<ProtocolMessage> = vec![];
        while out.last().is_none_or(|m| m.seq < total) {
            out.push(next_message(socket).await.expect("stream ended early"));
        }
        seen.push(out);
    }
    assert_eq!(seen[0], seen[1]);
    assert_eq!(seen[0].iter().map(|m| m.seq).collect::<Vec<_>>(), (1..=total).collect::<Vec<_>>());
    let results = seen[0].iter().filter(|m| matches!(m.body, Body::HandResult(_))).count();
    assert_eq!(results, 3);

    let k = total / 2;
    let (mut late, _) = tokio_tungstenite::connect_async(url(k)).await.unwrap();
    let first = next_message(&mut late).await.unwrap();
    assert_eq!(first.seq, k + 1);
    assert_eq!(first, seen[0][k as usize]);
}

#[tokio::test(flavor = "multi_thread")]
async fn actions_over_the_socket() {
    let server = start().await;
    let reply = server.create(json!({"agent": "uniform", "human_seat": 0, "seed": 3})).await;
    let id = reply.session.clone();
    let seq = awaiting(&reply).unwrap();
    let (mut ws, _) = tokio_tungstenite::connect_async(format!("{}/sessions/{id}/events?after={seq}", server.ws)).await.unwrap();

    let send = |seq: u64, action: Action| Message::Text(serde_json::to_string(&SubmitRequest { seq, action }).unwrap().into());
    ws.send(send(seq + 5, Action::Call)).await.unwrap();
    let err = next_message(&mut ws).await.unwrap();
    assert_eq!(err.seq, seq);
    let Body::Error(e) = err.body else { panic!("{err:?}") };
    assert_eq!(e.code, ErrorCode::StaleSeq);

    ws.send(send(seq, Action::Fold)).await.unwrap();
    let m = next_message(&mut ws).await.unwrap();
    assert_eq!(m.seq, seq + 1);
    assert!(matches!(m.body, Body::Action(ref a) if a.player == Player::P1 && a.action == Action::Fold));
}

#[tokio::test(flavor = "multi_thread")]
async fn unknown_session_stream_errors_then_closes() {
    let server = start().await;
    let (mut ws, _) = tokio_tungstenite::connect_async(format!("{}/sessions/none/events", server.ws)).await.unwrap();
    let m = next_message(&mut ws).await.unwrap();
    let Body::Error(e) = m.body else { panic!("{m:?}") };
    assert_eq!(e.code, ErrorCode::UnknownSession);
    assert!(next_message(&mut ws).await.is_none());
}
