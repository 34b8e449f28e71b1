//! Wire format. Every payload is JSON.
//!
//! Messages on the event stream look like
//!
//! ```json
//! {"seq": 7, "type": "action-request", "payload": {"hand": 0, "player": 1, "legal": {...}, "state": {...}}}
//! ```
//!
//! Sequence numbers start at 1 and increase by one per message within a
//! session. Errors answering a request are sent only to the requester and
//! carry the session's current sequence number without consuming one.
//!
//! Players are written as seat indices, `0` and `1`. Actions use the game's
//! encoding: `{"kind": "fold"}`, `{"kind": "check"}`, `{"kind": "call"}` or
//! `{"kind": "raise-to", "amount": 300}`, where the amount is the total the
//! actor will have put in during the current round.

use limp_core::game::{Action, ActionRecord, LegalActions, Player, TerminalReason};
use serde::{Deserialize, Serialize};

/// What a client submits.
pub type ActionDescriptor = Action;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolMessage {
    pub seq: u64,
    #[serde(flatten)]
    pub body: Body,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "payload", rename_all = "kebab-case")]
pub enum Body {
    State(StateView),
    ActionRequest(ActionRequest),
    Action(ActionEvent),
    HandResult(HandResultView),
    SessionSummary(SummaryView),
    Error(ErrorView),
}

impl Body {
    pub fn kind(&self) -> &'static str {
        match self {
            Body::State(_) => "state",
            Body::ActionRequest(_) => "action-request",
            Body::Action(_) => "action",
            Body::HandResult(_) => "hand-result",
            Body::SessionSummary(_) => "session-summary",
            Body::Error(_) => "error",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Viewer {
    Human,
    Observer,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HandStatus {
    InProgress,
    Complete,
    /// The session is over; no further hands.
    Closed,
}

/// Legal options. Raise bounds are raise-to totals for the round; the
/// maximum is all-in.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LegalView {
    pub fold: bool,
    pub check: bool,
    /// Chips added by calling.
    pub call: Option<u32>,
    pub raise_min: Option<u32>,
    pub raise_max: Option<u32>,
}

impl From<LegalActions> for LegalView {
    fn from(l: LegalActions) -> Self {
        LegalView {
            fold: l.fold,
            check: l.check,
            call: l.call,
            raise_min: l.raise.map(|r| r.0),
            raise_max: l.raise.map(|r| r.1),
        }
    }
}

/// The table as one viewer may see it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateView {
    pub hand: u64,
    pub pair: Option<String>,
    pub viewer: Viewer,
    /// Seat of the human, absent when two agents play.
    pub human_seat: Option<Player>,
    pub labels: [String; 2],
    pub status: HandStatus,
    pub round: usize,
    /// Chips in the middle, including this round's bets.
    pub pot: u32,
    pub stacks: [u32; 2],
    /// Chips each seat has put in this round.
    pub round_bets: [u32; 2],
    pub board: Vec<String>,
    /// Hole cards by seat; `null` where hidden from this viewer.
    pub hole_cards: [Option<String>; 2],
    pub history: Vec<ActionRecord>,
    pub to_act: Option<Player>,
    /// Present when the viewer is the one to act.
    pub legal: Option<LegalView>,
    pub result_p1: Option<i64>,
    pub blinds: [u32; 2],
    pub ante: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionRequest {
    pub hand: u64,
    pub player: Player,
    pub legal: LegalView,
    pub state: StateView,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionEvent {
    pub hand: u64,
    pub player: Player,
    pub action: Action,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HandResultView {
    pub hand: u64,
    pub result_p1: i64,
    pub reason: TerminalReason,
    pub forfeit: Option<Player>,
    pub hole_cards: [Option<String>; 2],
    pub board: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryView {
    pub hands: u64,
    /// Chips won by the human, or by the seat-1 agent of the first hand when
    /// two agents play.
    pub total: i64,
    pub bb_per_100: f64,
    pub forfeits: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorCode {
    UnknownSession,
    StaleSeq,
    NotYourTurn,
    IllegalAction,
    HandInProgress,
    SessionClosed,
    BadConfig,
    BadRequest,
    Internal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorView {
    pub code: ErrorCode,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub legal: Option<LegalView>,
    /// The current state, resent so the client can resynchronize.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateView>,
}

/// Body of an action submission, over HTTP or the event socket.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubmitRequest {
    /// Sequence number of the action request being answered.
    pub seq: u64,
    pub action: ActionDescriptor,
}

/// Reply to create, submit and next-hand requests: the messages the request
/// produced and the state afterwards.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reply {
    pub session: String,
    pub messages: Vec<ProtocolMessage>,
    pub state: StateView,
}
