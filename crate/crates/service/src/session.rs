use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use limp_core::cards::{format_cards, Card};
use limp_core::game::{BettingState, Deal, GameSpec, Phase, Player, TerminalReason};
use limp_core::harness::{
    bb_per_100, big_blind_unit, derive_rng, load_strategy, write_jsonl, Agent, AgentSpec, DecisionLog, Forfeit,
    HandRecord, Observation, StrategyAgent, SCHEMA_VERSION,
};
use serde::{Deserialize, Serialize};
use tokio::sync::broadcast;

use crate::error::ServiceError;
use crate::protocol::*;

const STREAM_CAPACITY: usize = 1024;

/// Links two sessions that play the same cards with seats reversed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairLink {
    pub id: String,
    /// 0 or 1. Play 1 puts the human in the other seat.
    pub play: u8,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionConfig {
    /// Agent name as accepted by the match command, e.g. `cfr:river.bin`.
    /// Strategy paths are relative to the strategy directory.
    pub agent: String,
    /// A second agent instead of a human; the session is then observed.
    #[serde(default)]
    pub opponent: Option<String>,
    /// Game preset for agents that do not carry their own game.
    #[serde(default)]
    pub game: Option<String>,
    #[serde(default = "default_seat")]
    pub human_seat: Player,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Re-solve the final round when the strategy config allows it.
    #[serde(default = "default_true")]
    pub endgame: bool,
    #[serde(default)]
    pub pair: Option<PairLink>,
    /// Number of hands; unlimited when absent.
    #[serde(default)]
    pub hands: Option<u64>,
}

fn default_seat() -> Player {
    Player::P2
}

fn default_true() -> bool {
    true
}

impl SessionConfig {
    pub fn against(agent: &str) -> Self {
        SessionConfig {
            agent: agent.into(),
            opponent: None,
            game: None,
            human_seat: default_seat(),
            seed: None,
            endgame: true,
            pair: None,
            hands: None,
        }
    }
}

enum Seat {
    Human,
    Agent(Box<dyn Agent>),
}

struct LiveHand {
    deal: Deal,
    state: BettingState,
    decisions: Vec<DecisionLog>,
    forfeit: Option<Forfeit>,
    record: Option<HandRecord>,
}

/// One table: the server-authoritative state, the agent(s), and the ordered
/// message log. Not thread-safe by itself; the server serializes access.
pub struct Session {
    id: String,
    spec: Arc<GameSpec>,
    config: SessionConfig,
    seed: u64,
    /// Occupants by seat.
    occupants: [Seat; 2],
    labels: [String; 2],
    hand_no: u64,
    hand: LiveHand,
    awaiting: Option<u64>,
    closed: bool,
    seq: u64,
    log: Vec<ProtocolMessage>,
    records: Vec<HandRecord>,
    tx: broadcast::Sender<ProtocolMessage>,
    log_path: Option<PathBuf>,
}

type LoadedAgent = (Box<dyn Agent>, Option<Arc<GameSpec>>);

fn load_agent(name: &str, dir: &Path, endgame: bool) -> Result<LoadedAgent, ServiceError> {
    let spec = AgentSpec::from_str(name).map_err(|e| ServiceError::BadConfig(e.to_string()))?.relative_to(dir);
    match &spec {
        AgentSpec::Strategy { table, config } => {
            let cfg = load_strategy(table, config, endgame).map_err(|e| ServiceError::BadConfig(e.to_string()))?;
            let game = cfg.abstraction.spec.clone();
            Ok((Box::new(StrategyAgent::new(Arc::new(cfg))), Some(game)))
        }
        other => Ok((other.load(endgame).map_err(|e| ServiceError::BadConfig(e.to_string()))?, None)),
    }
}

fn cards(cs: &[Card]) -> Vec<String> {
    cs.iter().map(|c| format_cards(std::slice::from_ref(c))).collect()
}

impl Session {
    /// Loads the agents, deals the first hand and plays until the human must
    /// act.
    pub fn create(
        id: String,
        config: SessionConfig,
        strategy_dir: &Path,
        log_dir: Option<&Path>,
    ) -> Result<Session, ServiceError> {
        let (agent, agent_game) = load_agent(&config.agent, strategy_dir, config.endgame)?;
        let (other, other_game) = match &config.opponent {
            Some(name) => {
                let (a, g) = load_agent(name, strategy_dir, config.endgame)?;
                (Seat::Agent(a), g)
            }
            None => (Seat::Human, None),
        };
        let preset = match &config.game {
            Some(name) => Some(Arc::new(GameSpec::preset(name).map_err(|e| ServiceError::BadConfig(e.to_string()))?)),
            None => None,
        };
        let mut games = [agent_game, other_game, preset].into_iter().flatten();
        let spec = games.next().unwrap_or_else(|| Arc::new(GameSpec::river_nlhe()));
        if let Some(g) = games.find(|g| g.hash() != spec.hash()) {
            return Err(ServiceError::BadConfig(format!("agents and game disagree: {} vs {}", spec.name, g.name)));
        }
        if let Some(p) = &config.pair {
            if p.play > 1 {
                return Err(ServiceError::BadConfig("pair.play must be 0 or 1".into()));
            }
        }
        let mut human_seat = config.human_seat;
        if config.pair.as_ref().is_some_and(|p| p.play == 1) {
            human_seat = human_seat.opponent();
        }
        let agent_label = agent.label();
        let other_label = match &other {
            Seat::Human => "human".to_string(),
            Seat::Agent(a) => a.label(),
        };
        // the agent sits opposite the human, or in seat 1 when two agents play
        let (occupants, labels) = match (&other, human_seat) {
            (Seat::Human, Player::P1) => ([other, Seat::Agent(agent)], [other_label, agent_label]),
            _ => ([Seat::Agent(agent), other], [agent_label, other_label]),
        };
        let seed = config.seed.unwrap_or_else(rand::random);
        let log_path = log_dir.map(|d| d.join(format!("{id}.jsonl")));
        if let Some(dir) = log_dir {
            std::fs::create_dir_all(dir).map_err(|e| ServiceError::Internal(e.to_string()))?;
            let meta = serde_json::json!({ "session": id, "seed": seed, "config": config });
            std::fs::write(dir.join(format!("{id}.session.json")), meta.to_string())
                .map_err(|e| ServiceError::Internal(e.to_string()))?;
        }
        let (tx, _) = broadcast::channel(STREAM_CAPACITY);
        let hand = Self::deal(&spec, seed, 0)?;
        let mut s = Session {
            id,
            spec,
            config,
            seed,
            occupants,
            labels,
            hand_no: 0,
            hand,
            awaiting: None,
            closed: false,
            seq: 0,
            log: Vec::new(),
            records: Vec::new(),
            tx,
            log_path,
        };
        s.begin_hand()?;
        Ok(s)
    }

    fn deal(spec: &Arc<GameSpec>, seed: u64, hand_no: u64) -> Result<LiveHand, ServiceError> {
        let deal = Deal::random(spec, &mut derive_rng(seed, "deal", &[hand_no]));
        let state = BettingState::new(spec.clone(), deal.private.clone()).map_err(internal)?;
        Ok(LiveHand { deal, state, decisions: Vec::new(), forfeit: None, record: None })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn spec(&self) -> &GameSpec {
        &self.spec
    }

    pub fn seq(&self) -> u64 {
        self.seq
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn human_seat(&self) -> Option<Player> {
        Player::BOTH.into_iter().find(|p| matches!(self.occupants[p.index()], Seat::Human))
    }

    fn primary_viewer(&self) -> Viewer {
        if self.human_seat().is_some() {
            Viewer::Human
        } else {
            Viewer::Observer
        }
    }

    pub fn subscribe(&self) -> broadcast::Receiver<ProtocolMessage> {
        self.tx.subscribe()
    }

    /// Messages with sequence number above `after`, in order.
    pub fn messages_after(&self, after: u64) -> Vec<ProtocolMessage> {
        self.log.iter().filter(|m| m.seq > after).cloned().collect()
    }

    pub fn log(&self) -> &[ProtocolMessage] {
        &self.log
    }

    /// Completed hands. Agent diagnostics are withheld until the session is
    /// closed.
    pub fn records(&self) -> Vec<HandRecord> {
        let mut out = self.records.clone();
        if !self.closed {
            for r in &mut out {
                for d in &mut r.decisions {
                    d.diagnostics = None;
                }
            }
        }
        out
    }

    fn emit(&mut self, body: Body) -> ProtocolMessage {
        self.seq += 1;
        let m = ProtocolMessage { seq: self.seq, body };
        self.log.push(m.clone());
        let _ = self.tx.send(m.clone());
        m
    }

    fn showdown_reached(&self) -> bool {
        self.hand.record.is_some()
            && self.hand.forfeit.is_none()
            && self.hand.state.outcome().is_some_and(|o| o.reason == TerminalReason::Showdown)
    }

    fn hole_cards(&self, viewer: Viewer) -> [Option<String>; 2] {
        let reveal_all = self.showdown_reached();
        Player::BOTH.map(|p| {
            let own = viewer == Viewer::Human && self.human_seat() == Some(p);
            (own || reveal_all).then(|| format_cards(&self.hand.deal.private[p.index()]))
        })
    }

    pub fn view(&self, viewer: Viewer) -> StateView {
        let b = self.hand.state.betting();
        let status = if self.closed {
            HandStatus::Closed
        } else if self.hand.record.is_some() {
            HandStatus::Complete
        } else {
            HandStatus::InProgress
        };
        let to_act = if self.hand.record.is_some() { None } else { self.hand.state.to_act() };
        let legal = match (viewer, to_act) {
            (Viewer::Human, Some(p)) if Some(p) == self.human_seat() => Some(self.hand.state.legal_actions().into()),
            _ => None,
        };
        StateView {
            hand: self.hand_no,
            pair: self.config.pair.as_ref().map(|p| p.id.clone()),
            viewer,
            human_seat: self.human_seat(),
            labels: self.labels.clone(),
            status,
            round: self.hand.state.round(),
            pot: b.total_pot(),
            stacks: Player::BOTH.map(|p| b.stack(p)),
            round_bets: Player::BOTH.map(|p| b.round_commit(p)),
            board: cards(self.hand.state.board()),
            hole_cards: self.hole_cards(viewer),
            history: b.history().to_vec(),
            to_act,
            legal,
            result_p1: self.hand.record.as_ref().map(|r| r.result_p1),
            blinds: [self.spec.small_blind, self.spec.big_blind],
            ante: self.spec.ante,
        }
    }

    fn begin_hand(&mut self) -> Result<(), ServiceError> {
        for p in Player::BOTH {
            if let Seat::Agent(a) = &mut self.occupants[p.index()] {
                a.begin_hand(p, derive_rng(self.seed, "agent", &[self.hand_no, p.index() as u64]));
            }
        }
        self.emit(Body::State(self.view(self.primary_viewer())));
        self.advance()
    }

    /// Plays agent turns and deals until the human must act or the hand ends.
    fn advance(&mut self) -> Result<(), ServiceError> {
        loop {
            let state = self.hand.state.clone();
            match state.phase() {
                Phase::Deal(round) => {
                    let cards = self.hand.deal.round_cards(&self.spec, round).to_vec();
                    self.hand.state = state.deal_board(&cards).map_err(internal)?;
                    self.emit(Body::State(self.view(self.primary_viewer())));
                }
                Phase::Act(p) => {
                    let Seat::Agent(agent) = &mut self.occupants[p.index()] else {
                        let legal: LegalView = state.legal_actions().into();
                        let view = self.view(Viewer::Human);
                        let m = self.emit(Body::ActionRequest(ActionRequest {
                            hand: self.hand_no,
                            player: p,
                            legal,
                            state: view,
                        }));
                        self.awaiting = Some(m.seq);
                        return Ok(());
                    };
                    let obs = Observation { seat: p, private: state.private(p), board: state.board(), betting: state.betting() };
                    let round = state.round();
                    match agent.act(&obs) {
                        Ok(d) => {
                            let action = d.action;
                            self.hand.decisions.push(DecisionLog { player: p, round, action, diagnostics: d.diagnostics });
                            match state.apply_action(action) {
                                Ok(next) => {
                                    self.hand.state = next;
                                    self.emit(Body::Action(ActionEvent { hand: self.hand_no, player: p, action }));
                                }
                                Err(e) => {
                                    self.hand.forfeit = Some(Forfeit { player: p, action: Some(action), reason: e.to_string() });
                                    return self.finish_hand();
                                }
                            }
                        }
                        Err(e) => {
                            self.hand.forfeit = Some(Forfeit { player: p, action: None, reason: e.to_string() });
                            return self.finish_hand();
                        }
                    }
                }
                Phase::Showdown | Phase::Folded(_) => return self.finish_hand(),
            }
        }
    }

    fn finish_hand(&mut self) -> Result<(), ServiceError> {
        self.awaiting = None;
        let h = &self.hand;
        let (result_p1, reason) = match &h.forfeit {
            Some(f) => {
                let lost = h.state.betting().total_commit(f.player) as i64;
                (if f.player == Player::P1 { -lost } else { lost }, TerminalReason::Fold)
            }
            None => {
                let o = h.state.outcome().ok_or_else(|| internal("hand ended without an outcome"))?;
                (o.payoff_p1, o.reason)
            }
        };
        let record = HandRecord {
            schema: SCHEMA_VERSION,
            hand_id: self.hand_no,
            pair: self.hand_no,
            play: self.config.pair.as_ref().map_or(0, |p| p.play),
            seats: self.labels.clone(),
            a_seat: self.human_seat().unwrap_or(Player::P1),
            private: [format_cards(&h.deal.private[0]), format_cards(&h.deal.private[1])],
            board: format_cards(&h.deal.board),
            actions: h.state.betting().history().to_vec(),
            decisions: h.decisions.clone(),
            result_p1,
            reason,
            forfeit: h.forfeit.clone(),
        };
        if let Some(path) = &self.log_path {
            let mut f = OpenOptions::new().create(true).append(true).open(path).map_err(internal)?;
            write_jsonl(&mut f, std::slice::from_ref(&record)).map_err(internal)?;
            f.flush().map_err(internal)?;
        }
        self.hand.record = Some(record.clone());
        self.records.push(record);
        let viewer = self.primary_viewer();
        let view = HandResultView {
            hand: self.hand_no,
            result_p1,
            reason,
            forfeit: self.hand.forfeit.as_ref().map(|f| f.player),
            hole_cards: self.hole_cards(viewer),
            board: cards(&self.hand.deal.board[..self.hand.state.board().len()]),
        };
        self.emit(Body::HandResult(view));
        if self.config.hands.is_some_and(|n| self.hand_no + 1 >= n) {
            self.close();
        }
        Ok(())
    }

    /// Applies the human's action, answering the action request numbered
    /// `seq`, then lets the agent play on. Returns the messages produced.
    pub fn submit(&mut self, seq: u64, action: ActionDescriptor) -> Result<Vec<ProtocolMessage>, ServiceError> {
        if self.closed {
            return Err(ServiceError::SessionClosed);
        }
        let Some(expected) = self.awaiting else {
            return Err(ServiceError::NotYourTurn(Box::new(self.view(self.primary_viewer()))));
        };
        if seq != expected {
            return Err(ServiceError::StaleSeq { expected, got: seq, state: Box::new(self.view(Viewer::Human)) });
        }
        let p = self.hand.state.to_act().ok_or_else(|| internal("awaiting an action in a terminal state"))?;
        let next = self.hand.state.apply_action(action).map_err(|e| ServiceError::IllegalAction {
            message: e.to_string(),
            legal: self.hand.state.legal_actions().into(),
        })?;
        let start = self.seq;
        self.awaiting = None;
        let round = self.hand.state.round();
        self.hand.decisions.push(DecisionLog { player: p, round, action, diagnostics: None });
        self.hand.state = next;
        self.emit(Body::Action(ActionEvent { hand: self.hand_no, player: p, action }));
        self.advance()?;
        Ok(self.messages_after(start))
    }

    /// Deals the next hand once the current one is over.
    pub fn next_hand(&mut self) -> Result<Vec<ProtocolMessage>, ServiceError> {
        if self.closed {
            return Err(ServiceError::SessionClosed);
        }
        if self.hand.record.is_none() {
            return Err(ServiceError::HandInProgress);
        }
        let start = self.seq;
        self.hand_no += 1;
        self.hand = Self::deal(&self.spec, self.seed, self.hand_no)?;
        self.begin_hand()?;
        Ok(self.messages_after(start))
    }

    /// Ends the session with a summary. A hand in progress is abandoned and
    /// not recorded.
    pub fn close(&mut self) -> Vec<ProtocolMessage> {
        if self.closed {
            return Vec::new();
        }
        let start = self.seq;
        self.closed = true;
        self.awaiting = None;
        let seat = self.human_seat().unwrap_or(Player::P1);
        let total: i64 = self
            .records
            .iter()
            .map(|r| if seat == Player::P1 { r.result_p1 } else { -r.result_p1 })
            .sum();
        let hands = self.records.len() as u64;
        let summary = SummaryView {
            hands,
            total,
            bb_per_100: if hands == 0 { 0.0 } else { bb_per_100(total, hands, big_blind_unit(&self.spec)).unwrap_or(0.0) },
            forfeits: self.records.iter().filter(|r| r.forfeit.is_some()).count(),
        };
        self.emit(Body::SessionSummary(summary));
        self.messages_after(start)
    }

    /// Sequence number of the pending action request, if any.
    pub fn awaiting(&self) -> Option<u64> {
        self.awaiting
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

fn internal(e: impl ToString) -> ServiceError {
    ServiceError::Internal(e.to_string())
}
