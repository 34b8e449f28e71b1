//! Rules engine for heads-up betting games.

mod betting;
mod chance;
mod infoset;
mod showdown;
mod spec;
mod state;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use betting::{ActionRecord, Betting, LegalActions, Phase};
pub use chance::{enumerate_chance, ChanceOutcome, Deal};
pub use infoset::{history_string, CardBucketing, InfoSetKey, RankBucketing};
pub use showdown::{evaluate_showdown, hand_strength, ShowdownResult};
pub use spec::{BettingRule, GameSpec, ShowdownRule};
pub(crate) use spec::stable_hash;
pub use state::{BettingState, TerminalOutcome, TerminalReason};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Player {
    P1,
    P2,
}

impl Player {
    pub const BOTH: [Player; 2] = [Player::P1, Player::P2];

    pub fn index(self) -> usize {
        match self {
            Player::P1 => 0,
            Player::P2 => 1,
        }
    }

    pub fn from_index(i: usize) -> Self {
        if i == 0 {
            Player::P1
        } else {
            Player::P2
        }
    }

    pub fn opponent(self) -> Self {
        match self {
            Player::P1 => Player::P2,
            Player::P2 => Player::P1,
        }
    }

    /// +1 for player 1, -1 for player 2; converts player-1 payoffs.
    pub fn sign(self) -> f64 {
        match self {
            Player::P1 => 1.0,
            Player::P2 => -1.0,
        }
    }
}

impl TryFrom<u8> for Player {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        match v {
            0 => Ok(Player::P1),
            1 => Ok(Player::P2),
            other => Err(format!("player index {other} out of range")),
        }
    }
}

impl From<Player> for u8 {
    fn from(p: Player) -> u8 {
        p.index() as u8
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::P1 => f.write_str("P1"),
            Player::P2 => f.write_str("P2"),
        }
    }
}

/// A concrete action. `RaiseTo` carries the total chips the actor will have
/// committed in the current round after the action (bets are raises from 0).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "amount")]
pub enum Action {
    Fold,
    Check,
    Call,
    RaiseTo(u32),
}

impl Action {
    /// Short token used inside infoset keys and logs.
    pub fn token(self) -> String {
        match self {
            Action::Fold => "f".into(),
            Action::Check => "k".into(),
            Action::Call => "c".into(),
            Action::RaiseTo(n) => format!("r{n}"),
        }
    }

    pub fn parse_token(token: &str) -> Option<Action> {
        match token {
            "f" => Some(Action::Fold),
            "k" => Some(Action::Check),
            "c" => Some(Action::Call),
            t => t.strip_prefix('r')?.parse().ok().map(Action::RaiseTo),
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Fold => f.write_str("fold"),
            Action::Check => f.write_str("check"),
            Action::Call => f.write_str("call"),
            Action::RaiseTo(n) => write!(f, "raise-to {n}"),
        }
    }
}
