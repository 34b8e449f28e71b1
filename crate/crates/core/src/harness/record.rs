use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::agent::Diagnostics;
use crate::error::{Error, Result};
use crate::game::{Action, ActionRecord, Player, TerminalReason};

/// Version of the hand-history line format.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionLog {
    pub player: Player,
    pub round: usize,
    pub action: Action,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Diagnostics>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Forfeit {
    pub player: Player,
    /// The rejected action, absent when the agent returned an error.
    pub action: Option<Action>,
    pub reason: String,
}

/// One played hand. Cards are written in two-character notation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HandRecord {
    pub schema: u32,
    pub hand_id: u64,
    pub pair: u64,
    /// 0 or 1 within the duplicate pair.
    pub play: u8,
    /// Agent labels by seat.
    pub seats: [String; 2],
    /// Seat of the match's first agent.
    pub a_seat: Player,
    pub private: [String; 2],
    pub board: String,
    pub actions: Vec<ActionRecord>,
    pub decisions: Vec<DecisionLog>,
    /// Chips won by the player in seat 1.
    pub result_p1: i64,
    pub reason: TerminalReason,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forfeit: Option<Forfeit>,
}

impl HandRecord {
    /// Chips won by the match's first agent.
    pub fn result_a(&self) -> i64 {
        match self.a_seat {
            Player::P1 => self.result_p1,
            Player::P2 => -self.result_p1,
        }
    }

    pub fn perception_trace(&self, player: Player, threshold: u32) -> PerceptionTrace {
        let entries = self
            .decisions
            .iter()
            .enumerate()
            .filter(|(_, d)| d.player == player)
            .filter_map(|(i, d)| {
                let g = d.diagnostics.as_ref()?;
                Some(PerceptionEntry {
                    decision: i,
                    true_pot: g.true_pot,
                    perceived_pot: g.perceived_pot,
                    divergence: g.divergence,
                    flagged: g.divergence > threshold,
                    translations: g.translations.len(),
                })
            })
            .collect();
        PerceptionTrace { player, entries }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerceptionEntry {
    /// Index into the hand's decisions.
    pub decision: usize,
    pub true_pot: u32,
    pub perceived_pot: Option<u32>,
    pub divergence: u32,
    pub flagged: bool,
    /// Translation events since the player's previous decision.
    pub translations: usize,
}

/// True against perceived pot at each of one player's decisions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerceptionTrace {
    pub player: Player,
    pub entries: Vec<PerceptionEntry>,
}

impl PerceptionTrace {
    pub fn max_divergence(&self) -> u32 {
        self.entries.iter().map(|e| e.divergence).max().unwrap_or(0)
    }
}

pub fn write_jsonl<W: Write>(mut w: W, records: &[HandRecord]) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_jsonl<R: BufRead>(r: R) -> Result<Vec<HandRecord>> {
    let mut out = Vec::new();
    for (n, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: HandRecord =
            serde_json::from_str(&line).map_err(|e| Error::Format(format!("line {}: {e}", n + 1)))?;
        if rec.schema != SCHEMA_VERSION {
            return Err(Error::Format(format!("line {}: schema {} not supported", n + 1, rec.schema)));
        }
        out.push(rec);
    }
    Ok(out)
}
