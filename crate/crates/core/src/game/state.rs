use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{hand_strength, Action, Betting, GameSpec, LegalActions, Phase, Player};
use crate::cards::{check_disjoint, Card, CardSet};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TerminalReason {
    Fold,
    Showdown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TerminalOutcome {
    /// Chips won by player 1; player 2 receives the negation.
    pub payoff_p1: i64,
    pub reason: TerminalReason,
}

/// Betting plus the cards actually dealt. Values are never mutated in place by
/// the public API: `apply_action` and `deal_board` return successors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BettingState {
    betting: Betting,
    private: [Vec<Card>; 2],
    board: Vec<Card>,
}

impl BettingState {
    pub fn new(spec: Arc<GameSpec>, private: [Vec<Card>; 2]) -> Result<Self> {
        for hand in &private {
            if hand.len() != spec.private_cards as usize {
                return Err(Error::InvalidConfig(format!(
                    "expected {} private cards, got {}",
                    spec.private_cards,
                    hand.len()
                )));
            }
        }
        check_disjoint(&[&private[0], &private[1]])?;
        Ok(BettingState { betting: Betting::new(spec), private, board: Vec::new() })
    }

    pub fn spec(&self) -> &Arc<GameSpec> {
        self.betting.spec()
    }

    pub fn betting(&self) -> &Betting {
        &self.betting
    }

    pub fn private(&self, p: Player) -> &[Card] {
        &self.private[p.index()]
    }

    pub fn board(&self) -> &[Card] {
        &self.board
    }

    pub fn round(&self) -> usize {
        self.betting.round()
    }

    pub fn phase(&self) -> Phase {
        self.betting.phase()
    }

    pub fn to_act(&self) -> Option<Player> {
        self.betting.to_act()
    }

    pub fn is_terminal(&self) -> bool {
        self.betting.is_terminal()
    }

    pub fn dealt_cards(&self) -> CardSet {
        CardSet::from_cards(&self.private[0])
            .union(CardSet::from_cards(&self.private[1]))
            .union(CardSet::from_cards(&self.board))
    }

    pub fn legal_actions(&self) -> LegalActions {
        self.betting.legal_actions()
    }

    pub fn apply_action(&self, action: Action) -> Result<BettingState> {
        let mut next = self.clone();
        next.betting.apply(action)?;
        Ok(next)
    }

    /// Reveals the public cards for the pending round.
    pub fn deal_board(&self, cards: &[Card]) -> Result<BettingState> {
        let Phase::Deal(round) = self.phase() else {
            return Err(Error::InvalidConfig("no board deal pending".into()));
        };
        let expected = self.spec().board_cards[round] as usize;
        if cards.len() != expected {
            return Err(Error::InvalidConfig(format!("round {round} deals {expected} cards, got {}", cards.len())));
        }
        check_disjoint(&[&self.private[0], &self.private[1], &self.board, cards])?;
        let mut next = self.clone();
        next.board.extend_from_slice(cards);
        next.betting.deal_done()?;
        Ok(next)
    }

    pub fn outcome(&self) -> Option<TerminalOutcome> {
        let reason = match self.phase() {
            Phase::Folded(_) => TerminalReason::Fold,
            Phase::Showdown => TerminalReason::Showdown,
            _ => return None,
        };
        let ordering = match reason {
            TerminalReason::Fold => std::cmp::Ordering::Equal,
            TerminalReason::Showdown => {
                let rule = self.spec().showdown;
                hand_strength(rule, &self.private[0], &self.board)
                    .cmp(&hand_strength(rule, &self.private[1], &self.board))
            }
        };
        self.betting.payoff(ordering).map(|payoff_p1| TerminalOutcome { payoff_p1, reason })
    }
}
