//! Card-free betting logic: chips, turn order and round transitions.
//!
//! The abstract game trees are built directly on [`Betting`], so nothing here
//! may depend on which cards were dealt.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Action, BettingRule, GameSpec, Player};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "phase", content = "value")]
pub enum Phase {
    /// Waiting for `player` to act.
    Act(Player),
    /// Waiting for the public cards of `round`.
    Deal(usize),
    Showdown,
    /// `player` folded.
    Folded(Player),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionRecord {
    pub player: Player,
    pub round: usize,
    pub action: Action,
}

/// Legal options for the player to act. Raise amounts are raise-to totals
/// for the current round; the all-in total is always `max_to`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LegalActions {
    pub fold: bool,
    pub check: bool,
    /// Chips added by calling.
    pub call: Option<u32>,
    pub raise: Option<(u32, u32)>,
}

impl LegalActions {
    pub fn is_empty(&self) -> bool {
        !self.fold && !self.check && self.call.is_none() && self.raise.is_none()
    }

    pub fn allows(&self, action: Action) -> bool {
        match action {
            Action::Fold => self.fold,
            Action::Check => self.check,
            Action::Call => self.call.is_some(),
            Action::RaiseTo(x) => matches!(self.raise, Some((lo, hi)) if lo <= x && x <= hi),
        }
    }

    /// Enumerates the options with the raise interval reduced to its bounds.
    pub fn to_vec(&self) -> Vec<Action> {
        let mut out = Vec::new();
        if self.fold {
            out.push(Action::Fold);
        }
        if self.check {
            out.push(Action::Check);
        }
        if self.call.is_some() {
            out.push(Action::Call);
        }
        if let Some((lo, hi)) = self.raise {
            out.push(Action::RaiseTo(lo));
            if hi != lo {
                out.push(Action::RaiseTo(hi));
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Betting {
    spec: Arc<GameSpec>,
    round: usize,
    /// Chips from antes and completed rounds.
    pot: u32,
    round_commit: [u32; 2],
    total_commit: [u32; 2],
    stacks: [u32; 2],
    phase: Phase,
    raises: u8,
    last_raise: u32,
    acted: [bool; 2],
    history: Vec<ActionRecord>,
}

impl Betting {
    /// Start of a hand: antes into the pot, blinds as round-0 commitments.
    pub fn new(spec: Arc<GameSpec>) -> Self {
        let stack = spec.starting_stack;
        let ante = spec.ante.min(stack);
        let blinds = [spec.small_blind.min(stack - ante), spec.big_blind.min(stack - ante)];
        let mut b = Betting {
            round: 0,
            pot: 2 * ante,
            round_commit: blinds,
            total_commit: [ante + blinds[0], ante + blinds[1]],
            stacks: [stack - ante - blinds[0], stack - ante - blinds[1]],
            phase: Phase::Deal(0),
            raises: 0,
            last_raise: spec.big_blind,
            acted: [false; 2],
            history: Vec::new(),
            spec,
        };
        if b.spec.board_cards[0] == 0 {
            b.start_betting();
        }
        b
    }

    /// Start of `round` after earlier betting left `contributed` chips from
    /// each player in the pot. Used to root endgame trees at the true pot.
    pub fn at_round_start(spec: Arc<GameSpec>, round: usize, contributed: [u32; 2]) -> Result<Self> {
        if round >= spec.num_rounds() {
            return Err(Error::InvalidConfig(format!("round {round} out of range")));
        }
        let stack = spec.starting_stack;
        if contributed.iter().any(|&c| c > stack) {
            return Err(Error::InvalidConfig("contribution exceeds starting stack".into()));
        }
        let mut b = Betting {
            round,
            pot: contributed[0] + contributed[1],
            round_commit: [0; 2],
            total_commit: contributed,
            stacks: [stack - contributed[0], stack - contributed[1]],
            phase: Phase::Act(Player::P1),
            raises: 0,
            last_raise: 0,
            acted: [false; 2],
            history: Vec::new(),
            spec,
        };
        b.start_betting();
        Ok(b)
    }

    pub fn spec(&self) -> &Arc<GameSpec> {
        &self.spec
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn to_act(&self) -> Option<Player> {
        match self.phase {
            Phase::Act(p) => Some(p),
            _ => None,
        }
    }

    pub fn is_terminal(&self) -> bool {
        matches!(self.phase, Phase::Showdown | Phase::Folded(_))
    }

    pub fn history(&self) -> &[ActionRecord] {
        &self.history
    }

    /// Settled pot, excluding the current round's commitments.
    pub fn pot(&self) -> u32 {
        self.pot
    }

    /// Everything in the middle, including the current round.
    pub fn total_pot(&self) -> u32 {
        self.pot + self.round_commit[0] + self.round_commit[1]
    }

    pub fn round_commit(&self, p: Player) -> u32 {
        self.round_commit[p.index()]
    }

    pub fn total_commit(&self, p: Player) -> u32 {
        self.total_commit[p.index()]
    }

    pub fn stack(&self, p: Player) -> u32 {
        self.stacks[p.index()]
    }

    pub fn to_call(&self, p: Player) -> u32 {
        self.round_commit[p.opponent().index()].saturating_sub(self.round_commit[p.index()])
    }

    pub fn raises_this_round(&self) -> u8 {
        self.raises
    }

    /// Chip conservation: everything adds back to the two starting stacks.
    pub fn chips_conserved(&self) -> bool {
        self.pot + self.stacks[0] + self.stacks[1] + self.round_commit[0] + self.round_commit[1]
            == 2 * self.spec.starting_stack
            && self.total_commit[0] + self.total_commit[1] == self.total_pot()
    }

    pub fn legal_actions(&self) -> LegalActions {
        let Phase::Act(p) = self.phase else {
            return LegalActions::default();
        };
        let me = p.index();
        let opp = p.opponent().index();
        let to_call = self.to_call(p);
        let mut legal = LegalActions {
            fold: to_call > 0,
            check: to_call == 0,
            call: (to_call > 0).then(|| to_call.min(self.stacks[me])),
            raise: None,
        };
        let can_raise = self.stacks[me] > to_call && self.stacks[opp] > 0;
        if can_raise {
            let all_in = self.round_commit[me] + self.stacks[me];
            let target = match &self.spec.betting {
                BettingRule::NoLimit => {
                    let increment = self.last_raise.max(self.spec.min_bet());
                    Some(self.round_commit[opp] + increment)
                }
                BettingRule::FixedLimit { raise_sizes, max_raises } => (self.raises < *max_raises)
                    .then(|| self.round_commit[opp] + raise_sizes[self.round]),
            };
            legal.raise = target.map(|min_to| match &self.spec.betting {
                BettingRule::NoLimit => (min_to.min(all_in), all_in),
                BettingRule::FixedLimit { .. } => (min_to.min(all_in), min_to.min(all_in)),
            });
        }
        legal
    }

    /// Applies `action` for the player to act.
    pub fn apply(&mut self, action: Action) -> Result<()> {
        let Phase::Act(p) = self.phase else {
            return Err(Error::IllegalAction {
                action: action.to_string(),
                reason: format!("no player to act in phase {:?}", self.phase),
            });
        };
        let legal = self.legal_actions();
        if !legal.allows(action) {
            return Err(Error::IllegalAction { action: action.to_string(), reason: describe_violation(&legal, action) });
        }
        let me = p.index();
        let opp = p.opponent().index();
        self.history.push(ActionRecord { player: p, round: self.round, action });
        self.acted[me] = true;
        match action {
            Action::Fold => {
                self.phase = Phase::Folded(p);
                return Ok(());
            }
            Action::Check => {}
            Action::Call => {
                let amount = legal.call.unwrap_or(0);
                self.commit(me, amount);
                if self.round_commit[me] < self.round_commit[opp] {
                    // short all-in call: return the uncalled excess
                    let excess = self.round_commit[opp] - self.round_commit[me];
                    self.round_commit[opp] -= excess;
                    self.total_commit[opp] -= excess;
                    self.stacks[opp] += excess;
                }
            }
            Action::RaiseTo(to) => {
                let increment = to - self.round_commit[opp];
                self.last_raise = self.last_raise.max(increment);
                self.commit(me, to - self.round_commit[me]);
                self.raises += 1;
                self.acted[opp] = false;
            }
        }
        let matched = self.round_commit[0] == self.round_commit[1];
        if matched && self.acted[0] && self.acted[1] {
            self.close_round();
        } else {
            self.phase = Phase::Act(p.opponent());
        }
        Ok(())
    }

    /// Marks the pending public cards as dealt.
    pub fn deal_done(&mut self) -> Result<()> {
        match self.phase {
            Phase::Deal(_) => {
                self.start_betting();
                Ok(())
            }
            other => Err(Error::InvalidConfig(format!("no deal pending in phase {other:?}"))),
        }
    }

    fn commit(&mut self, who: usize, amount: u32) {
        self.stacks[who] -= amount;
        self.round_commit[who] += amount;
        self.total_commit[who] += amount;
    }

    fn start_betting(&mut self) {
        if self.stacks.contains(&0) {
            // nobody can bet against an all-in player
            self.close_round();
        } else {
            self.phase = Phase::Act(self.spec.first_to_act[self.round]);
        }
    }

    fn close_round(&mut self) {
        self.pot += self.round_commit[0] + self.round_commit[1];
        self.round_commit = [0; 2];
        self.raises = 0;
        self.last_raise = 0;
        self.acted = [false; 2];
        if self.round + 1 >= self.spec.num_rounds() {
            self.phase = Phase::Showdown;
            return;
        }
        self.round += 1;
        if self.spec.board_cards[self.round] > 0 {
            self.phase = Phase::Deal(self.round);
        } else {
            self.start_betting();
        }
    }

    /// Payoff to player 1 at a terminal, given the showdown comparison for
    /// player 1 (ignored after a fold).
    pub fn payoff(&self, p1_vs_p2: std::cmp::Ordering) -> Option<i64> {
        match self.phase {
            Phase::Folded(p) => {
                let lost = self.total_commit[p.index()] as i64;
                Some(if p == Player::P1 { -lost } else { lost })
            }
            Phase::Showdown => {
                let matched = self.total_commit[0].min(self.total_commit[1]) as i64;
                Some(match p1_vs_p2 {
                    std::cmp::Ordering::Greater => matched,
                    std::cmp::Ordering::Less => -matched,
                    std::cmp::Ordering::Equal => 0,
                })
            }
            _ => None,
        }
    }
}

fn describe_violation(legal: &LegalActions, action: Action) -> String {
    match action {
        Action::Fold => "fold is not allowed when checking is free".into(),
        Action::Check => format!("cannot check facing a bet (call {})", legal.call.unwrap_or(0)),
        Action::Call => "nothing to call".into(),
        Action::RaiseTo(x) => match legal.raise {
            None => "raising is not allowed here".into(),
            Some((lo, _)) if x < lo => format!("raise-to {x} below minimum {lo}"),
            Some((_, hi)) => format!("raise-to {x} above maximum {hi} (all-in)"),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn river() -> Betting {
        Betting::new(Arc::new(GameSpec::river_nlhe()))
    }

    #[test]
    fn preflop_options_for_small_blind() {
        let b = river();
        assert_eq!(b.to_act(), Some(Player::P1));
        let legal = b.legal_actions();
        assert!(legal.fold && !legal.check);
        assert_eq!(legal.call, Some(50));
        assert_eq!(legal.raise, Some((200, 20_000)));
        assert!(b.chips_conserved());
    }

    #[test]
    fn limp_gives_big_blind_the_option() {
        let mut b = river();
        b.apply(Action::Call).unwrap();
        assert_eq!(b.to_act(), Some(Player::P2));
        let legal = b.legal_actions();
        assert!(legal.check && !legal.fold);
        assert_eq!(legal.raise, Some((200, 20_000)));
        b.apply(Action::Check).unwrap();
        assert_eq!(b.phase(), Phase::Deal(1));
        assert_eq!(b.pot(), 200);
    }

    #[test]
    fn min_raise_tracks_last_increment() {
        let mut b = river();
        b.apply(Action::RaiseTo(500)).unwrap();
        // last increment 400 over the big blind
        assert_eq!(b.legal_actions().raise, Some((900, 20_000)));
    }

    #[test]
    fn all_in_leaves_call_or_fold() {
        let mut b = river();
        b.apply(Action::RaiseTo(20_000)).unwrap();
        let legal = b.legal_actions();
        assert!(legal.fold && legal.call == Some(19_900) && legal.raise.is_none());
        b.apply(Action::Call).unwrap();
        // board still has to come, then straight to showdown
        assert_eq!(b.phase(), Phase::Deal(1));
        b.deal_done().unwrap();
        assert_eq!(b.phase(), Phase::Showdown);
        assert_eq!(b.payoff(std::cmp::Ordering::Less), Some(-20_000));
    }

    #[test]
    fn rejects_out_of_bounds_raise_with_reason() {
        let mut b = river();
        let err = b.apply(Action::RaiseTo(150)).unwrap_err().to_string();
        assert!(err.contains("below minimum 200"), "{err}");
        let err = b.apply(Action::RaiseTo(20_001)).unwrap_err().to_string();
        assert!(err.contains("above maximum 20000"), "{err}");
        let err = b.apply(Action::Check).unwrap_err().to_string();
        assert!(err.contains("cannot check"), "{err}");
    }

    #[test]
    fn fold_costs_committed_chips() {
        let mut b = river();
        b.apply(Action::Fold).unwrap();
        assert!(b.is_terminal());
        assert_eq!(b.payoff(std::cmp::Ordering::Equal), Some(-50));
        assert!(b.legal_actions().is_empty());
    }

    #[test]
    fn kuhn_opening_and_bet() {
        let mut b = Betting::new(Arc::new(GameSpec::kuhn()));
        let legal = b.legal_actions();
        assert_eq!(legal.to_vec(), vec![Action::Check, Action::RaiseTo(1)]);
        b.apply(Action::RaiseTo(1)).unwrap();
        assert_eq!(b.legal_actions().to_vec(), vec![Action::Fold, Action::Call]);
    }

    #[test]
    fn leduc_raise_cap() {
        let mut b = Betting::new(Arc::new(GameSpec::leduc()));
        b.apply(Action::RaiseTo(2)).unwrap();
        b.apply(Action::RaiseTo(4)).unwrap();
        assert!(b.legal_actions().raise.is_none());
        b.apply(Action::Call).unwrap();
        assert_eq!(b.phase(), Phase::Deal(1));
        b.deal_done().unwrap();
        assert_eq!(b.legal_actions().raise, Some((4, 4)));
        assert_eq!(b.total_pot(), 10);
    }

    #[test]
    fn round_start_constructor() {
        let spec = Arc::new(GameSpec::river_nlhe());
        let b = Betting::at_round_start(spec, 1, [5_000, 5_000]).unwrap();
        assert_eq!(b.to_act(), Some(Player::P2));
        assert_eq!(b.total_pot(), 10_000);
        assert_eq!(b.stack(Player::P1), 15_000);
        assert!(b.chips_conserved());
    }
}
