use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{stable_hash, Action, Betting, BettingRule, GameSpec, Player};

/// One abstract bet size: a fraction of the pot after calling, or all-in.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SizeToken", into = "SizeToken")]
pub enum BetSize {
    Pot(f64),
    AllIn,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SizeToken {
    Fraction(f64),
    Word(String),
}

impl TryFrom<SizeToken> for BetSize {
    type Error = String;

    fn try_from(t: SizeToken) -> std::result::Result<Self, String> {
        match t {
            SizeToken::Fraction(f) if f.is_finite() && f > 0.0 => Ok(BetSize::Pot(f)),
            SizeToken::Fraction(f) => Err(format!("bet fraction {f} must be positive and finite")),
            SizeToken::Word(w) if w == "all-in" || w == "allin" => Ok(BetSize::AllIn),
            SizeToken::Word(w) => Err(format!("unknown bet size {w:?}")),
        }
    }
}

impl From<BetSize> for SizeToken {
    fn from(s: BetSize) -> Self {
        match s {
            BetSize::Pot(f) => SizeToken::Fraction(f),
            BetSize::AllIn => SizeToken::Word("all-in".into()),
        }
    }
}

impl fmt::Display for BetSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BetSize::Pot(x) => write!(f, "{x}p"),
            BetSize::AllIn => f.write_str("all-in"),
        }
    }
}

/// Sizes for one betting round, split by whether a bet is already in.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoundGrid {
    #[serde(default)]
    pub first_bet: Vec<BetSize>,
    #[serde(default)]
    pub raise: Vec<BetSize>,
}

impl RoundGrid {
    pub fn new(first_bet: Vec<BetSize>, raise: Vec<BetSize>) -> Self {
        RoundGrid { first_bet, raise }
    }

    fn validate(&self) -> Result<()> {
        for list in [&self.first_bet, &self.raise] {
            let mut last = 0.0;
            for (i, size) in list.iter().enumerate() {
                match *size {
                    BetSize::Pot(f) => {
                        if !(f.is_finite() && f > 0.0) {
                            return Err(Error::InvalidConfig(format!("bet fraction {f} must be positive")));
                        }
                        if f <= last {
                            return Err(Error::InvalidConfig("bet fractions must be strictly increasing".into()));
                        }
                        last = f;
                    }
                    BetSize::AllIn if i + 1 != list.len() => {
                        return Err(Error::InvalidConfig("all-in must appear once, as the last size".into()));
                    }
                    BetSize::AllIn => {}
                }
            }
        }
        Ok(())
    }
}

/// Declarative form of an [`ActionGrid`]. `rounds` holds either one entry
/// shared by every round or one per round; `p1`/`p2` override it per player.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default)]
    pub rounds: Vec<RoundGrid>,
    #[serde(default)]
    pub p1: Option<Vec<RoundGrid>>,
    #[serde(default)]
    pub p2: Option<Vec<RoundGrid>>,
    /// Bets plus raises allowed per round in the abstraction.
    #[serde(default)]
    pub max_raises: Option<u8>,
}

impl GridConfig {
    pub fn uniform(round: RoundGrid, max_raises: Option<u8>) -> Self {
        GridConfig { rounds: vec![round], p1: None, p2: None, max_raises }
    }
}

/// Pot-fraction action abstraction for a specific game.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionGrid {
    grids: [Vec<RoundGrid>; 2],
    max_raises: Option<u8>,
    spec_hash: u64,
}

/// Builds the grid for `spec`, expanding shared entries to every round.
pub fn build_action_grid(spec: &GameSpec, config: &GridConfig) -> Result<ActionGrid> {
    let rounds = spec.num_rounds();
    let expand = |list: &Vec<RoundGrid>| -> Result<Vec<RoundGrid>> {
        match list.len() {
            1 => Ok(vec![list[0].clone(); rounds]),
            n if n == rounds => Ok(list.clone()),
            n => Err(Error::InvalidConfig(format!("grid has {n} rounds, game has {rounds}"))),
        }
    };
    let base = if config.rounds.is_empty() {
        None
    } else {
        Some(expand(&config.rounds)?)
    };
    let pick = |over: &Option<Vec<RoundGrid>>| -> Result<Vec<RoundGrid>> {
        match (over, &base) {
            (Some(o), _) => expand(o),
            (None, Some(b)) => Ok(b.clone()),
            (None, None) => Ok(vec![RoundGrid::default(); rounds]),
        }
    };
    let grids = [pick(&config.p1)?, pick(&config.p2)?];
    let any_size = grids.iter().flatten().any(|g| !g.first_bet.is_empty() || !g.raise.is_empty());
    let fixed = matches!(spec.betting, BettingRule::FixedLimit { .. });
    if !any_size && !fixed {
        return Err(Error::EmptyGrid);
    }
    for g in grids.iter().flatten() {
        g.validate()?;
    }
    Ok(ActionGrid { grids, max_raises: config.max_raises, spec_hash: spec.hash() })
}

/// Rounds to the nearest integer with exact halves going down.
pub fn round_half_down(x: f64) -> u64 {
    let floor = x.floor();
    if x - floor > 0.5 + 1e-9 {
        floor as u64 + 1
    } else {
        floor as u64
    }
}

/// One concrete abstract raise at a state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SizedRaise {
    pub to: u32,
    /// Chips beyond the call, as a fraction of the pot after calling.
    pub fraction: f64,
    pub all_in: bool,
}

impl ActionGrid {
    pub fn spec_hash(&self) -> u64 {
        self.spec_hash
    }

    pub fn max_raises(&self) -> Option<u8> {
        self.max_raises
    }

    pub fn round_grid(&self, player: Player, round: usize) -> &RoundGrid {
        &self.grids[player.index()][round]
    }

    pub fn check_spec(&self, spec: &GameSpec) -> Result<()> {
        if self.spec_hash != spec.hash() {
            return Err(Error::HashMismatch { what: "game spec", expected: spec.hash(), found: self.spec_hash });
        }
        Ok(())
    }

    /// Drops pot fractions above `limit`; all-in is kept.
    pub fn without_sizes_above(&self, limit: f64) -> ActionGrid {
        let mut out = self.clone();
        for g in out.grids.iter_mut().flatten() {
            g.first_bet.retain(|s| !matches!(s, BetSize::Pot(f) if *f > limit));
            g.raise.retain(|s| !matches!(s, BetSize::Pot(f) if *f > limit));
        }
        out
    }

    pub fn hash(&self) -> u64 {
        stable_hash(&serde_json::to_vec(self).expect("grid serializes"))
    }

    /// Abstract raises available to the player to act, ascending and
    /// deduplicated after rounding and clamping to the legal interval.
    pub fn raises(&self, betting: &Betting) -> Vec<SizedRaise> {
        let Some(p) = betting.to_act() else { return Vec::new() };
        let Some((min_to, max_to)) = betting.legal_actions().raise else { return Vec::new() };
        let level = betting.round_commit(p.opponent());
        let base = pot_after_call(betting, p) as f64;
        let fraction_of = |to: u32| (to - level) as f64 / base;
        if matches!(betting.spec().betting, BettingRule::FixedLimit { .. }) {
            return vec![SizedRaise { to: min_to, fraction: fraction_of(min_to), all_in: min_to == max_to }];
        }
        if matches!(self.max_raises, Some(cap) if betting.raises_this_round() >= cap) {
            return Vec::new();
        }
        let grid = self.round_grid(p, betting.round());
        let facing = level > 0;
        let sizes = if facing { &grid.raise } else { &grid.first_bet };
        let mut tos: Vec<u32> = sizes
            .iter()
            .map(|s| match *s {
                BetSize::AllIn => max_to,
                BetSize::Pot(f) => {
                    let chips = round_half_down(f * base).min(u32::MAX as u64) as u32;
                    level.saturating_add(chips).clamp(min_to, max_to)
                }
            })
            .collect();
        tos.sort_unstable();
        tos.dedup();
        tos.into_iter()
            .map(|to| SizedRaise { to, fraction: fraction_of(to), all_in: to == max_to })
            .collect()
    }

    /// Abstract actions at a state: fold when facing a bet, check or call,
    /// then the grid raises.
    pub fn actions(&self, betting: &Betting) -> Vec<Action> {
        let legal = betting.legal_actions();
        let mut out = Vec::new();
        if legal.fold {
            out.push(Action::Fold);
        }
        if legal.check {
            out.push(Action::Check);
        }
        if legal.call.is_some() {
            out.push(Action::Call);
        }
        out.extend(self.raises(betting).into_iter().map(|r| Action::RaiseTo(r.to)));
        out
    }
}

/// Pot size the player would face after calling: everything in the middle
/// plus the amount to call.
pub fn pot_after_call(betting: &Betting, player: Player) -> u32 {
    betting.total_pot() + betting.to_call(player)
}
