//! Randomized mapping of off-grid bet sizes onto neighbouring abstract sizes.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::abstraction::pot_after_call;
use crate::error::{Error, Result};
use crate::game::{Betting, Player};

/// Sizes closer than this (in pot fractions) count as an exact match.
pub const EXACT_MATCH: f64 = 1e-9;

/// Probability of mapping a bet of pot fraction `x` down to `a` rather than
/// up to `b`: `(b - x)(1 + a) / ((b - a)(1 + x))`.
pub fn pseudo_harmonic_probability(a: f64, b: f64, x: f64) -> Result<f64> {
    if a == b {
        return Err(Error::DegenerateInterval(a));
    }
    if !(a < b) || x < a || x > b || a < 0.0 {
        return Err(Error::InvalidConfig(format!("need 0 <= A <= x <= B with A < B, got A={a} x={x} B={b}")));
    }
    Ok((b - x) * (1.0 + a) / ((b - a) * (1.0 + x)))
}

/// Pot fraction of a raise to `raise_to` by `actor`: the chips added beyond
/// the opponent's commitment, over the pot after calling.
pub fn bet_fraction(betting: &Betting, actor: Player, raise_to: u32) -> f64 {
    let level = betting.round_commit(actor.opponent());
    let base = pot_after_call(betting, actor).max(1);
    raise_to.saturating_sub(level) as f64 / base as f64
}

/// Record of one randomized (or extreme) mapping.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TranslationEvent {
    pub x: f64,
    pub a: f64,
    pub b: f64,
    /// Probability of mapping down; absent when the bet lay outside the grid.
    pub f: Option<f64>,
    pub u: Option<f64>,
    /// Fraction the bet was read as.
    pub chosen: f64,
    pub mapped_down: bool,
}

/// Maps `x` onto one of `candidates` (ascending pot fractions, 0 standing
/// for check or call). Returns the chosen index and, unless `x` matched a
/// candidate exactly, the event describing the mapping. Exact matches draw
/// no randomness.
pub fn translate_fraction<R: Rng + ?Sized>(
    x: f64,
    candidates: &[f64],
    rng: &mut R,
) -> Result<(usize, Option<TranslationEvent>)> {
    if candidates.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if let Some(i) = candidates.iter().position(|&c| (c - x).abs() <= EXACT_MATCH) {
        return Ok((i, None));
    }
    let last = candidates.len() - 1;
    let extreme = |i: usize, down: bool| {
        let c = candidates[i];
        (i, Some(TranslationEvent { x, a: c, b: c, f: None, u: None, chosen: c, mapped_down: down }))
    };
    if x < candidates[0] {
        return Ok(extreme(0, false));
    }
    if x > candidates[last] {
        return Ok(extreme(last, true));
    }
    let hi = candidates.iter().position(|&c| c > x).expect("x below the largest candidate");
    let lo = hi - 1;
    let (a, b) = (candidates[lo], candidates[hi]);
    let f = pseudo_harmonic_probability(a, b, x)?;
    let u: f64 = rng.gen();
    let down = u < f;
    let i = if down { lo } else { hi };
    Ok((i, Some(TranslationEvent { x, a, b, f: Some(f), u: Some(u), chosen: candidates[i], mapped_down: down })))
}

/// Translates an observed raise in the real game: the fraction is taken
/// against the true pot in `betting`.
pub fn translate_bet<R: Rng + ?Sized>(
    betting: &Betting,
    actor: Player,
    raise_to: u32,
    candidates: &[f64],
    rng: &mut R,
) -> Result<(usize, Option<TranslationEvent>)> {
    translate_fraction(bet_fraction(betting, actor, raise_to), candidates, rng)
}
