use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::ShowdownRule;
use crate::cards::{check_disjoint, Card};
use crate::error::Result;
use crate::eval;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShowdownResult {
    Win,
    Lose,
    Tie,
}

impl ShowdownResult {
    pub fn from_ordering(o: Ordering) -> Self {
        match o {
            Ordering::Greater => ShowdownResult::Win,
            Ordering::Less => ShowdownResult::Lose,
            Ordering::Equal => ShowdownResult::Tie,
        }
    }

    /// +1 / -1 / 0 from player 1's side.
    pub fn sign(self) -> f64 {
        match self {
            ShowdownResult::Win => 1.0,
            ShowdownResult::Lose => -1.0,
            ShowdownResult::Tie => 0.0,
        }
    }
}

/// Comparable strength of a private hand on a complete board; no card checks.
pub fn hand_strength(rule: ShowdownRule, private: &[Card], board: &[Card]) -> u32 {
    match rule {
        ShowdownRule::HighCard => private.iter().map(|c| c.rank() as u32).max().unwrap_or(0),
        ShowdownRule::Leduc => {
            let high = private.iter().map(|c| c.rank() as u32).max().unwrap_or(0);
            let paired = private.iter().any(|c| board.iter().any(|b| b.rank() == c.rank()));
            if paired {
                100 + high
            } else {
                high
            }
        }
        ShowdownRule::Holdem => {
            let mut cards: Vec<Card> = Vec::with_capacity(7);
            cards.extend_from_slice(private);
            cards.extend_from_slice(board);
            eval::strength(&cards)
        }
    }
}

/// Result for player 1 holding `hand1` against `hand2` on `board`.
pub fn evaluate_showdown(rule: ShowdownRule, board: &[Card], hand1: &[Card], hand2: &[Card]) -> Result<ShowdownResult> {
    check_disjoint(&[board, hand1, hand2])?;
    let s1 = hand_strength(rule, hand1, board);
    let s2 = hand_strength(rule, hand2, board);
    Ok(ShowdownResult::from_ordering(s1.cmp(&s2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cards::parse_cards;
    use crate::error::Error;

    fn c(s: &str) -> Vec<Card> {
        parse_cards(s).unwrap()
    }

    #[test]
    fn flush_beats_high_card() {
        let r = evaluate_showdown(ShowdownRule::Holdem, &c("JsTs4sKcQh"), &c("As3s"), &c("3c2c")).unwrap();
        assert_eq!(r, ShowdownResult::Win);
    }

    #[test]
    fn kuhn_rank_order() {
        let r = evaluate_showdown(ShowdownRule::HighCard, &[], &c("Ks"), &c("Qs")).unwrap();
        assert_eq!(r, ShowdownResult::Win);
    }

    #[test]
    fn identical_best_five_ties() {
        let r = evaluate_showdown(ShowdownRule::Holdem, &c("AsKdQhJcTs"), &c("2c3d"), &c("2d3c")).unwrap();
        assert_eq!(r, ShowdownResult::Tie);
    }

    #[test]
    fn leduc_pair_beats_higher_card() {
        let r = evaluate_showdown(ShowdownRule::Leduc, &c("Jh"), &c("Js"), &c("Ks")).unwrap();
        assert_eq!(r, ShowdownResult::Win);
        let r = evaluate_showdown(ShowdownRule::Leduc, &c("Qh"), &c("Js"), &c("Ks")).unwrap();
        assert_eq!(r, ShowdownResult::Lose);
    }

    #[test]
    fn duplicate_card_rejected() {
        let err = evaluate_showdown(ShowdownRule::Holdem, &c("JsTs4sKcQh"), &c("As3s"), &c("As2c")).unwrap_err();
        assert!(matches!(err, Error::DuplicateCard(_)));
    }
}
