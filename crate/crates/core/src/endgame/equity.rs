use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::ranges::RangeDistribution;
use crate::cards::{Card, CardSet};
use crate::game::{hand_strength, ShowdownRule};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquityVector {
    pub equities: Vec<f64>,
    /// Hands for which no opponent holding was compatible; their equity is
    /// set to 0.5.
    pub no_information: Vec<bool>,
}

/// Equity of each hand in `own` against `opponent`'s reach-weighted range,
/// after removing opponent hands that share a card with it: win probability
/// plus half the tie probability on the complete `board`.
pub fn conditional_equities(
    rule: ShowdownRule,
    board: &[Card],
    own: &[Vec<Card>],
    opponent: &RangeDistribution,
) -> EquityVector {
    let theirs: Vec<(u64, u32, f64)> = opponent
        .hands
        .iter()
        .zip(&opponent.reach)
        .filter(|(_, &w)| w > 0.0)
        .map(|(h, &w)| (CardSet::from_cards(h).0, hand_strength(rule, h, board), w))
        .collect();
    let mut equities = Vec::with_capacity(own.len());
    let mut no_information = Vec::with_capacity(own.len());
    for h in own {
        let mask = CardSet::from_cards(h).0;
        let mine = hand_strength(rule, h, board);
        let (mut score, mut mass) = (0.0, 0.0);
        for &(m, s, w) in &theirs {
            if m & mask != 0 {
                continue;
            }
            mass += w;
            score += w * match mine.cmp(&s) {
                Ordering::Greater => 1.0,
                Ordering::Equal => 0.5,
                Ordering::Less => 0.0,
            };
        }
        if mass > 0.0 {
            equities.push(score / mass);
            no_information.push(false);
        } else {
            equities.push(0.5);
            no_information.push(true);
        }
    }
    EquityVector { equities, no_information }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abstraction::private_hands;
    use crate::cards::parse_cards;
    use crate::game::{GameSpec, Player};

    fn uniform(hands: Vec<Vec<Card>>) -> RangeDistribution {
        let n = hands.len();
        RangeDistribution { player: Player::P2, hands, reach: vec![1.0; n], prob: vec![1.0 / n as f64; n] }
    }

    #[test]
    fn nuts_and_complement() {
        let board = parse_cards("JsTs4sKcQh").unwrap();
        let deck = GameSpec::river_nlhe().deck();
        let range = uniform(private_hands(&deck, 2, CardSet::from_cards(&board)));
        let nuts = parse_cards("AsKs").unwrap();
        let e = conditional_equities(ShowdownRule::Holdem, &board, &[nuts.clone()], &range);
        assert_eq!(e.equities[0], 1.0);

        let a = parse_cards("2c3d").unwrap();
        let b = parse_cards("9h8h").unwrap();
        let ea = conditional_equities(ShowdownRule::Holdem, &board, &[a.clone()], &uniform(vec![b.clone()]));
        let eb = conditional_equities(ShowdownRule::Holdem, &board, &[b], &uniform(vec![a]));
        assert!((ea.equities[0] + eb.equities[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lowest_hands_have_lowest_equity() {
        let board = parse_cards("JsTs4sKcQh").unwrap();
        let deck = GameSpec::river_nlhe().deck();
        let hands = private_hands(&deck, 2, CardSet::from_cards(&board));
        let range = uniform(hands.clone());
        let e = conditional_equities(ShowdownRule::Holdem, &board, &hands, &range);
        let min = e.equities.iter().cloned().fold(f64::INFINITY, f64::min);
        let low = range.index_of(&parse_cards("3c2c").unwrap()).unwrap();
        let blocker = range.index_of(&parse_cards("3s2c").unwrap()).unwrap();
        // 3c2c ties eight holdings (3s2s is a flush); 3s2c ties nine
        assert_eq!(e.equities[low], min);
        assert!((e.equities[low] - 4.0 / 990.0).abs() < 1e-15);
        assert!((e.equities[blocker] - 4.5 / 990.0).abs() < 1e-15);
    }

    #[test]
    fn empty_range_is_flagged() {
        let board = parse_cards("JsTs4sKcQh").unwrap();
        let own = parse_cards("AhAd").unwrap();
        let e = conditional_equities(ShowdownRule::Holdem, &board, &[own.clone()], &uniform(vec![own]));
        assert_eq!(e.equities[0], 0.5);
        assert!(e.no_information[0]);
    }
}
