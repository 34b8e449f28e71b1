use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::GameSpec;
use crate::cards::{combinations, Card, CardSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChanceOutcome {
    /// Private cards for player 1 and player 2.
    Private([Vec<Card>; 2]),
    /// Public cards for one round.
    Board(Vec<Card>),
}

/// Uniform distribution over the cards dealt at the start of `round`, given
/// the cards already out. Round 0 deals both players' private hands as
/// ordered pairs; later rounds deal that round's public cards.
pub fn enumerate_chance(spec: &GameSpec, round: usize, dealt: CardSet) -> Vec<(ChanceOutcome, f64)> {
    let remaining: Vec<Card> = spec.deck().into_iter().filter(|c| !dealt.contains(*c)).collect();
    let outcomes: Vec<ChanceOutcome> = if round == 0 && spec.private_cards > 0 && dealt.is_empty() {
        let hands = combinations(&remaining, spec.private_cards as usize);
        let mut out = Vec::new();
        for h1 in &hands {
            let m1 = CardSet::from_cards(h1);
            for h2 in &hands {
                if !CardSet::from_cards(h2).intersects(m1) {
                    out.push(ChanceOutcome::Private([h1.clone(), h2.clone()]));
                }
            }
        }
        out
    } else {
        let k = spec.board_cards.get(round).copied().unwrap_or(0) as usize;
        combinations(&remaining, k).into_iter().map(ChanceOutcome::Board).collect()
    };
    let p = 1.0 / outcomes.len() as f64;
    outcomes.into_iter().map(|o| (o, p)).collect()
}

/// Every card of one hand, fixed up front: both private hands and the full
/// board in dealing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Deal {
    pub private: [Vec<Card>; 2],
    pub board: Vec<Card>,
}

impl Deal {
    pub fn random<R: Rng + ?Sized>(spec: &GameSpec, rng: &mut R) -> Deal {
        let mut deck = spec.deck();
        deck.shuffle(rng);
        let n = spec.private_cards as usize;
        let board_total: usize = spec.board_cards.iter().map(|&b| b as usize).sum();
        Deal {
            private: [deck[..n].to_vec(), deck[n..2 * n].to_vec()],
            board: deck[2 * n..2 * n + board_total].to_vec(),
        }
    }

    /// All complete deals with equal probability. Board order within a round
    /// is canonical (ascending), so each deal stands for the same number of
    /// raw orderings.
    pub fn enumerate(spec: &GameSpec) -> Vec<Deal> {
        let mut deals = Vec::new();
        for (outcome, _) in enumerate_chance(spec, 0, CardSet::default()) {
            let ChanceOutcome::Private(private) = outcome else { unreachable!() };
            let mut partial = vec![Vec::new()];
            let dealt = CardSet::from_cards(&private[0]).union(CardSet::from_cards(&private[1]));
            for round in 1..spec.num_rounds() {
                if spec.board_cards[round] == 0 {
                    continue;
                }
                let mut next = Vec::new();
                for board in &partial {
                    let used = dealt.union(CardSet::from_cards(board));
                    for (o, _) in enumerate_chance(spec, round, used) {
                        let ChanceOutcome::Board(cards) = o else { unreachable!() };
                        let mut b = board.clone();
                        b.extend(cards);
                        next.push(b);
                    }
                }
                partial = next;
            }
            deals.extend(partial.into_iter().map(|board| Deal { private: private.clone(), board }));
        }
        deals
    }

    pub fn board_for_round(&self, spec: &GameSpec, round: usize) -> &[Card] {
        &self.board[..spec.board_len(round)]
    }

    /// Cards revealed at the start of `round`.
    pub fn round_cards(&self, spec: &GameSpec, round: usize) -> &[Card] {
        let end = spec.board_len(round);
        &self.board[end - spec.board_cards[round] as usize..end]
    }

    /// The same cards with the seats exchanged.
    pub fn swapped(&self) -> Deal {
        Deal { private: [self.private[1].clone(), self.private[0].clone()], board: self.board.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn kuhn_deal_has_six_orderings() {
        let outcomes = enumerate_chance(&GameSpec::kuhn(), 0, CardSet::default());
        assert_eq!(outcomes.len(), 6);
        assert!(outcomes.iter().all(|(_, p)| (*p - 1.0 / 6.0).abs() < 1e-15));
    }

    #[test]
    fn probabilities_sum_to_one() {
        for spec in [GameSpec::kuhn(), GameSpec::leduc()] {
            let total: f64 = enumerate_chance(&spec, 0, CardSet::default()).iter().map(|(_, p)| p).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
        let spec = GameSpec::leduc();
        let dealt = CardSet::from_cards(&spec.deck()[..2]);
        let total: f64 = enumerate_chance(&spec, 1, dealt).iter().map(|(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn river_card_with_46_unseen() {
        let spec = GameSpec::mini_nlhe();
        let known = crate::cards::parse_cards("AsKd2c7d9hJs").unwrap();
        let outcomes = enumerate_chance(&spec, 3, CardSet::from_cards(&known));
        assert_eq!(outcomes.len(), 46);
        assert!(outcomes.iter().all(|(_, p)| (*p - 1.0 / 46.0).abs() < 1e-15));
    }

    #[test]
    fn enumerated_deals() {
        assert_eq!(Deal::enumerate(&GameSpec::kuhn()).len(), 6);
        assert_eq!(Deal::enumerate(&GameSpec::leduc()).len(), 120);
    }

    #[test]
    fn random_deal_is_disjoint_and_seeded() {
        let spec = GameSpec::river_nlhe();
        let a = Deal::random(&spec, &mut ChaCha8Rng::seed_from_u64(3));
        let b = Deal::random(&spec, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(a, b);
        crate::cards::check_disjoint(&[&a.private[0], &a.private[1], &a.board]).unwrap();
        assert_eq!(a.board.len(), 5);
    }
}
