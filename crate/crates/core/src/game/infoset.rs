use std::fmt;

use serde::{Deserialize, Serialize};

use super::{ActionRecord, BettingState, GameSpec, Player};
use crate::cards::{rank_char, Card};

/// Maps the cards a player can see to bucket indices, per round.
///
/// `dims(round)` is `(private buckets, board buckets)`; the pair returned by
/// `bucket` indexes into that grid.
pub trait CardBucketing: Send + Sync {
    fn dims(&self, round: usize) -> (u32, u32);

    fn bucket(&self, round: usize, private: &[Card], board: &[Card]) -> (u32, u32);

    fn private_label(&self, round: usize, bucket: u32) -> String;

    fn board_label(&self, round: usize, bucket: u32) -> String;

    /// Buckets for both players on a shared board. Implementations with an
    /// expensive per-board pass override this to share it.
    fn bucket_pair(&self, round: usize, private: [&[Card]; 2], board: &[Card]) -> [(u32, u32); 2] {
        [self.bucket(round, private[0], board), self.bucket(round, private[1], board)]
    }

    /// Stable digest of the configuration.
    fn hash(&self) -> u64;
}

/// Lossless bucketing for games where suits never matter (Kuhn, Leduc):
/// a hand is identified by its sorted ranks.
#[derive(Clone, Debug)]
pub struct RankBucketing {
    ranks: Vec<u8>,
    private_cards: usize,
    board_len: Vec<usize>,
}

impl RankBucketing {
    pub fn new(spec: &GameSpec) -> Self {
        RankBucketing {
            ranks: spec.ranks.clone(),
            private_cards: spec.private_cards as usize,
            board_len: (0..spec.num_rounds()).map(|r| spec.board_len(r)).collect(),
        }
    }

    fn encode(&self, cards: &[Card]) -> u32 {
        let mut positions: Vec<u32> = cards
            .iter()
            .map(|c| self.ranks.iter().position(|&r| r == c.rank()).unwrap_or(0) as u32)
            .collect();
        positions.sort_unstable_by(|a, b| b.cmp(a));
        positions.iter().fold(0, |acc, &p| acc * self.ranks.len() as u32 + p)
    }

    fn decode(&self, mut index: u32, len: usize) -> String {
        let n = self.ranks.len() as u32;
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            out.push(rank_char(self.ranks[(index % n) as usize]));
            index /= n;
        }
        out.iter().rev().collect()
    }
}

impl CardBucketing for RankBucketing {
    fn dims(&self, round: usize) -> (u32, u32) {
        let n = self.ranks.len() as u32;
        (n.pow(self.private_cards as u32), n.pow(self.board_len[round] as u32))
    }

    fn bucket(&self, _round: usize, private: &[Card], board: &[Card]) -> (u32, u32) {
        (self.encode(private), self.encode(board))
    }

    fn private_label(&self, _round: usize, bucket: u32) -> String {
        self.decode(bucket, self.private_cards)
    }

    fn board_label(&self, round: usize, bucket: u32) -> String {
        self.decode(bucket, self.board_len[round])
    }

    fn hash(&self) -> u64 {
        let text = format!("ranks:{:?}:{}:{:?}", self.ranks, self.private_cards, self.board_len);
        super::stable_hash(text.as_bytes())
    }
}

/// Canonical infoset identifier: `player|private|board|history`, where the
/// history lists action tokens per round separated by `/`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InfoSetKey(String);

impl InfoSetKey {
    pub fn new(player: Player, private: &str, board: &str, history: &str) -> Self {
        InfoSetKey(format!("{player}|{private}|{board}|{history}"))
    }

    pub fn from_raw(raw: impl Into<String>) -> Self {
        InfoSetKey(raw.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn player(&self) -> Option<Player> {
        match self.0.split('|').next()? {
            "P1" => Some(Player::P1),
            "P2" => Some(Player::P2),
            _ => None,
        }
    }

    pub fn history(&self) -> &str {
        self.0.rsplit('|').next().unwrap_or("")
    }

    /// Betting round the key belongs to.
    pub fn round(&self) -> usize {
        self.history().matches('/').count()
    }
}

impl fmt::Display for InfoSetKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for InfoSetKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Tokens of `records` grouped by round up to and including `round`.
pub fn history_string(records: &[ActionRecord], round: usize) -> String {
    (0..=round)
        .map(|r| {
            records
                .iter()
                .filter(|a| a.round == r)
                .map(|a| a.action.token())
                .collect::<String>()
        })
        .collect::<Vec<_>>()
        .join("/")
}

impl BettingState {
    /// Key of the infoset `player` is in; the opponent's private cards never
    /// enter the key.
    pub fn infoset_key(&self, player: Player, bucketing: &dyn CardBucketing) -> InfoSetKey {
        let round = self.round();
        let (pb, bb) = bucketing.bucket(round, self.private(player), self.board());
        InfoSetKey::new(
            player,
            &bucketing.private_label(round, pb),
            &bucketing.board_label(round, bb),
            &history_string(self.betting().history(), round),
        )
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;
    use std::sync::Arc;

    use super::*;
    use crate::cards::parse_cards;
    use crate::game::{Action, Deal, Phase};

    fn kuhn_keys(state: &BettingState, bucketing: &RankBucketing, out: &mut BTreeSet<InfoSetKey>, terminals: &mut usize) {
        match state.phase() {
            Phase::Act(p) => {
                out.insert(state.infoset_key(p, bucketing));
                for a in state.legal_actions().to_vec() {
                    kuhn_keys(&state.apply_action(a).unwrap(), bucketing, out, terminals);
                }
            }
            _ => *terminals += 1,
        }
    }

    #[test]
    fn kuhn_tree_keys_and_terminals() {
        let spec = Arc::new(GameSpec::kuhn());
        let bucketing = RankBucketing::new(&spec);
        let mut keys = BTreeSet::new();
        let mut terminals = 0;
        for deal in Deal::enumerate(&spec) {
            let s = BettingState::new(spec.clone(), deal.private.clone()).unwrap();
            kuhn_keys(&s, &bucketing, &mut keys, &mut terminals);
        }
        assert_eq!(terminals, 30);
        // 3 cards x 4 decision histories (root, k, r1, kr1)
        assert_eq!(keys.len(), 12);
        let p1 = keys.iter().filter(|k| k.player() == Some(Player::P1)).count();
        assert_eq!(p1, 6);
        assert!(keys.contains(&InfoSetKey::from_raw("P1|K||kr1")));
    }

    #[test]
    fn opponent_cards_hidden() {
        let spec = Arc::new(GameSpec::river_nlhe());
        let bucketing = RankBucketing::new(&spec);
        let a = BettingState::new(spec.clone(), [parse_cards("AsKs").unwrap(), parse_cards("2c2d").unwrap()]).unwrap();
        let b = BettingState::new(spec, [parse_cards("AsKs").unwrap(), parse_cards("7h8h").unwrap()]).unwrap();
        let a = a.apply_action(Action::RaiseTo(300)).unwrap();
        let b = b.apply_action(Action::RaiseTo(300)).unwrap();
        assert_eq!(a.infoset_key(Player::P1, &bucketing), b.infoset_key(Player::P1, &bucketing));
        assert_ne!(a.infoset_key(Player::P2, &bucketing), b.infoset_key(Player::P2, &bucketing));
        assert_eq!(a.infoset_key(Player::P1, &bucketing), a.infoset_key(Player::P1, &bucketing));
    }

    #[test]
    fn round_of_key() {
        let key = InfoSetKey::new(Player::P2, "Q", "K", "r2c/r4");
        assert_eq!(key.round(), 1);
        assert_eq!(key.player(), Some(Player::P2));
        assert_eq!(key.as_str(), "P2|Q|K|r2c/r4");
    }
}
