use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::boards::{cluster_boards, BoardClustering};
use super::buckets::bucket_by_equity_percentiles;
use crate::cards::{combinations, rank_char, Card, CardSet};
use crate::error::{Error, Result};
use crate::eval;
use crate::game::{stable_hash, CardBucketing, GameSpec};

pub const PREFLOP_CLASSES: u32 = 169;

/// Lossless preflop class of a two-card hand: pairs, suited and offsuit
/// combinations of ranks (169 in total).
pub fn preflop_class(hand: &[Card]) -> u32 {
    let (a, b) = (hand[0], hand[1]);
    let (hi, lo) = if a.rank() >= b.rank() { (a.rank(), b.rank()) } else { (b.rank(), a.rank()) };
    let (hi, lo) = (hi as u32, lo as u32);
    if hi == lo || a.suit() == b.suit() {
        hi * 13 + lo
    } else {
        lo * 13 + hi
    }
}

pub fn preflop_label(class: u32) -> String {
    let (row, col) = (class / 13, class % 13);
    let r = |x: u32| rank_char(x as u8);
    match row.cmp(&col) {
        std::cmp::Ordering::Equal => format!("{}{}", r(row), r(row)),
        std::cmp::Ordering::Greater => format!("{}{}s", r(row), r(col)),
        std::cmp::Ordering::Less => format!("{}{}o", r(col), r(row)),
    }
}

/// Every private hand of `size` cards from `deck` avoiding `dead`.
pub fn private_hands(deck: &[Card], size: usize, dead: CardSet) -> Vec<Vec<Card>> {
    let live: Vec<Card> = deck.iter().copied().filter(|c| !dead.contains(*c)).collect();
    combinations(&live, size)
}

/// Equity of each hand against a uniformly random opponent hand on `board`,
/// with card removal. Boards shorter than five cards use current strength.
pub fn uniform_equities(board: &[Card], hands: &[Vec<Card>]) -> Vec<f64> {
    let strengths: Vec<u32> = hands
        .iter()
        .map(|h| {
            let mut cards = h.clone();
            cards.extend_from_slice(board);
            eval::strength(&cards)
        })
        .collect();
    let masks: Vec<u64> = hands.iter().map(|h| CardSet::from_cards(h).0).collect();
    (0..hands.len())
        .map(|i| {
            let (mut score, mut n) = (0.0, 0.0);
            for j in 0..hands.len() {
                if masks[i] & masks[j] != 0 {
                    continue;
                }
                n += 1.0;
                score += match strengths[i].cmp(&strengths[j]) {
                    std::cmp::Ordering::Greater => 1.0,
                    std::cmp::Ordering::Equal => 0.5,
                    std::cmp::Ordering::Less => 0.0,
                };
            }
            if n > 0.0 {
                score / n
            } else {
                0.5
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoldemBucketConfig {
    /// Private buckets per postflop round and board cluster.
    #[serde(default = "default_k")]
    pub private_buckets: u32,
    /// Public clusters per postflop round.
    #[serde(default = "default_clusters")]
    pub board_clusters: usize,
    /// Boards sampled to fit clusters when a round has too many to list.
    #[serde(default = "default_samples")]
    pub sample_boards: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_k() -> u32 {
    8
}

fn default_clusters() -> usize {
    4
}

fn default_samples() -> usize {
    5_000
}

impl Default for HoldemBucketConfig {
    fn default() -> Self {
        HoldemBucketConfig {
            private_buckets: default_k(),
            board_clusters: default_clusters(),
            sample_boards: default_samples(),
            seed: 0,
        }
    }
}

/// Hold'em information abstraction: the 169 preflop classes, then for each
/// later round a public board cluster and an equity-percentile bucket of the
/// private hand on the exact board.
pub struct HoldemBucketing {
    config: HoldemBucketConfig,
    deck: Vec<Card>,
    clusterings: Vec<Option<BoardClustering>>,
    cache: Mutex<HashMap<u64, Arc<HashMap<u64, u32>>>>,
}

const CACHE_LIMIT: usize = 4_096;

impl HoldemBucketing {
    pub fn new(spec: &GameSpec, config: HoldemBucketConfig) -> Result<Self> {
        if spec.private_cards != 2 {
            return Err(Error::InvalidConfig("hold'em bucketing needs two private cards".into()));
        }
        if config.private_buckets == 0 || config.board_clusters == 0 {
            return Err(Error::InvalidConfig("bucket and cluster counts must be positive".into()));
        }
        let deck = spec.deck();
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut clusterings = Vec::new();
        for round in 0..spec.num_rounds() {
            let len = spec.board_len(round);
            if len == 0 {
                clusterings.push(None);
                continue;
            }
            let boards = if len <= 3 {
                combinations(&deck, len)
            } else {
                (0..config.sample_boards)
                    .map(|_| {
                        let mut d = deck.clone();
                        d.partial_shuffle(&mut rng, len);
                        let mut b = d[..len].to_vec();
                        b.sort();
                        b
                    })
                    .collect()
            };
            let (c, _) = cluster_boards(&boards, config.board_clusters, config.seed.wrapping_add(round as u64))?;
            clusterings.push(Some(c));
        }
        Ok(HoldemBucketing { config, deck, clusterings, cache: Mutex::new(HashMap::new()) })
    }

    pub fn config(&self) -> &HoldemBucketConfig {
        &self.config
    }

    fn board_table(&self, board: &[Card]) -> Arc<HashMap<u64, u32>> {
        let key = CardSet::from_cards(board).0;
        if let Some(t) = self.cache.lock().unwrap().get(&key) {
            return t.clone();
        }
        let hands = private_hands(&self.deck, 2, CardSet(key));
        let equities = uniform_equities(board, &hands);
        let buckets = bucket_by_equity_percentiles(&equities, &[], self.config.private_buckets)
            .expect("non-empty hand list");
        let table: Arc<HashMap<u64, u32>> =
            Arc::new(hands.iter().zip(buckets).map(|(h, b)| (CardSet::from_cards(h).0, b)).collect());
        let mut cache = self.cache.lock().unwrap();
        if cache.len() >= CACHE_LIMIT {
            cache.clear();
        }
        cache.insert(key, table.clone());
        table
    }

    fn private_bucket(&self, round: usize, private: &[Card], board: &[Card]) -> u32 {
        if self.clusterings[round].is_none() {
            return preflop_class(private);
        }
        *self.board_table(board).get(&CardSet::from_cards(private).0).unwrap_or(&0)
    }
}

impl CardBucketing for HoldemBucketing {
    fn dims(&self, round: usize) -> (u32, u32) {
        match &self.clusterings[round] {
            None => (PREFLOP_CLASSES, 1),
            Some(c) => (self.config.private_buckets, c.len() as u32),
        }
    }

    fn bucket(&self, round: usize, private: &[Card], board: &[Card]) -> (u32, u32) {
        let public = self.clusterings[round].as_ref().map_or(0, |c| c.assign(board));
        (self.private_bucket(round, private, board), public)
    }

    fn private_label(&self, round: usize, bucket: u32) -> String {
        match self.clusterings[round] {
            None => preflop_label(bucket),
            Some(_) => format!("b{bucket}"),
        }
    }

    fn board_label(&self, round: usize, bucket: u32) -> String {
        match self.clusterings[round] {
            None => String::new(),
            Some(_) => format!("c{bucket}"),
        }
    }

    fn hash(&self) -> u64 {
        let text = serde_json::to_string(&(&self.config, &self.clusterings)).expect("serializes");
        stable_hash(text.as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cards::parse_cards;

    #[test]
    fn preflop_classes_are_lossless() {
        let deck = GameSpec::river_nlhe().deck();
        let hands = combinations(&deck, 2);
        let mut seen = std::collections::HashSet::new();
        for h in &hands {
            seen.insert(preflop_class(h));
        }
        assert_eq!(seen.len(), 169);
        assert!(seen.iter().all(|&c| c < 169));
        assert_eq!(preflop_label(preflop_class(&parse_cards("AsKs").unwrap())), "AKs");
        assert_eq!(preflop_label(preflop_class(&parse_cards("KdAs").unwrap())), "AKo");
        assert_eq!(preflop_label(preflop_class(&parse_cards("7h7c").unwrap())), "77");
    }

    #[test]
    fn worst_hands_share_lowest_bucket() {
        let board = parse_cards("JsTs4sKcQh").unwrap();
        let hands = private_hands(&GameSpec::river_nlhe().deck(), 2, CardSet::from_cards(&board));
        let eq = uniform_equities(&board, &hands);
        let b = bucket_by_equity_percentiles(&eq, &[], 8).unwrap();
        let idx = |s: &str| {
            let m = CardSet::from_cards(&parse_cards(s).unwrap());
            hands.iter().position(|h| CardSet::from_cards(h) == m).unwrap()
        };
        assert_eq!(b[idx("3c2c")], 0);
        assert_eq!(b[idx("3s2c")], 0);
        assert!(eq[idx("3c2c")] < 0.01);
    }

    #[test]
    fn river_bucketing_dims() {
        let spec = GameSpec::river_nlhe();
        let cfg = HoldemBucketConfig { sample_boards: 300, ..Default::default() };
        let hb = HoldemBucketing::new(&spec, cfg.clone()).unwrap();
        assert_eq!(hb.dims(0), (169, 1));
        assert_eq!(hb.dims(1), (8, 4));
        let board = parse_cards("JsTs4sKcQh").unwrap();
        let (pb, bb) = hb.bucket(1, &parse_cards("AsKs").unwrap(), &board);
        assert_eq!(pb, 7);
        assert!(bb < 4);
        let again = HoldemBucketing::new(&spec, cfg).unwrap();
        assert_eq!(hb.hash(), again.hash());
    }
}
