//! Rules of a parameterized heads-up betting game and the built-in presets.
//!
//! A spec can also be loaded from a TOML file:
//!
//! ```toml
//! name = "leduc"
//! ranks = "JQK"          # ranks present in the deck, low to high
//! suits = "hs"           # subset of "cdhs"
//! private_cards = 1      # hole cards per player, dealt before round 0
//! board_cards = [0, 1]   # public cards revealed at the start of each round
//! ante = 1               # paid straight into the pot
//! small_blind = 0        # posted as round-0 commitments
//! big_blind = 0
//! starting_stack = 100   # reset every hand
//! first_to_act = [0, 0]  # seat index per round
//! showdown = "leduc"     # "high-card" | "leduc" | "holdem"
//!
//! [betting]
//! kind = "fixed-limit"   # or "no-limit"
//! raise_sizes = [2, 4]   # fixed-limit only: increment per round
//! max_raises = 2         # fixed-limit only: bets + raises per round
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cards::{parse_rank, rank_char, Card};
use crate::error::{Error, Result};
use crate::game::Player;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum BettingRule {
    /// Raise-to anywhere between the minimum raise and all-in.
    NoLimit,
    /// One fixed increment per round, capped number of bets/raises per round.
    FixedLimit { raise_sizes: Vec<u32>, max_raises: u8 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShowdownRule {
    /// Higher private rank wins (Kuhn).
    HighCard,
    /// Pairing the board wins, otherwise higher private rank (Leduc).
    Leduc,
    /// Best five of seven cards.
    Holdem,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameSpec {
    pub name: String,
    #[serde(with = "rank_string")]
    pub ranks: Vec<u8>,
    #[serde(with = "suit_string")]
    pub suits: Vec<u8>,
    pub private_cards: u8,
    pub board_cards: Vec<u8>,
    #[serde(default)]
    pub ante: u32,
    #[serde(default)]
    pub small_blind: u32,
    #[serde(default)]
    pub big_blind: u32,
    pub starting_stack: u32,
    pub first_to_act: Vec<Player>,
    pub showdown: ShowdownRule,
    pub betting: BettingRule,
}

mod rank_string {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(ranks: &[u8], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(&ranks.iter().map(|&r| rank_char(r)).collect::<String>())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<u8>, D::Error> {
        let text = String::deserialize(d)?;
        text.chars()
            .map(|c| parse_rank(c).ok_or_else(|| serde::de::Error::custom(format!("bad rank {c:?}"))))
            .collect()
    }
}

mod suit_string {
    use super::*;
    use serde::{Deserializer, Serializer};

    const SUITS: &str = "cdhs";

    pub fn serialize<S: Serializer>(suits: &[u8], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(&suits.iter().map(|&i| SUITS.as_bytes()[i as usize] as char).collect::<String>())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<u8>, D::Error> {
        let text = String::deserialize(d)?;
        text.chars()
            .map(|c| {
                SUITS
                    .find(c)
                    .map(|i| i as u8)
                    .ok_or_else(|| serde::de::Error::custom(format!("bad suit {c:?}")))
            })
            .collect()
    }
}

impl GameSpec {
    pub fn kuhn() -> Self {
        GameSpec {
            name: "kuhn".into(),
            ranks: vec![9, 10, 11],
            suits: vec![3],
            private_cards: 1,
            board_cards: vec![0],
            ante: 1,
            small_blind: 0,
            big_blind: 0,
            starting_stack: 2,
            first_to_act: vec![Player::P1],
            showdown: ShowdownRule::HighCard,
            betting: BettingRule::FixedLimit { raise_sizes: vec![1], max_raises: 1 },
        }
    }

    pub fn leduc() -> Self {
        GameSpec {
            name: "leduc".into(),
            ranks: vec![9, 10, 11],
            suits: vec![2, 3],
            private_cards: 1,
            board_cards: vec![0, 1],
            ante: 1,
            small_blind: 0,
            big_blind: 0,
            starting_stack: 100,
            first_to_act: vec![Player::P1, Player::P1],
            showdown: ShowdownRule::Leduc,
            betting: BettingRule::FixedLimit { raise_sizes: vec![2, 4], max_raises: 2 },
        }
    }

    /// Full four-round no-limit hold'em with a shallow 20 big blind stack.
    pub fn mini_nlhe() -> Self {
        GameSpec {
            name: "mini-nlhe".into(),
            ranks: (0..13).collect(),
            suits: (0..4).collect(),
            private_cards: 2,
            board_cards: vec![0, 3, 1, 1],
            ante: 0,
            small_blind: 50,
            big_blind: 100,
            starting_stack: 2_000,
            first_to_act: vec![Player::P1, Player::P2, Player::P2, Player::P2],
            showdown: ShowdownRule::Holdem,
            betting: BettingRule::NoLimit,
        }
    }

    /// No-limit hold'em at 50/100 blinds and 200 big blind stacks, with the
    /// whole board revealed at once: a preflop round followed by the river.
    pub fn river_nlhe() -> Self {
        GameSpec {
            name: "river-nlhe".into(),
            ranks: (0..13).collect(),
            suits: (0..4).collect(),
            private_cards: 2,
            board_cards: vec![0, 5],
            ante: 0,
            small_blind: 50,
            big_blind: 100,
            starting_stack: 20_000,
            first_to_act: vec![Player::P1, Player::P2],
            showdown: ShowdownRule::Holdem,
            betting: BettingRule::NoLimit,
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "kuhn" => Ok(Self::kuhn()),
            "leduc" => Ok(Self::leduc()),
            "mini-nlhe" => Ok(Self::mini_nlhe()),
            "river-nlhe" => Ok(Self::river_nlhe()),
            other => Err(Error::InvalidSpec(format!("unknown preset {other:?}"))),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: GameSpec = toml::from_str(text).map_err(|e| Error::InvalidSpec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if self.board_cards.is_empty() {
            return bad("num_rounds must be at least 1".into());
        }
        if self.first_to_act.len() != self.board_cards.len() {
            return bad("first_to_act needs one entry per round".into());
        }
        if self.ranks.is_empty() || self.suits.is_empty() {
            return bad("empty deck".into());
        }
        let blinds = self.small_blind > 0 || self.big_blind > 0;
        if blinds {
            if !(self.starting_stack >= self.big_blind && self.big_blind >= self.small_blind && self.small_blind > 0) {
                return bad("need starting_stack >= big_blind >= small_blind > 0".into());
            }
        } else if self.ante == 0 {
            return bad("game needs an ante or blinds".into());
        }
        if self.starting_stack < self.ante.max(1) {
            return bad("starting_stack below the forced bet".into());
        }
        let cards_needed = 2 * self.private_cards as usize
            + self.board_cards.iter().map(|&b| b as usize).sum::<usize>();
        if cards_needed > self.deck().len() {
            return bad(format!("deck of {} cannot deal {cards_needed} cards", self.deck().len()));
        }
        if self.showdown == ShowdownRule::Holdem
            && (self.private_cards as usize + self.board_cards.iter().map(|&b| b as usize).sum::<usize>()) < 5
        {
            return bad("hold'em showdown needs at least five cards per player".into());
        }
        match &self.betting {
            BettingRule::NoLimit => {
                if self.big_blind == 0 && self.ante == 0 {
                    return bad("no-limit needs a minimum bet unit".into());
                }
            }
            BettingRule::FixedLimit { raise_sizes, .. } => {
                if raise_sizes.len() != self.board_cards.len() {
                    return bad("fixed-limit needs one raise size per round".into());
                }
            }
        }
        Ok(())
    }

    pub fn num_rounds(&self) -> usize {
        self.board_cards.len()
    }

    pub fn deck(&self) -> Vec<Card> {
        let mut deck: Vec<Card> = self
            .ranks
            .iter()
            .flat_map(|&r| self.suits.iter().map(move |&s| Card::new(r, s)))
            .collect();
        deck.sort();
        deck
    }

    /// Board cards visible during `round`.
    pub fn board_len(&self, round: usize) -> usize {
        self.board_cards[..=round].iter().map(|&b| b as usize).sum()
    }

    /// Chips that count as one unit for win-rate reporting.
    pub fn stake_unit(&self) -> u32 {
        if self.big_blind > 0 {
            self.big_blind
        } else {
            self.ante
        }
    }

    /// Smallest legal no-limit bet when nobody has bet this round.
    pub fn min_bet(&self) -> u32 {
        self.stake_unit().max(1)
    }

    /// Stable 64-bit digest of the rules, used to tie artifacts to a game.
    pub fn hash(&self) -> u64 {
        stable_hash(&serde_json::to_vec(self).expect("spec serializes"))
    }
}

pub(crate) fn stable_hash(bytes: &[u8]) -> u64 {
    let digest = Sha256::digest(bytes);
    u64::from_le_bytes(digest[..8].try_into().unwrap())
}
