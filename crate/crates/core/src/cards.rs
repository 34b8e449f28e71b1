//! Card encoding shared by every game preset.
//!
//! A card is an index in `0..52`, rank-major: `rank * 4 + suit`, where rank 0 is
//! a deuce and rank 12 an ace, and suits are ordered clubs, diamonds, hearts,
//! spades. Small decks (Kuhn, Leduc) use a subset of the same indices so that
//! every log prints cards the same way ("As", "Td", ...).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

pub const NUM_RANKS: u8 = 13;
pub const NUM_SUITS: u8 = 4;

const RANK_CHARS: &[u8; 13] = b"23456789TJQKA";
const SUIT_CHARS: &[u8; 4] = b"cdhs";

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Card(u8);

impl Card {
    pub fn new(rank: u8, suit: u8) -> Self {
        debug_assert!(rank < NUM_RANKS && suit < NUM_SUITS);
        Card(rank * NUM_SUITS + suit)
    }

    pub fn from_index(index: u8) -> Result<Self, Error> {
        if index < 52 {
            Ok(Card(index))
        } else {
            Err(Error::Parse(format!("card index {index} out of range")))
        }
    }

    pub fn index(self) -> u8 {
        self.0
    }

    pub fn rank(self) -> u8 {
        self.0 / NUM_SUITS
    }

    pub fn suit(self) -> u8 {
        self.0 % NUM_SUITS
    }

    pub fn mask(self) -> u64 {
        1u64 << self.0
    }
}

pub fn rank_char(rank: u8) -> char {
    RANK_CHARS[rank as usize] as char
}

pub fn parse_rank(c: char) -> Option<u8> {
    RANK_CHARS
        .iter()
        .position(|&r| r as char == c.to_ascii_uppercase())
        .map(|p| p as u8)
}

fn parse_suit(c: char) -> Option<u8> {
    SUIT_CHARS
        .iter()
        .position(|&s| s as char == c.to_ascii_lowercase())
        .map(|p| p as u8)
}

impl fmt::Display for Card {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}",
            rank_char(self.rank()),
            SUIT_CHARS[self.suit() as usize] as char
        )
    }
}

impl fmt::Debug for Card {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Card {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.chars();
        match (chars.next(), chars.next(), chars.next()) {
            (Some(r), Some(su), None) => match (parse_rank(r), parse_suit(su)) {
                (Some(rank), Some(suit)) => Ok(Card::new(rank, suit)),
                _ => Err(Error::Parse(format!("bad card {s:?}"))),
            },
            _ => Err(Error::Parse(format!("bad card {s:?}"))),
        }
    }
}

impl Serialize for Card {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Card {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses concatenated card text such as `"JsTs4sKcQh"`.
pub fn parse_cards(s: &str) -> Result<Vec<Card>, Error> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if !s.len().is_multiple_of(2) {
        return Err(Error::Parse(format!("odd-length card string {s:?}")));
    }
    (0..s.len())
        .step_by(2)
        .map(|i| s[i..i + 2].parse())
        .collect()
}

pub fn format_cards(cards: &[Card]) -> String {
    cards.iter().map(|c| c.to_string()).collect()
}

/// Bit set over the 52 card indices.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, Debug)]
pub struct CardSet(pub u64);

impl CardSet {
    pub fn from_cards(cards: &[Card]) -> Self {
        CardSet(cards.iter().fold(0, |m, c| m | c.mask()))
    }

    pub fn contains(self, card: Card) -> bool {
        self.0 & card.mask() != 0
    }

    pub fn intersects(self, other: CardSet) -> bool {
        self.0 & other.0 != 0
    }

    pub fn union(self, other: CardSet) -> CardSet {
        CardSet(self.0 | other.0)
    }

    pub fn insert(&mut self, card: Card) {
        self.0 |= card.mask();
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }
}

/// Returns an error naming the first card that appears twice.
pub fn check_disjoint(groups: &[&[Card]]) -> Result<CardSet, Error> {
    let mut seen = CardSet::default();
    for group in groups {
        for &card in *group {
            if seen.contains(card) {
                return Err(Error::DuplicateCard(card.to_string()));
            }
            seen.insert(card);
        }
    }
    Ok(seen)
}

/// All `k`-subsets of `cards`, each in ascending input order.
pub fn combinations(cards: &[Card], k: usize) -> Vec<Vec<Card>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(cards: &[Card], k: usize, start: usize, current: &mut Vec<Card>, out: &mut Vec<Vec<Card>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        let need = k - current.len();
        for i in start..cards.len() {
            if cards.len() - i < need {
                break;
            }
            current.push(cards[i]);
            rec(cards, k, i + 1, current, out);
            current.pop();
        }
    }
    if k <= cards.len() {
        rec(cards, k, 0, &mut current, &mut out);
    }
    out
}
