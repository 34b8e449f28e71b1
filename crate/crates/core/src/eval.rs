//! Showdown strength for five to seven 52-deck cards.
//!
//! Strength is a `u32` where larger is better: the hand category sits in the
//! top bits and up to five kicker ranks follow, four bits each.

use crate::cards::Card;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Category {
    HighCard = 0,
    Pair,
    TwoPair,
    Trips,
    Straight,
    Flush,
    FullHouse,
    Quads,
    StraightFlush,
}

fn pack(category: Category, kickers: &[u8]) -> u32 {
    let mut value = (category as u32) << 20;
    for (i, &k) in kickers.iter().take(5).enumerate() {
        value |= (k as u32) << (16 - 4 * i);
    }
    value
}

pub fn category(strength: u32) -> Category {
    match strength >> 20 {
        0 => Category::HighCard,
        1 => Category::Pair,
        2 => Category::TwoPair,
        3 => Category::Trips,
        4 => Category::Straight,
        5 => Category::Flush,
        6 => Category::FullHouse,
        7 => Category::Quads,
        _ => Category::StraightFlush,
    }
}

/// Highest rank of a five-long run in a 13-bit rank mask, wheel included.
fn straight_top(mask: u16) -> Option<u8> {
    for top in (4..13).rev() {
        let run = 0b1_1111u16 << (top - 4);
        if mask & run == run {
            return Some(top as u8);
        }
    }
    // A-2-3-4-5
    if mask & 0b1_0000_0000_1111 == 0b1_0000_0000_1111 {
        return Some(3);
    }
    None
}

fn top_ranks(mask: u16, n: usize) -> Vec<u8> {
    (0..13u8).rev().filter(|r| mask & (1 << r) != 0).take(n).collect()
}

/// Best five-card strength among `cards` (5 to 7 cards).
pub fn strength(cards: &[Card]) -> u32 {
    debug_assert!((5..=7).contains(&cards.len()));
    let mut counts = [0u8; 13];
    let mut suit_masks = [0u16; 4];
    let mut rank_mask = 0u16;
    for c in cards {
        counts[c.rank() as usize] += 1;
        suit_masks[c.suit() as usize] |= 1 << c.rank();
        rank_mask |= 1 << c.rank();
    }

    if let Some(flush_mask) = suit_masks.iter().copied().find(|m| m.count_ones() >= 5) {
        if let Some(top) = straight_top(flush_mask) {
            return pack(Category::StraightFlush, &[top]);
        }
        // With at most seven cards a flush rules out quads and full houses.
        return pack(Category::Flush, &top_ranks(flush_mask, 5));
    }
    strength_no_flush(&counts, rank_mask)
}

fn strength_no_flush(counts: &[u8; 13], rank_mask: u16) -> u32 {
    let mut quads = None;
    let mut trips: Vec<u8> = Vec::new();
    let mut pairs: Vec<u8> = Vec::new();
    for r in (0..13u8).rev() {
        match counts[r as usize] {
            4 => quads = Some(r),
            3 => trips.push(r),
            2 => pairs.push(r),
            _ => {}
        }
    }
    if let Some(q) = quads {
        let kicker = top_ranks(rank_mask & !(1 << q), 1);
        return pack(Category::Quads, &[q, kicker[0]]);
    }
    if !trips.is_empty() {
        let t = trips[0];
        // second trips counts as the pair of a full house
        let pair = trips.get(1).copied().into_iter().chain(pairs.iter().copied()).max();
        if let Some(p) = pair {
            return pack(Category::FullHouse, &[t, p]);
        }
    }
    if let Some(top) = straight_top(rank_mask) {
        return pack(Category::Straight, &[top]);
    }
    if let Some(&t) = trips.first() {
        let kickers = top_ranks(rank_mask & !(1 << t), 2);
        return pack(Category::Trips, &[t, kickers[0], kickers[1]]);
    }
    if pairs.len() >= 2 {
        let (hi, lo) = (pairs[0], pairs[1]);
        let kicker = top_ranks(rank_mask & !(1 << hi) & !(1 << lo), 1);
        return pack(Category::TwoPair, &[hi, lo, kicker[0]]);
    }
    if let Some(&p) = pairs.first() {
        let kickers = top_ranks(rank_mask & !(1 << p), 3);
        return pack(Category::Pair, &[p, kickers[0], kickers[1], kickers[2]]);
    }
    pack(Category::HighCard, &top_ranks(rank_mask, 5))
}
