use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::duplicate::{bb_per_100, mean_interval};
use super::record::HandRecord;
use crate::error::Result;
use crate::game::Player;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HandOffTree {
    pub hand_id: u64,
    pub player: Player,
    pub max_divergence: u32,
    pub translation_events: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OffTreeReport {
    pub hands: usize,
    pub hands_with_divergence: usize,
    pub translation_events: usize,
    /// Randomized events by mapping-down probability, in tenths.
    pub f_histogram: [usize; 10],
    /// Events where the bet lay outside every grid size.
    pub extreme_events: usize,
    /// Largest divergences first, at most `worst_limit` entries.
    pub worst: Vec<HandOffTree>,
}

/// Summarizes pot misperception over `records`.
pub fn off_tree_report(records: &[HandRecord], worst_limit: usize) -> OffTreeReport {
    let mut per_hand = Vec::new();
    let mut f_histogram = [0usize; 10];
    let mut events = 0;
    let mut extreme = 0;
    for r in records {
        for p in Player::BOTH {
            let mut max = 0;
            let mut count = 0;
            let mut any = false;
            for d in r.decisions.iter().filter(|d| d.player == p) {
                let Some(g) = &d.diagnostics else { continue };
                any = true;
                max = max.max(g.divergence);
                count += g.translations.len();
                for e in &g.translations {
                    match e.f {
                        Some(f) => f_histogram[((f * 10.0) as usize).min(9)] += 1,
                        None => extreme += 1,
                    }
                }
            }
            events += count;
            if any {
                per_hand.push(HandOffTree { hand_id: r.hand_id, player: p, max_divergence: max, translation_events: count });
            }
        }
    }
    let hands_with_divergence = per_hand.iter().filter(|h| h.max_divergence > 0).count();
    per_hand.sort_by(|a, b| b.max_divergence.cmp(&a.max_divergence).then(a.hand_id.cmp(&b.hand_id)));
    per_hand.retain(|h| h.max_divergence > 0);
    per_hand.truncate(worst_limit);
    OffTreeReport {
        hands: records.len(),
        hands_with_divergence,
        translation_events: events,
        f_histogram,
        extreme_events: extreme,
        worst: per_hand,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentLine {
    pub label: String,
    pub hands: usize,
    pub total: i64,
    pub bb_per_100: f64,
    /// 95% normal interval on BB/100 from per-pair results.
    pub ci95: (f64, f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub hands: usize,
    pub pairs: usize,
    pub agents: Vec<AgentLine>,
    pub forfeits: usize,
    /// Pairs whose two plays do not share cards with seats swapped.
    pub broken_pairs: usize,
    pub off_tree: OffTreeReport,
}

/// Results per agent label from a hand history.
pub fn match_report(records: &[HandRecord], big_blind: u32) -> Result<MatchReport> {
    let mut by_pair: BTreeMap<u64, Vec<&HandRecord>> = BTreeMap::new();
    for r in records {
        by_pair.entry(r.pair).or_default().push(r);
    }
    let broken_pairs = by_pair
        .values()
        .filter(|v| {
            !(v.len() == 2
                && v[0].private == v[1].private
                && v[0].board == v[1].board
                && v[0].seats[0] == v[1].seats[1]
                && v[0].seats[1] == v[1].seats[0])
        })
        .count();

    let mut per_label: BTreeMap<String, BTreeMap<u64, i64>> = BTreeMap::new();
    let mut hands: BTreeMap<String, usize> = BTreeMap::new();
    for r in records {
        for p in Player::BOTH {
            let label = &r.seats[p.index()];
            let won = if p == Player::P1 { r.result_p1 } else { -r.result_p1 };
            *per_label.entry(label.clone()).or_default().entry(r.pair).or_default() += won;
            *hands.entry(label.clone()).or_default() += 1;
        }
    }
    let mut agents = Vec::new();
    for (label, pairs) in per_label {
        let n = hands[&label];
        let total: i64 = pairs.values().sum();
        let hands_per_pair = n as f64 / pairs.len() as f64;
        let rates: Vec<f64> = pairs.values().map(|&c| c as f64 / big_blind as f64 / hands_per_pair * 100.0).collect();
        let (_, ci95) = mean_interval(&rates, 0.95);
        agents.push(AgentLine { bb_per_100: bb_per_100(total, n as u64, big_blind)?, label, hands: n, total, ci95 });
    }
    Ok(MatchReport {
        hands: records.len(),
        pairs: by_pair.len(),
        agents,
        forfeits: records.iter().filter(|r| r.forfeit.is_some()).count(),
        broken_pairs,
        off_tree: off_tree_report(records, 10),
    })
}
