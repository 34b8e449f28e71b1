use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::cards::{Card, CardSet};
use crate::error::{Error, Result};

/// Equities closer than this are treated as equal and always share a bucket.
pub const EQUITY_TIE: f64 = 1e-12;

/// Splits hands into at most `k` contiguous equity-percentile buckets of
/// near-equal probability mass. Equal equities always share a bucket and ids
/// are dense from 0, so fewer than `k` buckets appear when there are fewer
/// distinct equities (in which case the bucketing is lossless).
///
/// `weights` may be empty for equal weights.
pub fn bucket_by_equity_percentiles(equities: &[f64], weights: &[f64], k: u32) -> Result<Vec<u32>> {
    if k == 0 {
        return Err(Error::InvalidConfig("bucket count must be at least 1".into()));
    }
    if equities.is_empty() {
        return Err(Error::InvalidConfig("no hands to bucket".into()));
    }
    if !weights.is_empty() && weights.len() != equities.len() {
        return Err(Error::InvalidConfig("weights and equities differ in length".into()));
    }
    if let Some(bad) = equities.iter().find(|e| !(0.0..=1.0).contains(*e)) {
        return Err(Error::InvalidConfig(format!("equity {bad} outside [0, 1]")));
    }
    let total_weight: f64 = weights.iter().sum();
    let weight = |i: usize| {
        if weights.is_empty() || total_weight <= 0.0 {
            1.0
        } else {
            weights[i].max(0.0)
        }
    };

    let mut order: Vec<usize> = (0..equities.len()).collect();
    order.sort_by(|&a, &b| equities[a].total_cmp(&equities[b]).then(a.cmp(&b)));

    // groups of equal equity: (first index into `order`, end, mass)
    let mut groups: Vec<(usize, usize, f64)> = Vec::new();
    for (pos, &i) in order.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if equities[i] - equities[order[g.0]] <= EQUITY_TIE => {
                g.1 = pos + 1;
                g.2 += weight(i);
            }
            _ => groups.push((pos, pos + 1, weight(i))),
        }
    }
    let g_count = groups.len();
    let m = (k as usize).min(g_count);
    let total: f64 = groups.iter().map(|g| g.2).sum();

    let mut out = vec![0u32; equities.len()];
    let mut prev = 0usize;
    let mut cumulative = 0.0;
    let mut labels = Vec::with_capacity(g_count);
    for (gi, g) in groups.iter().enumerate() {
        let mid = cumulative + g.2 / 2.0;
        cumulative += g.2;
        let raw = if total > 0.0 { ((m as f64) * mid / total).floor() as usize } else { gi * m / g_count };
        // never skip a bucket, and leave enough groups to fill the rest
        let floor = (m + gi).saturating_sub(g_count);
        let b = raw.min(m - 1).max(prev).max(floor).min(if gi == 0 { 0 } else { prev + 1 });
        labels.push(b);
        prev = b;
    }
    for (g, &b) in groups.iter().zip(&labels) {
        for &i in &order[g.0..g.1] {
            out[i] = b as u32;
        }
    }
    Ok(out)
}

/// Bucket assignment for a set of private hands.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BucketMap {
    pub hands: Vec<Vec<Card>>,
    pub buckets: Vec<u32>,
    pub count: u32,
    #[serde(skip)]
    index: HashMap<u64, usize>,
}

impl BucketMap {
    pub fn new(hands: Vec<Vec<Card>>, buckets: Vec<u32>) -> Self {
        assert_eq!(hands.len(), buckets.len());
        let count = buckets.iter().max().map_or(0, |b| b + 1);
        let index = hands.iter().enumerate().map(|(i, h)| (CardSet::from_cards(h).0, i)).collect();
        BucketMap { hands, buckets, count, index }
    }

    pub fn get(&self, hand: &[Card]) -> Option<u32> {
        let key = CardSet::from_cards(hand).0;
        if self.index.is_empty() && !self.hands.is_empty() {
            return self.hands.iter().position(|h| CardSet::from_cards(h).0 == key).map(|i| self.buckets[i]);
        }
        self.index.get(&key).map(|&i| self.buckets[i])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_bucket() {
        assert_eq!(bucket_by_equity_percentiles(&[0.3, 0.1, 0.9], &[], 1).unwrap(), vec![0, 0, 0]);
    }

    #[test]
    fn split_in_two() {
        let b = bucket_by_equity_percentiles(&[0.10, 0.20, 0.90, 0.95], &[], 2).unwrap();
        assert_eq!(b, vec![0, 0, 1, 1]);
    }

    #[test]
    fn lossless_when_k_covers_distinct_values() {
        let eq = [0.5, 0.1, 0.5, 0.7, 0.1];
        let b = bucket_by_equity_percentiles(&eq, &[], 8).unwrap();
        assert_eq!(b, vec![1, 0, 1, 2, 0]);
    }

    #[test]
    fn heavy_group_does_not_leave_gaps() {
        let eq = [0.1, 0.2, 0.3, 0.4];
        let w = [100.0, 1.0, 1.0, 1.0];
        let b = bucket_by_equity_percentiles(&eq, &w, 3).unwrap();
        assert_eq!(b, vec![0, 1, 2, 2]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(bucket_by_equity_percentiles(&[0.5], &[], 0).is_err());
        assert!(bucket_by_equity_percentiles(&[], &[], 2).is_err());
        assert!(bucket_by_equity_percentiles(&[1.5], &[], 2).is_err());
    }
}
