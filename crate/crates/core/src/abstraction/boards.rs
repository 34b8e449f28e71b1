use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cards::Card;
use crate::error::{Error, Result};

/// Feature vector of a public board: suit pattern, rank pattern,
/// pairedness, connectedness and high card, each scaled to about [0, 1].
pub fn board_features(board: &[Card]) -> Vec<f64> {
    let n = board.len().max(1) as f64;
    let mut suits = [0u8; 4];
    let mut counts = [0u8; 13];
    for c in board {
        suits[c.suit() as usize] += 1;
        counts[c.rank() as usize] += 1;
    }
    let mut suit_pattern = suits;
    suit_pattern.sort_unstable_by(|a, b| b.cmp(a));
    let mut ranks: Vec<u8> = board.iter().map(|c| c.rank()).collect();
    ranks.sort_unstable_by(|a, b| b.cmp(a));

    let mut f = Vec::with_capacity(12);
    f.extend(suit_pattern.iter().map(|&s| s as f64 / n));
    f.extend(ranks.iter().map(|&r| r as f64 / 12.0));
    let pairs = counts.iter().filter(|&&c| c == 2).count() as f64;
    let trips = counts.iter().filter(|&&c| c >= 3).count() as f64;
    f.push(pairs / 2.0);
    f.push(trips);
    f.push(connectedness(&counts) as f64 / n.min(5.0));
    f.push(ranks.first().map_or(0.0, |&r| r as f64 / 12.0));
    f
}

/// Most distinct ranks inside any five-rank straight window.
fn connectedness(counts: &[u8; 13]) -> usize {
    let present = |r: i32| {
        let r = if r < 0 { 12 } else { r };
        counts[r as usize] > 0
    };
    // windows from wheel (A-5) up to T-A
    (-1..=8).map(|lo| (lo..lo + 5).filter(|&r| present(r)).count()).max().unwrap_or(0)
}

/// Centroids of a board clustering; new boards go to the nearest centroid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoardClustering {
    pub centroids: Vec<Vec<f64>>,
}

impl BoardClustering {
    pub fn len(&self) -> usize {
        self.centroids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centroids.is_empty()
    }

    pub fn assign(&self, board: &[Card]) -> u32 {
        nearest(&self.centroids, &board_features(board)).0 as u32
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Nearest centroid, lowest index on ties.
fn nearest(centroids: &[Vec<f64>], x: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, c) in centroids.iter().enumerate() {
        let d = dist2(c, x);
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

/// Weighted k-means++ over board features. Identical feature vectors are
/// merged first and the distinct vectors sorted, so the result does not
/// depend on the order of `boards`. With `k` at least the number of distinct
/// vectors every vector gets its own cluster and the remaining ids stay empty.
pub fn cluster_boards(boards: &[Vec<Card>], k: usize, seed: u64) -> Result<(BoardClustering, Vec<u32>)> {
    if k == 0 {
        return Err(Error::InvalidConfig("cluster count must be at least 1".into()));
    }
    if boards.is_empty() {
        return Err(Error::InvalidConfig("no boards to cluster".into()));
    }
    let features: Vec<Vec<f64>> = boards.iter().map(|b| board_features(b)).collect();
    let mut distinct: Vec<Vec<f64>> = features.clone();
    distinct.sort_by(|a, b| cmp_vec(a, b));
    distinct.dedup();
    let weights: Vec<f64> = {
        let mut w = vec![0.0; distinct.len()];
        for f in &features {
            let i = distinct.binary_search_by(|d| cmp_vec(d, f)).expect("present");
            w[i] += 1.0;
        }
        w
    };

    let centroids = if k >= distinct.len() {
        distinct.clone()
    } else {
        kmeans(&distinct, &weights, k, seed)
    };
    let clustering = BoardClustering { centroids };
    let labels = features.iter().map(|f| nearest(&clustering.centroids, f).0 as u32).collect();
    Ok((clustering, labels))
}

fn cmp_vec(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

fn weighted_pick(rng: &mut ChaCha8Rng, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return 0;
    }
    let mut u = rng.gen::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        if u < w {
            return i;
        }
        u -= w;
    }
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

fn kmeans(points: &[Vec<f64>], weights: &[f64], k: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = vec![points[weighted_pick(&mut rng, weights)].clone()];
    while centroids.len() < k {
        let d: Vec<f64> = points
            .iter()
            .zip(weights)
            .map(|(p, w)| w * nearest(&centroids, p).1)
            .collect();
        centroids.push(points[weighted_pick(&mut rng, &d)].clone());
    }
    let dim = points[0].len();
    let mut labels = vec![usize::MAX; points.len()];
    for _ in 0..100 {
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let c = nearest(&centroids, p).0;
            if labels[i] != c {
                labels[i] = c;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![vec![0.0; dim]; k];
        let mut mass = vec![0.0; k];
        for (i, p) in points.iter().enumerate() {
            mass[labels[i]] += weights[i];
            for (s, x) in sums[labels[i]].iter_mut().zip(p) {
                *s += weights[i] * x;
            }
        }
        for c in 0..k {
            if mass[c] > 0.0 {
                centroids[c] = sums[c].iter().map(|s| s / mass[c]).collect();
            }
        }
    }
    centroids
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cards::parse_cards;

    fn boards(texts: &[&str]) -> Vec<Vec<Card>> {
        texts.iter().map(|t| parse_cards(t).unwrap()).collect()
    }

    #[test]
    fn monotone_and_rainbow_separate() {
        let (_, labels) = cluster_boards(&boards(&["AsKsQs", "2c7d9h"]), 2, 1).unwrap();
        assert_ne!(labels[0], labels[1]);
    }

    #[test]
    fn identical_features_share_cluster() {
        // same ranks, suits permuted: same feature vector
        let b = boards(&["AsKsQs", "AhKhQh", "2c7d9h", "5c6c7d", "9s9d2h"]);
        let (_, labels) = cluster_boards(&b, 2, 3).unwrap();
        assert_eq!(labels[0], labels[1]);
    }

    #[test]
    fn k_equal_to_boards_gives_singletons() {
        let b = boards(&["AsKsQs", "2c7d9h", "5c6c7d", "9s9d2h"]);
        let (c, labels) = cluster_boards(&b, 4, 3).unwrap();
        let mut l = labels.clone();
        l.sort_unstable();
        l.dedup();
        assert_eq!(l.len(), 4);
        assert_eq!(c.assign(&b[2]), labels[2]);
    }

    #[test]
    fn wheel_counts_as_connected() {
        let f = board_features(&parse_cards("As2c3d").unwrap());
        let g = board_features(&parse_cards("As7c2d").unwrap());
        assert!(f[f.len() - 2] > g[g.len() - 2]);
    }
}
