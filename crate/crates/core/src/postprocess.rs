//! Thresholding and purification of strategies, and the matrix-game
//! purification experiment.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::equilibrium::{solve_matrix_game, StrategyTable};
use crate::error::{Error, Result};

/// Zeroes entries below `theta` and renormalizes. If every entry is below
/// `theta` the largest one (lowest index on ties) keeps all the mass.
pub fn threshold_and_renormalize(v: &[f64], theta: f64) -> Result<Vec<f64>> {
    if !(0.0..1.0).contains(&theta) {
        return Err(Error::BadThreshold(theta));
    }
    let kept: Vec<f64> = v.iter().map(|&p| if p < theta { 0.0 } else { p }).collect();
    let total: f64 = kept.iter().sum();
    if total > 0.0 {
        Ok(kept.iter().map(|p| p / total).collect())
    } else {
        Ok(purify(v))
    }
}

/// One-hot vector on the most likely action, lowest index on ties.
pub fn purify(v: &[f64]) -> Vec<f64> {
    let mut best = 0;
    for (i, &p) in v.iter().enumerate() {
        if p > v[best] {
            best = i;
        }
    }
    let mut out = vec![0.0; v.len()];
    if !out.is_empty() {
        out[best] = 1.0;
    }
    out
}

/// Per-round thresholds; rounds past the end use 0.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSchedule {
    pub thresholds: Vec<f64>,
}

impl ThresholdSchedule {
    pub fn new(thresholds: Vec<f64>) -> Result<Self> {
        if let Some(&t) = thresholds.iter().find(|t| !(0.0..1.0).contains(*t)) {
            return Err(Error::BadThreshold(t));
        }
        Ok(ThresholdSchedule { thresholds })
    }

    pub fn theta(&self, round: usize) -> f64 {
        self.thresholds.get(round).copied().unwrap_or(0.0)
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.thresholds.windows(2).all(|w| w[0] <= w[1])
    }
}

/// Thresholds every infoset by the round in its key; the schedule is
/// recorded in the table metadata.
pub fn apply_schedule(table: &StrategyTable, schedule: &ThresholdSchedule) -> Result<StrategyTable> {
    let mut out = table.clone();
    for (key, v) in out.iter_mut() {
        let theta = schedule.theta(key.round());
        if theta > 0.0 {
            *v = threshold_and_renormalize(v, theta)?;
        }
    }
    out.meta.schedule = Some(schedule.thresholds.clone());
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PurificationSummary {
    pub n_games: usize,
    pub mean_unpurified: f64,
    pub mean_purified: f64,
    /// Mean of purified minus unpurified payoff.
    pub mean_difference: f64,
    pub std_error: f64,
    pub ci95: (f64, f64),
}

/// One trial: payoffs of the abstract row strategy, unpurified and
/// purified, against the full game's equilibrium column strategy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PurificationTrial {
    pub unpurified: f64,
    pub purified: f64,
}

pub fn purification_trial<R: Rng + ?Sized>(rng: &mut R) -> Result<PurificationTrial> {
    let a: Vec<Vec<f64>> = (0..4).map(|_| (0..4).map(|_| rng.gen::<f64>()).collect()).collect();
    let mut rows = sample(rng, 4, 3).into_vec();
    let mut cols = sample(rng, 4, 3).into_vec();
    rows.sort_unstable();
    cols.sort_unstable();
    let sub: Vec<Vec<f64>> = rows.iter().map(|&i| cols.iter().map(|&j| a[i][j]).collect()).collect();
    let (_, abstract_rows, _) = solve_matrix_game(&sub)?;
    let (_, _, full_cols) = solve_matrix_game(&a)?;
    let payoff = |mix: &[f64]| -> f64 {
        rows.iter()
            .zip(mix)
            .map(|(&i, &p)| p * a[i].iter().zip(&full_cols).map(|(x, q)| x * q).sum::<f64>())
            .sum()
    };
    Ok(PurificationTrial { unpurified: payoff(&abstract_rows), purified: payoff(&purify(&abstract_rows)) })
}

/// Runs `n_games` independent trials, trial `t` drawing from its own stream
/// of the seeded generator.
pub fn matrix_purification_trials(n_games: usize, seed: u64) -> Result<Vec<PurificationTrial>> {
    if n_games == 0 {
        return Err(Error::InvalidConfig("n_games must be at least 1".into()));
    }
    (0..n_games)
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            purification_trial(&mut rng)
        })
        .collect()
}

pub fn summarize(trials: &[PurificationTrial]) -> PurificationSummary {
    let n = trials.len() as f64;
    let diffs: Vec<f64> = trials.iter().map(|t| t.purified - t.unpurified).collect();
    let mean = diffs.iter().sum::<f64>() / n;
    let var = if trials.len() > 1 { diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    let se = (var / n).sqrt();
    let z = Normal::new(0.0, 1.0).expect("standard normal").inverse_cdf(0.975);
    PurificationSummary {
        n_games: trials.len(),
        mean_unpurified: trials.iter().map(|t| t.unpurified).sum::<f64>() / n,
        mean_purified: trials.iter().map(|t| t.purified).sum::<f64>() / n,
        mean_difference: mean,
        std_error: se,
        ci95: (mean - z * se, mean + z * se),
    }
}

pub fn matrix_purification_experiment(n_games: usize, seed: u64) -> Result<PurificationSummary> {
    Ok(summarize(&matrix_purification_trials(n_games, seed)?))
}
