use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, FisherSnedecor, Normal};

use super::agent::{Agent, Observation};
use super::record::{DecisionLog, Forfeit, HandRecord, SCHEMA_VERSION};
use crate::cards::format_cards;
use crate::error::{Error, Result};
use crate::game::{stable_hash, BettingState, Deal, GameSpec, Phase, Player, TerminalReason};

/// Independent generator for one purpose, derived from the match seed.
pub fn derive_rng(seed: u64, tag: &str, indices: &[u64]) -> ChaCha8Rng {
    let mut bytes = seed.to_le_bytes().to_vec();
    bytes.extend_from_slice(tag.as_bytes());
    for i in indices {
        bytes.extend_from_slice(&i.to_le_bytes());
    }
    ChaCha8Rng::seed_from_u64(stable_hash(&bytes))
}

/// Identifies a hand within a match.
#[derive(Clone, Copy, Debug)]
pub struct HandId {
    pub hand_id: u64,
    pub pair: u64,
    pub play: u8,
    pub a_seat: Player,
}

/// Plays one hand. `agents` are indexed by seat. An agent that errors or
/// sends an illegal action folds on the spot.
pub fn play_hand(
    spec: &Arc<GameSpec>,
    deal: &Deal,
    agents: [&mut dyn Agent; 2],
    rngs: [ChaCha8Rng; 2],
    id: HandId,
) -> Result<HandRecord> {
    let seats = [agents[0].label(), agents[1].label()];
    for (p, rng) in Player::BOTH.into_iter().zip(rngs) {
        agents[p.index()].begin_hand(p, rng);
    }
    let mut state = BettingState::new(spec.clone(), deal.private.clone())?;
    let mut decisions = Vec::new();
    let mut forfeit = None;
    loop {
        match state.phase() {
            Phase::Deal(round) => state = state.deal_board(deal.round_cards(spec, round))?,
            Phase::Act(p) => {
                let obs = Observation {
                    seat: p,
                    private: state.private(p),
                    board: state.board(),
                    betting: state.betting(),
                };
                let round = state.round();
                match agents[p.index()].act(&obs) {
                    Ok(d) => {
                        decisions.push(DecisionLog { player: p, round, action: d.action, diagnostics: d.diagnostics });
                        match state.apply_action(d.action) {
                            Ok(next) => state = next,
                            Err(e) => {
                                forfeit = Some(Forfeit { player: p, action: Some(d.action), reason: e.to_string() });
                                break;
                            }
                        }
                    }
                    Err(e) => {
                        forfeit = Some(Forfeit { player: p, action: None, reason: e.to_string() });
                        break;
                    }
                }
            }
            Phase::Showdown | Phase::Folded(_) => break,
        }
    }
    let (result_p1, reason) = match &forfeit {
        Some(f) => {
            let lost = state.betting().total_commit(f.player) as i64;
            (if f.player == Player::P1 { -lost } else { lost }, TerminalReason::Fold)
        }
        None => {
            let o = state.outcome().ok_or(Error::Terminal)?;
            (o.payoff_p1, o.reason)
        }
    };
    Ok(HandRecord {
        schema: SCHEMA_VERSION,
        hand_id: id.hand_id,
        pair: id.pair,
        play: id.play,
        seats,
        a_seat: id.a_seat,
        private: [format_cards(&deal.private[0]), format_cards(&deal.private[1])],
        board: format_cards(&deal.board),
        actions: state.betting().history().to_vec(),
        decisions,
        result_p1,
        reason,
        forfeit,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairResult {
    pub pair: u64,
    /// Play 0 seats the first agent as player 1; play 1 swaps the seats
    /// over the same cards.
    pub records: [HandRecord; 2],
    /// First agent's chips in each play, and their sum.
    pub a_results: [i64; 2],
    pub combined: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DuplicateResult {
    pub labels: [String; 2],
    pub pairs: Vec<PairResult>,
    /// Chips won by the first agent over all hands.
    pub total_a: i64,
    pub hands: usize,
    pub bb_per_100: f64,
    /// Sample variance of the first agent's per-hand results.
    pub var_hand: f64,
    /// Sample variance of per-pair combined results.
    pub var_pair: f64,
    pub forfeits: usize,
}

impl DuplicateResult {
    pub fn records(&self) -> impl Iterator<Item = &HandRecord> {
        self.pairs.iter().flat_map(|p| p.records.iter())
    }
}

/// Chip unit for win rates: the big blind, or the ante in games without
/// blinds.
pub fn big_blind_unit(spec: &GameSpec) -> u32 {
    if spec.big_blind > 0 {
        spec.big_blind
    } else {
        spec.ante.max(1)
    }
}

/// Win rate in big blinds per hundred hands.
pub fn bb_per_100(total_chips: i64, n_hands: u64, big_blind: u32) -> Result<f64> {
    if n_hands == 0 || big_blind == 0 {
        return Err(Error::InvalidConfig("need at least one hand and a positive big blind".into()));
    }
    Ok(total_chips as f64 / big_blind as f64 / (n_hands as f64 / 100.0))
}

fn play_pair(
    spec: &Arc<GameSpec>,
    a: &mut dyn Agent,
    b: &mut dyn Agent,
    pair: u64,
    seed: u64,
) -> Result<PairResult> {
    let deal = Deal::random(spec, &mut derive_rng(seed, "deal", &[pair]));
    let rng = |play: u64, agent: u64| derive_rng(seed, "agent", &[pair, play, agent]);
    let r0 = play_hand(
        spec,
        &deal,
        [&mut *a, &mut *b],
        [rng(0, 0), rng(0, 1)],
        HandId { hand_id: 2 * pair, pair, play: 0, a_seat: Player::P1 },
    )?;
    let r1 = play_hand(
        spec,
        &deal,
        [&mut *b, &mut *a],
        [rng(1, 1), rng(1, 0)],
        HandId { hand_id: 2 * pair + 1, pair, play: 1, a_seat: Player::P2 },
    )?;
    let a_results = [r0.result_a(), r1.result_a()];
    Ok(PairResult { pair, records: [r0, r1], a_results, combined: a_results[0] + a_results[1] })
}

fn worker_count(n: u64) -> usize {
    let cores = std::thread::available_parallelism().map_or(1, |c| c.get());
    cores.min(n.max(1) as usize)
}

/// Runs `job` for every index in `0..n` on worker threads, each with its own
/// forks of the agents; results come back in index order.
fn run_indexed<T: Send>(
    n: u64,
    a: &dyn Agent,
    b: &dyn Agent,
    job: &(dyn Fn(&mut dyn Agent, &mut dyn Agent, u64) -> Result<T> + Sync),
) -> Result<Vec<T>> {
    let workers = worker_count(n);
    let forks: Vec<(Box<dyn Agent>, Box<dyn Agent>)> = (0..workers).map(|_| (a.fork(), b.fork())).collect();
    let mut chunks: Vec<Vec<(u64, Result<T>)>> = Vec::new();
    std::thread::scope(|s| {
        let handles: Vec<_> = forks
            .into_iter()
            .enumerate()
            .map(|(w, (mut fa, mut fb))| {
                s.spawn(move || {
                    (w as u64..n)
                        .step_by(workers)
                        .map(|i| (i, job(fa.as_mut(), fb.as_mut(), i)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            chunks.push(h.join().expect("match worker panicked"));
        }
    });
    let mut all: Vec<(u64, Result<T>)> = chunks.into_iter().flatten().collect();
    all.sort_by_key(|(i, _)| *i);
    all.into_iter().map(|(_, r)| r).collect()
}

fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
}

/// Plays `n_pairs` duplicate pairs: each deal is played once with `a` in
/// seat 1 and once with the seats swapped.
pub fn play_duplicate_match(
    a: &dyn Agent,
    b: &dyn Agent,
    n_pairs: u64,
    spec: &GameSpec,
    seed: u64,
) -> Result<DuplicateResult> {
    if n_pairs == 0 {
        return Err(Error::InvalidConfig("need at least one pair".into()));
    }
    let spec = Arc::new(spec.clone());
    let pairs = run_indexed(n_pairs, a, b, &|fa, fb, i| play_pair(&spec, fa, fb, i, seed))?;
    let hand_results: Vec<f64> = pairs.iter().flat_map(|p| p.a_results).map(|x| x as f64).collect();
    let pair_results: Vec<f64> = pairs.iter().map(|p| p.combined as f64).collect();
    let total_a: i64 = pairs.iter().map(|p| p.combined).sum();
    let hands = 2 * pairs.len();
    let forfeits = pairs.iter().flat_map(|p| p.records.iter()).filter(|r| r.forfeit.is_some()).count();
    Ok(DuplicateResult {
        labels: [a.label(), b.label()],
        total_a,
        hands,
        bb_per_100: bb_per_100(total_a, hands as u64, big_blind_unit(&spec))?,
        var_hand: sample_variance(&hand_results),
        var_pair: sample_variance(&pair_results),
        forfeits,
        pairs,
    })
}

/// Combined result of several matches counted as one side, e.g. several
/// agents playing the same opponent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub total: i64,
    pub hands: usize,
    pub bb_per_100: f64,
}

pub fn group_summary(results: &[&DuplicateResult], big_blind: u32) -> Result<GroupSummary> {
    let total = results.iter().map(|r| r.total_a).sum();
    let hands = results.iter().map(|r| r.hands).sum();
    Ok(GroupSummary { total, hands, bb_per_100: bb_per_100(total, hands as u64, big_blind)? })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceComparison {
    pub n: u64,
    /// Variance of the first agent's mean result over a duplicate pair.
    pub var_duplicate: f64,
    /// Variance of its mean result over two hands on independent deals,
    /// one from each seat.
    pub var_independent: f64,
    /// Two-sided 95% chi-square intervals.
    pub ci_duplicate: (f64, f64),
    pub ci_independent: (f64, f64),
    /// One-sided 95% upper bound on var_duplicate / var_independent from
    /// the F distribution.
    pub ratio_upper_95: f64,
    /// The upper bound is below one.
    pub duplicate_lower: bool,
}

fn variance_ci(var: f64, n: usize) -> (f64, f64) {
    let df = (n - 1) as f64;
    let chi = ChiSquared::new(df).expect("positive degrees of freedom");
    (df * var / chi.inverse_cdf(0.975), df * var / chi.inverse_cdf(0.025))
}

/// Compares the two estimators of the first agent's per-hand win rate on `n`
/// units each: duplicate pairs, and pairs of hands on independent deals.
pub fn variance_comparison(
    a: &dyn Agent,
    b: &dyn Agent,
    n: u64,
    spec: &GameSpec,
    seed: u64,
) -> Result<VarianceComparison> {
    if n < 2 {
        return Err(Error::InvalidConfig("need at least two units".into()));
    }
    let dup = play_duplicate_match(a, b, n, spec, seed)?;
    let dup_units: Vec<f64> = dup.pairs.iter().map(|p| p.combined as f64 / 2.0).collect();

    let spec = Arc::new(spec.clone());
    let indep_units = run_indexed(n, a, b, &|fa, fb, i| {
        let mut sum = 0i64;
        for play in 0..2u64 {
            let deal = Deal::random(&spec, &mut derive_rng(seed, "independent-deal", &[i, play]));
            let rng = |agent: u64| derive_rng(seed, "independent-agent", &[i, play, agent]);
            let id = HandId { hand_id: 2 * i + play, pair: i, play: play as u8, a_seat: Player::from_index(play as usize) };
            let rec = if play == 0 {
                play_hand(&spec, &deal, [&mut *fa, &mut *fb], [rng(0), rng(1)], id)?
            } else {
                play_hand(&spec, &deal, [&mut *fb, &mut *fa], [rng(1), rng(0)], id)?
            };
            sum += rec.result_a();
        }
        Ok(sum as f64 / 2.0)
    })?;

    let var_duplicate = sample_variance(&dup_units);
    let var_independent = sample_variance(&indep_units);
    let df = (n - 1) as f64;
    let f = FisherSnedecor::new(df, df).expect("positive degrees of freedom");
    let ratio_upper_95 = if var_independent > 0.0 {
        var_duplicate / var_independent / f.inverse_cdf(0.05)
    } else {
        f64::INFINITY
    };
    Ok(VarianceComparison {
        n,
        var_duplicate,
        var_independent,
        ci_duplicate: variance_ci(var_duplicate, n as usize),
        ci_independent: variance_ci(var_independent, n as usize),
        ratio_upper_95,
        duplicate_lower: ratio_upper_95 < 1.0,
    })
}

/// Mean with a normal-approximation interval at `confidence`.
pub fn mean_interval(xs: &[f64], confidence: f64) -> (f64, (f64, f64)) {
    let n = xs.len().max(1) as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let se = (sample_variance(xs) / n).sqrt();
    let z = Normal::new(0.0, 1.0).expect("standard normal").inverse_cdf(0.5 + confidence / 2.0);
    (mean, (mean - z * se, mean + z * se))
}
