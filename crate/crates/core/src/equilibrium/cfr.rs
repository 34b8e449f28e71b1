//! Counterfactual regret minimization with regret matching.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::game::{Game, NodeKind};
use super::table::{StrategyTable, TableMeta};
use crate::error::{Error, Result};

/// Most actions a single decision node may offer.
pub const MAX_ACTIONS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CfrVariant {
    /// Full traversal of every chance outcome each iteration.
    Vanilla,
    /// One sampled chance path per iteration.
    ChanceSampled,
}

impl CfrVariant {
    pub fn name(self) -> &'static str {
        match self {
            CfrVariant::Vanilla => "vanilla",
            CfrVariant::ChanceSampled => "chance-sampled",
        }
    }
}

/// Regret and average-strategy accumulators for one game.
pub struct Cfr<'g, G: Game> {
    game: &'g G,
    variant: CfrVariant,
    offsets: Vec<usize>,
    regrets: Vec<f64>,
    pending: Vec<f64>,
    strategy_sum: Vec<f64>,
    visited: Vec<bool>,
    dirty: Vec<bool>,
    touched: Vec<usize>,
    iterations: u64,
    rng: ChaCha8Rng,
}

impl<'g, G: Game> Cfr<'g, G> {
    pub fn new(game: &'g G, variant: CfrVariant, seed: u64) -> Result<Self> {
        let mut offsets = Vec::with_capacity(game.num_infosets() + 1);
        let mut total = 0;
        for i in 0..game.num_infosets() {
            offsets.push(total);
            let n = game.infoset_actions(i);
            if n > MAX_ACTIONS {
                return Err(Error::TooLarge(format!("infoset {i} has {n} actions")));
            }
            total += n;
        }
        offsets.push(total);
        let n = game.num_infosets();
        Ok(Cfr {
            game,
            variant,
            offsets,
            regrets: vec![0.0; total],
            pending: vec![0.0; total],
            strategy_sum: vec![0.0; total],
            visited: vec![false; n],
            dirty: vec![false; n],
            touched: Vec::new(),
            iterations: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn iterations(&self) -> u64 {
        self.iterations
    }

    /// One iteration: both players' regrets are updated against the same
    /// current profile.
    pub fn iterate(&mut self) -> Result<()> {
        let root = self.game.root();
        self.walk(&root, [1.0, 1.0], 1.0)?;
        for &i in &self.touched {
            for k in self.offsets[i]..self.offsets[i + 1] {
                self.regrets[k] += self.pending[k];
                self.pending[k] = 0.0;
            }
            self.dirty[i] = false;
        }
        self.touched.clear();
        self.iterations += 1;
        Ok(())
    }

    /// Runs `n` more iterations, calling `checkpoint` after every iteration
    /// count that is a power of ten and after the last one.
    pub fn run(&mut self, n: u64, mut checkpoint: impl FnMut(&Self)) -> Result<()> {
        let end = self.iterations + n;
        while self.iterations < end {
            self.iterate()?;
            if is_power_of_ten(self.iterations) || self.iterations == end {
                checkpoint(self);
            }
        }
        Ok(())
    }

    /// Regret-matching strategy at `infoset` written into `out`.
    pub fn current_strategy(&self, infoset: usize, out: &mut [f64]) {
        let r = &self.regrets[self.offsets[infoset]..self.offsets[infoset + 1]];
        let pos: f64 = r.iter().map(|&x| x.max(0.0)).sum();
        if pos > 0.0 {
            for (o, &x) in out.iter_mut().zip(r) {
                *o = x.max(0.0) / pos;
            }
        } else {
            out.fill(1.0 / r.len() as f64);
        }
    }

    /// Average strategy over every infoset the iterations have reached.
    pub fn average(&self) -> StrategyTable {
        let mut table = StrategyTable::new(TableMeta {
            game_hash: self.game.game_hash(),
            abstraction_hash: self.game.abstraction_hash(),
            iterations: self.iterations,
            variant: Some(self.variant.name().into()),
            ..Default::default()
        });
        for i in 0..self.game.num_infosets() {
            if !self.visited[i] {
                continue;
            }
            let s = &self.strategy_sum[self.offsets[i]..self.offsets[i + 1]];
            let total: f64 = s.iter().sum();
            let probs = if total > 0.0 {
                s.iter().map(|x| x / total).collect()
            } else {
                vec![1.0 / s.len() as f64; s.len()]
            };
            table.insert(self.game.infoset_key(i), probs);
        }
        table
    }

    fn walk(&mut self, node: &G::Node, reach: [f64; 2], chance: f64) -> Result<f64> {
        match self.game.kind(node) {
            NodeKind::Terminal(v) => Ok(v),
            NodeKind::Chance => match self.variant {
                CfrVariant::Vanilla => {
                    let mut v = 0.0;
                    for (child, p) in self.game.chance_outcomes(node)? {
                        if p > 0.0 {
                            v += p * self.walk(&child, reach, chance * p)?;
                        }
                    }
                    Ok(v)
                }
                CfrVariant::ChanceSampled => {
                    let child = self.game.sample_chance(node, &mut self.rng);
                    self.walk(&child, reach, chance)
                }
            },
            NodeKind::Decision { player, infoset, actions } => {
                let mut sigma = [0.0; MAX_ACTIONS];
                let mut values = [0.0; MAX_ACTIONS];
                self.current_strategy(infoset, &mut sigma[..actions]);
                let p = player.index();
                let mut node_value = 0.0;
                for a in 0..actions {
                    let mut r = reach;
                    r[p] *= sigma[a];
                    let child = self.game.child(node, a);
                    values[a] = self.walk(&child, r, chance)?;
                    node_value += sigma[a] * values[a];
                }
                let cf = reach[1 - p] * chance * player.sign();
                let off = self.offsets[infoset];
                for a in 0..actions {
                    self.pending[off + a] += cf * (values[a] - node_value);
                    self.strategy_sum[off + a] += reach[p] * sigma[a];
                }
                self.visited[infoset] = true;
                if !self.dirty[infoset] {
                    self.dirty[infoset] = true;
                    self.touched.push(infoset);
                }
                Ok(node_value)
            }
        }
    }
}

pub fn is_power_of_ten(mut n: u64) -> bool {
    if n == 0 {
        return false;
    }
    while n.is_multiple_of(10) {
        n /= 10;
    }
    n == 1
}

/// Solves `game` for `iterations` iterations and returns the average strategy.
pub fn run_cfr<G: Game>(game: &G, iterations: u64, variant: CfrVariant, seed: u64) -> Result<StrategyTable> {
    if iterations == 0 {
        return Err(Error::InvalidConfig("iterations must be at least 1".into()));
    }
    let mut cfr = Cfr::new(game, variant, seed)?;
    cfr.run(iterations, |_| {})?;
    Ok(cfr.average())
}
