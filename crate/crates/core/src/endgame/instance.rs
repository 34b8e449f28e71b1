use std::collections::HashMap;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::equity::conditional_equities;
use super::ranges::{compute_reach_ranges_or_fallback, joint_marginals, RangeDistribution};
use crate::abstraction::{bucket_by_equity_percentiles, Abstraction, ActionGrid, PublicKind, PublicTree};
use crate::cards::{Card, CardSet};
use crate::equilibrium::{solve_sequence_form, GameTree, StrategyTable, TreeBuilder};
use crate::error::{Error, Result};
use crate::game::{hand_strength, stable_hash, Action, Betting, GameSpec, InfoSetKey, Phase, Player};

/// Most sequences per player an endgame may have.
pub const MAX_ENDGAME_SEQUENCES: usize = 10_000;

const MAX_BETTING_NODES: usize = 200_000;

/// A final-round subgame ready to solve: the complete board, the chips each
/// player really has in the pot, both ranges and their equity buckets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EndgameInstance {
    pub spec: GameSpec,
    pub round: usize,
    pub board: Vec<Card>,
    /// Chips each player committed before the round began.
    pub contributions: [u32; 2],
    pub pot: u32,
    pub stacks: [u32; 2],
    pub ranges: [RangeDistribution; 2],
    pub equities: [Vec<f64>; 2],
    /// Bucket per hand of each range; `None` outside the range's support.
    pub buckets: [Vec<Option<u32>>; 2],
    pub bucket_counts: [u32; 2],
    pub grid: ActionGrid,
    /// The ranges came from a shorter prefix because the full history had
    /// zero reach.
    pub zero_reach_fallback: bool,
    /// Hands whose equity had no compatible opponent holding.
    pub no_information_hands: usize,
}

impl EndgameInstance {
    /// Builds an instance from explicit ranges. Marginals are recomputed
    /// from the reach vectors.
    pub fn from_ranges(
        spec: GameSpec,
        board: Vec<Card>,
        contributions: [u32; 2],
        mut ranges: [RangeDistribution; 2],
        grid: ActionGrid,
        k: [u32; 2],
    ) -> Result<Self> {
        grid.check_spec(&spec)?;
        let round = spec.num_rounds() - 1;
        if board.len() != spec.board_len(round) {
            return Err(Error::InvalidConfig(format!("endgame needs a complete board of {} cards", spec.board_len(round))));
        }
        if contributions.iter().any(|&c| c > spec.starting_stack) {
            return Err(Error::InvalidConfig("contribution exceeds starting stack".into()));
        }
        let dead = CardSet::from_cards(&board);
        for r in ranges.iter_mut() {
            for (h, w) in r.hands.iter().zip(r.reach.iter_mut()) {
                if CardSet::from_cards(h).intersects(dead) {
                    *w = 0.0;
                }
            }
        }
        joint_marginals(&mut ranges, "endgame ranges")?;

        let mut equities = [Vec::new(), Vec::new()];
        let mut buckets = [Vec::new(), Vec::new()];
        let mut counts = [0u32; 2];
        let mut no_info = 0;
        for p in 0..2 {
            let range = &ranges[p];
            let eq = conditional_equities(spec.showdown, &board, &range.hands, &ranges[1 - p]);
            let support: Vec<usize> = (0..range.hands.len()).filter(|&i| range.prob[i] > 0.0).collect();
            no_info += support.iter().filter(|&&i| eq.no_information[i]).count();
            let sup_eq: Vec<f64> = support.iter().map(|&i| eq.equities[i]).collect();
            let sup_w: Vec<f64> = support.iter().map(|&i| range.prob[i]).collect();
            let b = bucket_by_equity_percentiles(&sup_eq, &sup_w, k[p])?;
            let mut full = vec![None; range.hands.len()];
            for (&i, &bi) in support.iter().zip(&b) {
                full[i] = Some(bi);
            }
            counts[p] = b.iter().max().map_or(0, |m| m + 1);
            equities[p] = eq.equities;
            buckets[p] = full;
        }
        let stacks = [spec.starting_stack - contributions[0], spec.starting_stack - contributions[1]];
        Ok(EndgameInstance {
            round,
            board,
            contributions,
            pot: contributions[0] + contributions[1],
            stacks,
            ranges,
            equities,
            buckets,
            bucket_counts: counts,
            grid,
            zero_reach_fallback: false,
            no_information_hands: no_info,
            spec,
        })
    }

    pub fn hash(&self) -> u64 {
        stable_hash(&serde_json::to_vec(self).expect("instance serializes"))
    }

    /// Writes the instance as JSON.
    pub fn save(&self, path: &Path) -> Result<()> {
        save_json(self, path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_slice(&std::fs::read(path)?)?)
    }

    /// Betting at the start of the final round, rooted at the true pot.
    pub fn root_betting(&self) -> Result<Betting> {
        Betting::at_round_start(Arc::new(self.spec.clone()), self.round, self.contributions)
    }

    pub fn betting_tree(&self) -> Result<PublicTree> {
        PublicTree::build(self.root_betting()?, &self.grid, MAX_BETTING_NODES)
    }

    pub fn bucket_of(&self, player: Player, hand: &[Card]) -> Option<u32> {
        let r = &self.ranges[player.index()];
        r.index_of(hand).and_then(|i| self.buckets[player.index()][i])
    }
}

/// Composes the endgame for the final round: Bayes ranges from the trunk
/// along the abstract history ending at `node`, then equities and buckets.
/// `contributions` must come from the real hand, not the abstract history.
#[allow(clippy::too_many_arguments)]
pub fn build_endgame(
    trunk: &StrategyTable,
    abstraction: &Abstraction,
    tree: &PublicTree,
    node: u32,
    board: &[Card],
    contributions: [u32; 2],
    grid: ActionGrid,
    k: [u32; 2],
) -> Result<EndgameInstance> {
    let (ranges, fallback) = compute_reach_ranges_or_fallback(trunk, abstraction, tree, node, board)?;
    let mut inst =
        EndgameInstance::from_ranges((*abstraction.spec).clone(), board.to_vec(), contributions, ranges, grid, k)?;
    inst.zero_reach_fallback = fallback;
    Ok(inst)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EndgameStats {
    pub sequences: [usize; 2],
    pub tree_nodes: usize,
    pub bucket_pairs: usize,
    pub solve_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EndgameSolution {
    /// Expected payoff to player 1 from the start of the hand, under the
    /// equilibrium, from player 1's program.
    pub value: f64,
    /// The same value from player 2's program.
    pub value_p2: f64,
    /// Keys are `P?|b<bucket>||<history>`.
    pub strategy: StrategyTable,
    pub stats: EndgameStats,
}

impl EndgameSolution {
    /// Player 1's expected final share of the pot: value plus the chips
    /// player 1 had already put in.
    pub fn p1_pot_share(&self, instance: &EndgameInstance) -> f64 {
        self.value + instance.contributions[0] as f64
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        save_json(self, path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_slice(&std::fs::read(path)?)?)
    }
}

fn save_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    serde_json::to_writer(&mut w, value)?;
    w.flush()?;
    Ok(())
}

fn bucket_key(player: Player, bucket: u32, history: &str) -> InfoSetKey {
    InfoSetKey::new(player, &format!("b{bucket}"), "", history)
}

/// Outcome statistics per bucket pair: probability of the pair and the
/// conditional probability that player 1 wins minus that it loses.
fn bucket_pairs(inst: &EndgameInstance) -> Vec<((u32, u32), f64, f64)> {
    let rule = inst.spec.showdown;
    let side = |p: usize| -> Vec<(u64, u32, f64, u32)> {
        let r = &inst.ranges[p];
        (0..r.hands.len())
            .filter_map(|i| {
                let b = inst.buckets[p][i]?;
                (r.reach[i] > 0.0).then(|| {
                    (CardSet::from_cards(&r.hands[i]).0, hand_strength(rule, &r.hands[i], &inst.board), r.reach[i], b)
                })
            })
            .collect()
    };
    let (a, b) = (side(0), side(1));
    let mut acc: HashMap<(u32, u32), (f64, f64)> = HashMap::new();
    let mut total = 0.0;
    for &(m1, s1, w1, b1) in &a {
        for &(m2, s2, w2, b2) in &b {
            if m1 & m2 != 0 {
                continue;
            }
            let w = w1 * w2;
            total += w;
            let e = acc.entry((b1, b2)).or_insert((0.0, 0.0));
            e.0 += w;
            e.1 += w * match s1.cmp(&s2) {
                std::cmp::Ordering::Greater => 1.0,
                std::cmp::Ordering::Less => -1.0,
                std::cmp::Ordering::Equal => 0.0,
            };
        }
    }
    let mut out: Vec<_> = acc.into_iter().map(|(k, (w, s))| (k, w / total, s / w)).collect();
    out.sort_by_key(|x| x.0);
    out
}

fn grow(b: &mut TreeBuilder, tree: &PublicTree, id: u32, pair: (u32, u32), edge: f64) -> Result<u32> {
    let node = tree.node(id);
    match &node.kind {
        PublicKind::Terminal => {
            let payoff = match node.betting.phase() {
                Phase::Folded(_) => node.betting.payoff(std::cmp::Ordering::Equal).expect("terminal") as f64,
                _ => node.betting.payoff(std::cmp::Ordering::Greater).expect("terminal") as f64 * edge,
            };
            Ok(b.terminal(payoff))
        }
        PublicKind::Decision { player, children } => {
            let kids = children
                .iter()
                .map(|&(_, c)| grow(b, tree, c, pair, edge))
                .collect::<Result<Vec<_>>>()?;
            let labels: Vec<String> = children.iter().map(|(a, _)| a.token()).collect();
            let refs: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
            let bucket = if *player == Player::P1 { pair.0 } else { pair.1 };
            b.decision(*player, bucket_key(*player, bucket, &node.history), &refs, kids)
        }
        PublicKind::Deal { .. } => Err(Error::InvalidConfig("endgame must be the final round".into())),
    }
}

/// The explicit endgame: chance over bucket pairs, then the betting tree.
pub fn endgame_tree(inst: &EndgameInstance) -> Result<(GameTree, PublicTree, usize)> {
    let betting = inst.betting_tree()?;
    for p in Player::BOTH {
        let per_bucket: usize = betting
            .decision_nodes()
            .filter_map(|(_, n)| match &n.kind {
                PublicKind::Decision { player, children } if *player == p => Some(children.len()),
                _ => None,
            })
            .sum();
        let seqs = 1 + per_bucket * inst.bucket_counts[p.index()] as usize;
        if seqs > MAX_ENDGAME_SEQUENCES {
            return Err(Error::InvalidConfig(format!(
                "endgame has {seqs} sequences for {p}, limit {MAX_ENDGAME_SEQUENCES}; reduce buckets or sizes"
            )));
        }
    }
    let pairs = bucket_pairs(inst);
    let mut b = TreeBuilder::new();
    let mut chance = Vec::with_capacity(pairs.len());
    for &(pair, prob, edge) in &pairs {
        chance.push((grow(&mut b, &betting, betting.root(), pair, edge)?, prob));
    }
    let root = b.chance(chance);
    Ok((b.finish(root)?.with_hashes(inst.spec.hash(), inst.grid.hash()), betting, pairs.len()))
}

/// Solves the endgame exactly by the sequence-form linear programs.
pub fn solve_endgame_lp(inst: &EndgameInstance) -> Result<EndgameSolution> {
    let start = Instant::now();
    let (tree, _, pairs) = endgame_tree(inst)?;
    let sol = solve_sequence_form(&tree)?;
    let mut sequences = [1usize, 1usize];
    for info in tree.infosets() {
        sequences[info.player.index()] += info.labels.len();
    }
    Ok(EndgameSolution {
        value: sol.value,
        value_p2: sol.value_p2,
        strategy: sol.strategy,
        stats: EndgameStats {
            sequences,
            tree_nodes: tree.nodes().len(),
            bucket_pairs: pairs,
            solve_seconds: start.elapsed().as_secs_f64(),
        },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolicyLookup {
    pub actions: Vec<Action>,
    pub probs: Vec<f64>,
    /// The hand was outside the solved range and got the uniform vector.
    pub fallback: bool,
}

/// Solved action distribution for `hand` at the endgame history `history`
/// (the key history, e.g. `"/r200"`). No post-processing is applied.
pub fn endgame_policy(
    solution: &EndgameSolution,
    instance: &EndgameInstance,
    tree: &PublicTree,
    player: Player,
    hand: &[Card],
    history: &str,
) -> Result<PolicyLookup> {
    let id = tree.find(history).ok_or_else(|| Error::UnknownHistory(history.to_string()))?;
    let PublicKind::Decision { player: actor, children } = &tree.node(id).kind else {
        return Err(Error::UnknownHistory(history.to_string()));
    };
    if *actor != player {
        return Err(Error::UnknownHistory(format!("{history} is not {player}'s turn")));
    }
    let actions: Vec<Action> = children.iter().map(|c| c.0).collect();
    let n = actions.len();
    let found = instance
        .bucket_of(player, hand)
        .and_then(|b| solution.strategy.get(&bucket_key(player, b, history)))
        .map(|v| v.to_vec());
    Ok(match found {
        Some(probs) => PolicyLookup { actions, probs, fallback: false },
        None => PolicyLookup { actions, probs: vec![1.0 / n as f64; n], fallback: true },
    })
}

/// An instance together with its solution and betting tree.
#[derive(Clone, Debug)]
pub struct SolvedEndgame {
    pub instance: EndgameInstance,
    pub solution: EndgameSolution,
    pub tree: PublicTree,
}

impl SolvedEndgame {
    pub fn solve(instance: EndgameInstance) -> Result<Self> {
        let solution = solve_endgame_lp(&instance)?;
        let tree = instance.betting_tree()?;
        Ok(SolvedEndgame { instance, solution, tree })
    }

    pub fn policy(&self, player: Player, hand: &[Card], history: &str) -> Result<PolicyLookup> {
        endgame_policy(&self.solution, &self.instance, &self.tree, player, hand, history)
    }
}

/// Clairvoyance endgame: player 1 holds the winner or the loser with equal
/// probability, player 2 holds a bluff-catcher, and player 1 may only check
/// or move all-in. The pot is 100 and each stack is `s` pots.
pub fn clairvoyance(s: u32) -> Result<EndgameInstance> {
    use crate::abstraction::{build_action_grid, BetSize, GridConfig, RoundGrid};
    use crate::game::{BettingRule, ShowdownRule};
    let spec = GameSpec {
        name: "clairvoyance".into(),
        ranks: vec![0, 1, 2],
        suits: vec![0],
        private_cards: 1,
        board_cards: vec![0],
        ante: 50,
        small_blind: 0,
        big_blind: 0,
        starting_stack: 50 + 100 * s,
        first_to_act: vec![Player::P1],
        showdown: ShowdownRule::HighCard,
        betting: BettingRule::NoLimit,
    };
    let grid = build_action_grid(
        &spec,
        &GridConfig {
            rounds: Vec::new(),
            p1: Some(vec![RoundGrid::new(vec![BetSize::AllIn], Vec::new())]),
            p2: Some(vec![RoundGrid::default()]),
            max_raises: Some(1),
        },
    )?;
    let card = |r| vec![Card::new(r, 0)];
    let ranges = [
        RangeDistribution { player: Player::P1, hands: vec![card(2), card(0)], reach: vec![0.5, 0.5], prob: Vec::new() },
        RangeDistribution { player: Player::P2, hands: vec![card(1)], reach: vec![1.0], prob: Vec::new() },
    ];
    EndgameInstance::from_ranges(spec, Vec::new(), [50, 50], ranges, grid, [2, 1])
}
