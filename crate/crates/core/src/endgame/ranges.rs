use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::abstraction::{private_hands, Abstraction, PublicKind, PublicTree};
use crate::cards::{Card, CardSet};
use crate::equilibrium::StrategyTable;
use crate::error::{Error, Result};
use crate::game::{InfoSetKey, Player};

/// Beliefs about one player's private hand.
///
/// `reach` is the prior times the player's own trunk probabilities along the
/// history. `prob` is the marginal given everything public, which also
/// accounts for the opponent's range through card removal; it sums to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RangeDistribution {
    pub player: Player,
    pub hands: Vec<Vec<Card>>,
    pub reach: Vec<f64>,
    pub prob: Vec<f64>,
}

impl RangeDistribution {
    pub fn index_of(&self, hand: &[Card]) -> Option<usize> {
        let m = CardSet::from_cards(hand);
        self.hands.iter().position(|h| CardSet::from_cards(h) == m)
    }

    pub fn total_reach(&self) -> f64 {
        self.reach.iter().sum()
    }
}

/// Sum of `reach` over hands containing each card subset of size 1..=k.
fn subset_sums(hands: &[Vec<Card>], reach: &[f64]) -> HashMap<u64, f64> {
    let mut sums = HashMap::new();
    for (h, &r) in hands.iter().zip(reach) {
        if r == 0.0 {
            continue;
        }
        for mask in 1u32..(1 << h.len()) {
            let set = subset(h, mask);
            *sums.entry(set).or_insert(0.0) += r;
        }
    }
    sums
}

fn subset(hand: &[Card], mask: u32) -> u64 {
    hand.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).fold(0, |m, (_, c)| m | c.mask())
}

/// Opponent reach on hands disjoint from `hand`, by inclusion-exclusion over
/// the subsets of `hand`'s cards.
fn disjoint_mass(hand: &[Card], total: f64, sums: &HashMap<u64, f64>) -> f64 {
    let mut mass = total;
    for mask in 1u32..(1 << hand.len()) {
        let s = sums.get(&subset(hand, mask)).copied().unwrap_or(0.0);
        if mask.count_ones() % 2 == 1 {
            mass -= s;
        } else {
            mass += s;
        }
    }
    mass.max(0.0)
}

/// Fills in `prob` for both ranges from their reach vectors. Fails when no
/// compatible pair of hands has positive reach.
pub fn joint_marginals(ranges: &mut [RangeDistribution; 2], context: &str) -> Result<()> {
    let sums = [subset_sums(&ranges[0].hands, &ranges[0].reach), subset_sums(&ranges[1].hands, &ranges[1].reach)];
    let totals = [ranges[0].total_reach(), ranges[1].total_reach()];
    let mut unnorm: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    for p in 0..2 {
        let o = 1 - p;
        unnorm[p] = ranges[p]
            .hands
            .iter()
            .zip(&ranges[p].reach)
            .map(|(h, &r)| if r == 0.0 { 0.0 } else { r * disjoint_mass(h, totals[o], &sums[o]) })
            .collect();
    }
    let z: f64 = unnorm[0].iter().sum();
    if !(z > 0.0) {
        return Err(Error::ZeroReach(context.to_string()));
    }
    for p in 0..2 {
        let zp: f64 = unnorm[p].iter().sum();
        ranges[p].prob = unnorm[p].iter().map(|u| u / zp).collect();
    }
    Ok(())
}

/// Bayes-rule ranges at public node `node` of the abstraction's betting
/// tree, given the board dealt so far. Each hand's reach is the uniform prior
/// times the trunk probability of every action its holder took; one table
/// lookup per hand per action.
pub fn compute_reach_ranges(
    trunk: &StrategyTable,
    abstraction: &Abstraction,
    tree: &PublicTree,
    node: u32,
    board: &[Card],
) -> Result<[RangeDistribution; 2]> {
    let spec = &abstraction.spec;
    let dead = CardSet::from_cards(board);
    let hands = private_hands(&spec.deck(), spec.private_cards as usize, dead);
    let prior = 1.0 / hands.len() as f64;
    let mut ranges = [Player::P1, Player::P2].map(|player| RangeDistribution {
        player,
        hands: hands.clone(),
        reach: vec![prior; hands.len()],
        prob: Vec::new(),
    });
    let path = tree.path(node);
    let mut labels: HashMap<(usize, usize), (String, String)> = HashMap::new();
    for &(id, action) in &path {
        let n = tree.node(id);
        let PublicKind::Decision { player, children } = &n.kind else { unreachable!() };
        let round = n.round();
        let round_board = &board[..spec.board_len(round)];
        let range = &mut ranges[player.index()];
        for (i, hand) in range.hands.iter().enumerate() {
            if range.reach[i] == 0.0 {
                continue;
            }
            let (private, public) = labels.entry((round, i)).or_insert_with(|| {
                let (pb, bb) = abstraction.bucketing.bucket(round, hand, round_board);
                (abstraction.bucketing.private_label(round, pb), abstraction.bucketing.board_label(round, bb))
            });
            let key = InfoSetKey::new(*player, private, public, &n.history);
            let probs = trunk.require(&key)?;
            if probs.len() != children.len() {
                return Err(Error::Format(format!("infoset {key} has {} actions in the tree", children.len())));
            }
            range.reach[i] *= probs[action];
        }
    }
    joint_marginals(&mut ranges, &tree.node(node).history)?;
    Ok(ranges)
}

/// As [`compute_reach_ranges`], but when the history has zero reach the
/// ranges of the longest prefix with positive reach are used instead. The
/// flag reports whether that happened.
pub fn compute_reach_ranges_or_fallback(
    trunk: &StrategyTable,
    abstraction: &Abstraction,
    tree: &PublicTree,
    node: u32,
    board: &[Card],
) -> Result<([RangeDistribution; 2], bool)> {
    match compute_reach_ranges(trunk, abstraction, tree, node, board) {
        Err(Error::ZeroReach(_)) => {}
        other => return other.map(|r| (r, false)),
    }
    let mut id = node;
    while let Some(parent) = tree.node(id).parent {
        id = parent;
        match compute_reach_ranges(trunk, abstraction, tree, id, board) {
            Err(Error::ZeroReach(_)) => continue,
            other => return other.map(|r| (r, true)),
        }
    }
    Err(Error::ZeroReach(tree.node(node).history.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abstraction::AbstractGame;
    use crate::cards::parse_cards;
    use crate::equilibrium::Game;
    use crate::game::{Action, GameSpec};

    #[test]
    fn uniform_trunk_gives_uniform_range() {
        let g = AbstractGame::lossless(GameSpec::leduc(), 10_000).unwrap();
        let trunk = StrategyTable::uniform(&g);
        let node = g.tree().walk(&[Action::RaiseTo(2), Action::Call]).unwrap();
        let board = parse_cards("Kh").unwrap();
        let [r1, r2] = compute_reach_ranges(&trunk, g.abstraction(), g.tree(), node, &board).unwrap();
        assert_eq!(r1.hands.len(), 5);
        assert!(r1.prob.iter().all(|&p| (p - 0.2).abs() < 1e-12));
        assert!((r2.prob.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(r1.reach.iter().all(|&r| (r - 0.1).abs() < 1e-12));
        assert!(r2.reach.iter().all(|&r| (r - 0.2 / 3.0).abs() < 1e-12));
    }

    #[test]
    fn folded_line_has_zero_reach() {
        let g = AbstractGame::lossless(GameSpec::leduc(), 10_000).unwrap();
        let mut trunk = StrategyTable::uniform(&g);
        // player 1 never bets with a jack
        for i in 0..g.num_infosets() {
            let key = g.infoset_key(i);
            if key.as_str().starts_with("P1|J||") && key.history().is_empty() {
                trunk.insert(key, vec![1.0, 0.0]);
            }
        }
        let node = g.tree().walk(&[Action::RaiseTo(2), Action::Call]).unwrap();
        let board = parse_cards("Kh").unwrap();
        let [r1, _] = compute_reach_ranges(&trunk, g.abstraction(), g.tree(), node, &board).unwrap();
        for (h, &r) in r1.hands.iter().zip(&r1.reach) {
            assert_eq!(r == 0.0, h[0].rank() == parse_cards("Jh").unwrap()[0].rank());
        }
    }
}
