//! Exact best responses, exploitability and expected values on explicit trees.

use super::game::{GameTree, TreeNode};
use super::table::StrategyTable;
use crate::error::{Error, Result};
use crate::game::Player;

/// Behaviour strategy indexed by the tree's infoset ids.
#[derive(Clone, Debug)]
pub struct Profile {
    probs: Vec<Option<Vec<f64>>>,
}

impl Profile {
    /// Looks up every infoset of `player` (or of both players when `None`)
    /// in `table`; a missing key is an error naming the infoset.
    pub fn resolve(tree: &GameTree, table: &StrategyTable, player: Option<Player>) -> Result<Profile> {
        let mut probs = Vec::with_capacity(tree.infosets().len());
        for info in tree.infosets() {
            if player.is_some_and(|p| p != info.player) {
                probs.push(None);
                continue;
            }
            let v = table.require(&info.key)?;
            if v.len() != info.labels.len() {
                return Err(Error::Format(format!(
                    "infoset {} has {} actions, table gives {}",
                    info.key,
                    info.labels.len(),
                    v.len()
                )));
            }
            probs.push(Some(v.to_vec()));
        }
        Ok(Profile { probs })
    }

    pub fn from_vectors(probs: Vec<Option<Vec<f64>>>) -> Profile {
        Profile { probs }
    }

    pub fn get(&self, infoset: u32) -> &[f64] {
        self.probs[infoset as usize].as_deref().expect("profile covers infoset")
    }
}

/// Best-response value and pure best-response action per infoset.
#[derive(Clone, Debug)]
pub struct BestResponse {
    /// Expected payoff to the responder.
    pub value: f64,
    /// Chosen action per infoset id; `None` for the other player's infosets.
    pub actions: Vec<Option<usize>>,
}

struct Solver<'a> {
    tree: &'a GameTree,
    opponent: &'a Profile,
    br: Player,
    members: Vec<Vec<(u32, f64)>>,
    node_value: Vec<f64>,
    node_done: Vec<bool>,
    choice: Vec<Option<usize>>,
}

impl Solver<'_> {
    fn collect(&mut self) {
        let mut stack = vec![(self.tree.root_id(), 1.0)];
        while let Some((id, w)) = stack.pop() {
            match self.tree.node(id) {
                TreeNode::Terminal { .. } => {}
                TreeNode::Chance { children } => {
                    stack.extend(children.iter().map(|&(c, p)| (c, w * p)));
                }
                TreeNode::Decision { player, infoset, children } => {
                    if *player == self.br {
                        self.members[*infoset as usize].push((id, w));
                        stack.extend(children.iter().map(|&c| (c, w)));
                    } else {
                        let s = self.opponent.get(*infoset);
                        stack.extend(children.iter().zip(s).map(|(&c, &p)| (c, w * p)));
                    }
                }
            }
        }
    }

    fn value(&mut self, id: u32) -> f64 {
        if self.node_done[id as usize] {
            return self.node_value[id as usize];
        }
        let v = match self.tree.node(id) {
            TreeNode::Terminal { payoff } => payoff * self.br.sign(),
            TreeNode::Chance { children } => {
                let children = children.clone();
                children.iter().map(|&(c, p)| p * self.value(c)).sum()
            }
            TreeNode::Decision { player, infoset, children } => {
                let children = children.clone();
                if *player == self.br {
                    let a = self.best(*infoset);
                    self.value(children[a])
                } else {
                    let s = self.opponent.get(*infoset).to_vec();
                    children.iter().zip(&s).map(|(&c, &p)| if p > 0.0 { p * self.value(c) } else { 0.0 }).sum()
                }
            }
        };
        self.node_done[id as usize] = true;
        self.node_value[id as usize] = v;
        v
    }

    fn best(&mut self, infoset: u32) -> usize {
        if let Some(a) = self.choice[infoset as usize] {
            return a;
        }
        let members = self.members[infoset as usize].clone();
        let n = self.tree.infosets()[infoset as usize].labels.len();
        let mut totals = vec![0.0; n];
        for &(id, w) in &members {
            let TreeNode::Decision { children, .. } = self.tree.node(id) else { unreachable!() };
            let children = children.clone();
            for (a, &c) in children.iter().enumerate() {
                totals[a] += w * self.value(c);
            }
        }
        let mut best = 0;
        for a in 1..n {
            if totals[a] > totals[best] {
                best = a;
            }
        }
        self.choice[infoset as usize] = Some(best);
        best
    }
}

/// Best response of `br` against the opponent's part of `opponent`.
pub fn best_response(tree: &GameTree, opponent: &Profile, br: Player) -> BestResponse {
    let n = tree.nodes().len();
    let mut s = Solver {
        tree,
        opponent,
        br,
        members: vec![Vec::new(); tree.infosets().len()],
        node_value: vec![0.0; n],
        node_done: vec![false; n],
        choice: vec![None; tree.infosets().len()],
    };
    s.collect();
    let value = s.value(tree.root_id());
    for (i, info) in tree.infosets().iter().enumerate() {
        if info.player == br && !s.members[i].is_empty() {
            s.best(i as u32);
        }
    }
    BestResponse { value, actions: s.choice }
}

/// Expected payoff to player 1 when both play `profile`.
pub fn expected_value(tree: &GameTree, profile: &Profile) -> f64 {
    fn go(tree: &GameTree, profile: &Profile, id: u32) -> f64 {
        match tree.node(id) {
            TreeNode::Terminal { payoff } => *payoff,
            TreeNode::Chance { children } => children.iter().map(|&(c, p)| p * go(tree, profile, c)).sum(),
            TreeNode::Decision { infoset, children, .. } => children
                .iter()
                .zip(profile.get(*infoset))
                .map(|(&c, &p)| if p > 0.0 { p * go(tree, profile, c) } else { 0.0 })
                .sum(),
        }
    }
    go(tree, profile, tree.root_id())
}

/// Average gain of the two best responses against `profile`: zero exactly
/// at an equilibrium, in the tree's payoff units.
pub fn exploitability(tree: &GameTree, profile: &Profile) -> f64 {
    let b1 = best_response(tree, profile, Player::P1).value;
    let b2 = best_response(tree, profile, Player::P2).value;
    (b1 + b2) / 2.0
}

/// Exploitability of a strategy table; every infoset of the tree must be
/// present.
pub fn table_exploitability(tree: &GameTree, table: &StrategyTable) -> Result<f64> {
    Ok(exploitability(tree, &Profile::resolve(tree, table, None)?))
}

pub fn table_expected_value(tree: &GameTree, p1: &StrategyTable, p2: &StrategyTable) -> Result<f64> {
    let a = Profile::resolve(tree, p1, Some(Player::P1))?;
    let b = Profile::resolve(tree, p2, Some(Player::P2))?;
    let probs = a.probs.into_iter().zip(b.probs).map(|(x, y)| x.or(y)).collect();
    Ok(expected_value(tree, &Profile { probs }))
}
