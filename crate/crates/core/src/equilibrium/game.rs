use std::collections::HashMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::game::{InfoSetKey, Player};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NodeKind {
    /// Payoff to player 1.
    Terminal(f64),
    Chance,
    Decision { player: Player, infoset: usize, actions: usize },
}

/// A finite two-player zero-sum extensive-form game with dense infoset ids.
pub trait Game {
    type Node: Clone;

    fn root(&self) -> Self::Node;

    fn kind(&self, node: &Self::Node) -> NodeKind;

    /// Every chance outcome with its probability; `TooLarge` when the game
    /// can only be sampled.
    fn chance_outcomes(&self, node: &Self::Node) -> Result<Vec<(Self::Node, f64)>>;

    fn sample_chance<R: Rng>(&self, node: &Self::Node, rng: &mut R) -> Self::Node;

    fn child(&self, node: &Self::Node, action: usize) -> Self::Node;

    fn num_infosets(&self) -> usize;

    fn infoset_actions(&self, infoset: usize) -> usize;

    fn infoset_key(&self, infoset: usize) -> InfoSetKey;

    fn action_labels(&self, infoset: usize) -> Vec<String> {
        (0..self.infoset_actions(infoset)).map(|a| a.to_string()).collect()
    }

    fn game_hash(&self) -> u64;

    fn abstraction_hash(&self) -> u64;
}

#[derive(Clone, Debug, PartialEq)]
pub enum TreeNode {
    Terminal { payoff: f64 },
    Chance { children: Vec<(u32, f64)> },
    Decision { player: Player, infoset: u32, children: Vec<u32> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct InfosetInfo {
    pub key: InfoSetKey,
    pub player: Player,
    pub labels: Vec<String>,
}

/// Explicit game tree stored in an arena; node 0 is not special, `root` is.
#[derive(Clone, Debug)]
pub struct GameTree {
    nodes: Vec<TreeNode>,
    infosets: Vec<InfosetInfo>,
    root: u32,
    game_hash: u64,
    abstraction_hash: u64,
}

impl GameTree {
    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn node(&self, id: u32) -> &TreeNode {
        &self.nodes[id as usize]
    }

    pub fn root_id(&self) -> u32 {
        self.root
    }

    pub fn infosets(&self) -> &[InfosetInfo] {
        &self.infosets
    }

    pub fn infoset_index(&self) -> HashMap<&InfoSetKey, usize> {
        self.infosets.iter().enumerate().map(|(i, s)| (&s.key, i)).collect()
    }

    pub fn with_hashes(mut self, game_hash: u64, abstraction_hash: u64) -> Self {
        self.game_hash = game_hash;
        self.abstraction_hash = abstraction_hash;
        self
    }

    /// Expands a game with enumerable chance into an explicit tree, failing
    /// once more than `max_nodes` nodes would be created.
    pub fn from_game<G: Game>(game: &G, max_nodes: usize) -> Result<GameTree> {
        let mut b = TreeBuilder::new();
        let mut remap: HashMap<usize, u32> = HashMap::new();
        let root = expand(game, &game.root(), &mut b, &mut remap, max_nodes)?;
        let mut tree = b.finish(root)?;
        tree.game_hash = game.game_hash();
        tree.abstraction_hash = game.abstraction_hash();
        Ok(tree)
    }
}

fn expand<G: Game>(
    game: &G,
    node: &G::Node,
    b: &mut TreeBuilder,
    remap: &mut HashMap<usize, u32>,
    max_nodes: usize,
) -> Result<u32> {
    if b.nodes.len() >= max_nodes {
        return Err(Error::TooLarge(format!("more than {max_nodes} nodes")));
    }
    match game.kind(node) {
        NodeKind::Terminal(v) => Ok(b.terminal(v)),
        NodeKind::Chance => {
            let mut children = Vec::new();
            for (c, p) in game.chance_outcomes(node)? {
                children.push((expand(game, &c, b, remap, max_nodes)?, p));
            }
            Ok(b.chance(children))
        }
        NodeKind::Decision { player, infoset, actions } => {
            let mut children = Vec::with_capacity(actions);
            for a in 0..actions {
                children.push(expand(game, &game.child(node, a), b, remap, max_nodes)?);
            }
            let id = match remap.get(&infoset) {
                Some(&id) => id,
                None => {
                    let labels = game.action_labels(infoset);
                    let id = b.infoset(game.infoset_key(infoset), player, labels)?;
                    remap.insert(infoset, id);
                    id
                }
            };
            Ok(b.decision_at(player, id, children))
        }
    }
}

/// Bottom-up construction of a [`GameTree`]: children are added before
/// their parents, and decision nodes name their infoset by key.
#[derive(Default)]
pub struct TreeBuilder {
    nodes: Vec<TreeNode>,
    infosets: Vec<InfosetInfo>,
    by_key: HashMap<InfoSetKey, u32>,
}

impl TreeBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, node: TreeNode) -> u32 {
        self.nodes.push(node);
        (self.nodes.len() - 1) as u32
    }

    pub fn terminal(&mut self, payoff_p1: f64) -> u32 {
        self.push(TreeNode::Terminal { payoff: payoff_p1 })
    }

    pub fn chance(&mut self, children: Vec<(u32, f64)>) -> u32 {
        self.push(TreeNode::Chance { children })
    }

    /// Registers (or finds) the infoset for `key`.
    pub fn infoset(&mut self, key: InfoSetKey, player: Player, labels: Vec<String>) -> Result<u32> {
        if let Some(&id) = self.by_key.get(&key) {
            let info = &self.infosets[id as usize];
            if info.player != player || info.labels.len() != labels.len() {
                return Err(Error::InvalidConfig(format!("infoset {key} used inconsistently")));
            }
            return Ok(id);
        }
        let id = self.infosets.len() as u32;
        self.by_key.insert(key.clone(), id);
        self.infosets.push(InfosetInfo { key, player, labels });
        Ok(id)
    }

    pub fn decision(&mut self, player: Player, key: InfoSetKey, labels: &[&str], children: Vec<u32>) -> Result<u32> {
        if labels.len() != children.len() {
            return Err(Error::InvalidConfig("one label per child required".into()));
        }
        let id = self.infoset(key, player, labels.iter().map(|s| s.to_string()).collect())?;
        Ok(self.decision_at(player, id, children))
    }

    fn decision_at(&mut self, player: Player, infoset: u32, children: Vec<u32>) -> u32 {
        self.push(TreeNode::Decision { player, infoset, children })
    }

    pub fn finish(self, root: u32) -> Result<GameTree> {
        for node in &self.nodes {
            if let TreeNode::Chance { children } = node {
                let total: f64 = children.iter().map(|c| c.1).sum();
                if (total - 1.0).abs() > 1e-9 || children.iter().any(|c| c.1 < 0.0) {
                    return Err(Error::InvalidConfig(format!("chance probabilities sum to {total}")));
                }
            }
        }
        Ok(GameTree { nodes: self.nodes, infosets: self.infosets, root, game_hash: 0, abstraction_hash: 0 })
    }
}

impl Game for GameTree {
    type Node = u32;

    fn root(&self) -> u32 {
        self.root
    }

    fn kind(&self, node: &u32) -> NodeKind {
        match &self.nodes[*node as usize] {
            TreeNode::Terminal { payoff } => NodeKind::Terminal(*payoff),
            TreeNode::Chance { .. } => NodeKind::Chance,
            TreeNode::Decision { player, infoset, children } => {
                NodeKind::Decision { player: *player, infoset: *infoset as usize, actions: children.len() }
            }
        }
    }

    fn chance_outcomes(&self, node: &u32) -> Result<Vec<(u32, f64)>> {
        match &self.nodes[*node as usize] {
            TreeNode::Chance { children } => Ok(children.clone()),
            _ => Ok(Vec::new()),
        }
    }

    fn sample_chance<R: Rng>(&self, node: &u32, rng: &mut R) -> u32 {
        let TreeNode::Chance { children } = &self.nodes[*node as usize] else { return *node };
        let mut u: f64 = rng.gen();
        for &(c, p) in children {
            if u < p {
                return c;
            }
            u -= p;
        }
        children.last().expect("chance node has children").0
    }

    fn child(&self, node: &u32, action: usize) -> u32 {
        match &self.nodes[*node as usize] {
            TreeNode::Decision { children, .. } => children[action],
            _ => panic!("child of a non-decision node"),
        }
    }

    fn num_infosets(&self) -> usize {
        self.infosets.len()
    }

    fn infoset_actions(&self, infoset: usize) -> usize {
        self.infosets[infoset].labels.len()
    }

    fn infoset_key(&self, infoset: usize) -> InfoSetKey {
        self.infosets[infoset].key.clone()
    }

    fn action_labels(&self, infoset: usize) -> Vec<String> {
        self.infosets[infoset].labels.clone()
    }

    fn game_hash(&self) -> u64 {
        self.game_hash
    }

    fn abstraction_hash(&self) -> u64 {
        self.abstraction_hash
    }
}

/// Small hand-built games used as solver fixtures and demonstrations.
pub mod toys {
    use super::*;

    const RPS: [&str; 3] = ["rock", "paper", "scissors"];

    fn rps_payoff(a: usize, b: usize) -> f64 {
        match (3 + a - b) % 3 {
            0 => 0.0,
            1 => 1.0,
            _ => -1.0,
        }
    }

    fn key(p: Player, history: &str) -> InfoSetKey {
        InfoSetKey::new(p, "", "", history)
    }

    /// Rock-paper-scissors with player 2 choosing without seeing player 1.
    pub fn rock_paper_scissors() -> GameTree {
        let mut b = TreeBuilder::new();
        let mut p2_nodes = Vec::new();
        for a in 0..3 {
            let leaves: Vec<u32> = (0..3).map(|c| b.terminal(rps_payoff(a, c))).collect();
            p2_nodes.push(b.decision(Player::P2, key(Player::P2, ""), &RPS, leaves).unwrap());
        }
        let root = b.decision(Player::P1, key(Player::P1, ""), &RPS, p2_nodes).unwrap();
        b.finish(root).unwrap()
    }

    /// The endgame of sequential rock-paper-scissors once player 1 is fixed
    /// to the equilibrium mix: a chance move over its action, then player 2.
    pub fn rps_endgame_with_fixed_p1() -> GameTree {
        let mut b = TreeBuilder::new();
        let mut children = Vec::new();
        for a in 0..3 {
            let leaves: Vec<u32> = (0..3).map(|c| b.terminal(rps_payoff(a, c))).collect();
            children.push((b.decision(Player::P2, key(Player::P2, ""), &RPS, leaves).unwrap(), 1.0 / 3.0));
        }
        let root = b.chance(children);
        b.finish(root).unwrap()
    }

    /// Zero-sum matrix game as a tree: player 1 picks a row, player 2 a
    /// column without seeing it. Entries are player 1's payoff.
    pub fn matrix_game(a: &[Vec<f64>]) -> GameTree {
        let mut b = TreeBuilder::new();
        let cols = a[0].len();
        let col_labels: Vec<String> = (0..cols).map(|j| format!("c{j}")).collect();
        let col_refs: Vec<&str> = col_labels.iter().map(|s| s.as_str()).collect();
        let row_labels: Vec<String> = (0..a.len()).map(|i| format!("r{i}")).collect();
        let row_refs: Vec<&str> = row_labels.iter().map(|s| s.as_str()).collect();
        let mut rows = Vec::new();
        for row in a {
            let leaves: Vec<u32> = row.iter().map(|&v| b.terminal(v)).collect();
            rows.push(b.decision(Player::P2, key(Player::P2, ""), &col_refs, leaves).unwrap());
        }
        let root = b.decision(Player::P1, key(Player::P1, ""), &row_refs, rows).unwrap();
        b.finish(root).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rps_shape() {
        let t = toys::rock_paper_scissors();
        assert_eq!(t.num_infosets(), 2);
        assert_eq!(t.nodes().len(), 9 + 3 + 1);
        assert!(matches!(t.kind(&t.root()), NodeKind::Decision { player: Player::P1, actions: 3, .. }));
    }

    #[test]
    fn inconsistent_infoset_rejected() {
        let mut b = TreeBuilder::new();
        let l = b.terminal(0.0);
        let k = InfoSetKey::new(Player::P1, "", "", "");
        b.decision(Player::P1, k.clone(), &["a"], vec![l]).unwrap();
        assert!(b.decision(Player::P2, k, &["a"], vec![l]).is_err());
    }

    #[test]
    fn bad_chance_rejected() {
        let mut b = TreeBuilder::new();
        let l = b.terminal(0.0);
        let root = b.chance(vec![(l, 0.4)]);
        assert!(b.finish(root).is_err());
    }
}
