use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::Arc;

use rand::Rng;

use super::grid::ActionGrid;
use crate::equilibrium::{Game, NodeKind};
use crate::error::{Error, Result};
use crate::game::{
    hand_strength, history_string, stable_hash, Action, Betting, CardBucketing, Deal, GameSpec, InfoSetKey, Phase,
    Player,
};

#[derive(Clone, Debug, PartialEq)]
pub enum PublicKind {
    Decision { player: Player, children: Vec<(Action, u32)> },
    /// Public cards for `round` arrive, then play continues at `child`.
    Deal { round: usize, child: u32 },
    Terminal,
}

#[derive(Clone, Debug)]
pub struct PublicNode {
    pub betting: Betting,
    pub kind: PublicKind,
    pub parent: Option<u32>,
    /// Action tokens per round, as used in infoset keys.
    pub history: String,
}

impl PublicNode {
    pub fn round(&self) -> usize {
        self.betting.round()
    }
}

/// Betting tree of an action abstraction, independent of the cards.
#[derive(Clone, Debug)]
pub struct PublicTree {
    nodes: Vec<PublicNode>,
    by_history: HashMap<String, u32>,
}

impl PublicTree {
    pub fn build(root: Betting, grid: &ActionGrid, max_nodes: usize) -> Result<PublicTree> {
        grid.check_spec(root.spec())?;
        let mut tree = PublicTree { nodes: Vec::new(), by_history: HashMap::new() };
        tree.grow(root, None, grid, max_nodes)?;
        Ok(tree)
    }

    fn grow(&mut self, betting: Betting, parent: Option<u32>, grid: &ActionGrid, max_nodes: usize) -> Result<u32> {
        if self.nodes.len() >= max_nodes {
            return Err(Error::TooLarge(format!("betting tree exceeds {max_nodes} nodes")));
        }
        let id = self.nodes.len() as u32;
        let history = history_string(betting.history(), betting.round());
        let phase = betting.phase();
        self.nodes.push(PublicNode { betting: betting.clone(), kind: PublicKind::Terminal, parent, history });
        let kind = match phase {
            Phase::Act(player) => {
                let mut children = Vec::new();
                for action in grid.actions(&betting) {
                    let mut next = betting.clone();
                    next.apply(action)?;
                    children.push((action, self.grow(next, Some(id), grid, max_nodes)?));
                }
                PublicKind::Decision { player, children }
            }
            Phase::Deal(round) => {
                let mut next = betting.clone();
                next.deal_done()?;
                PublicKind::Deal { round, child: self.grow(next, Some(id), grid, max_nodes)? }
            }
            Phase::Showdown | Phase::Folded(_) => PublicKind::Terminal,
        };
        let node = &mut self.nodes[id as usize];
        node.kind = kind;
        if matches!(node.kind, PublicKind::Decision { .. }) {
            self.by_history.insert(node.history.clone(), id);
        }
        Ok(id)
    }

    pub fn root(&self) -> u32 {
        0
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: u32) -> &PublicNode {
        &self.nodes[id as usize]
    }

    pub fn nodes(&self) -> &[PublicNode] {
        &self.nodes
    }

    pub fn child(&self, id: u32, action: Action) -> Option<u32> {
        match &self.nodes[id as usize].kind {
            PublicKind::Decision { children, .. } => children.iter().find(|c| c.0 == action).map(|c| c.1),
            _ => None,
        }
    }

    /// Decision node whose history string is `history`.
    pub fn find(&self, history: &str) -> Option<u32> {
        self.by_history.get(history).copied()
    }

    /// Follows deal nodes down to the next decision or terminal.
    pub fn skip_deals(&self, mut id: u32) -> u32 {
        while let PublicKind::Deal { child, .. } = self.nodes[id as usize].kind {
            id = child;
        }
        id
    }

    /// Decisions on the way from the root to `id`, with the action index
    /// taken at each.
    pub fn path(&self, mut id: u32) -> Vec<(u32, usize)> {
        let mut out = Vec::new();
        while let Some(parent) = self.nodes[id as usize].parent {
            if let PublicKind::Decision { children, .. } = &self.nodes[parent as usize].kind {
                let a = children.iter().position(|c| c.1 == id).expect("child of its parent");
                out.push((parent, a));
            }
            id = parent;
        }
        out.reverse();
        out
    }

    /// Node reached by playing `actions` from the root, skipping deals.
    pub fn walk(&self, actions: &[Action]) -> Option<u32> {
        let mut id = self.root();
        for &a in actions {
            id = self.child(self.skip_deals(id), a)?;
        }
        Some(id)
    }

    pub fn decision_nodes(&self) -> impl Iterator<Item = (u32, &PublicNode)> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| matches!(n.kind, PublicKind::Decision { .. }))
            .map(|(i, n)| (i as u32, n))
    }
}

/// Action grid plus card bucketing for one game spec.
#[derive(Clone)]
pub struct Abstraction {
    pub spec: Arc<GameSpec>,
    pub grid: ActionGrid,
    pub bucketing: Arc<dyn CardBucketing>,
}

impl Abstraction {
    pub fn new(spec: Arc<GameSpec>, grid: ActionGrid, bucketing: Arc<dyn CardBucketing>) -> Result<Self> {
        grid.check_spec(&spec)?;
        Ok(Abstraction { spec, grid, bucketing })
    }

    pub fn hash(&self) -> u64 {
        let mut bytes = self.grid.hash().to_le_bytes().to_vec();
        bytes.extend_from_slice(&self.bucketing.hash().to_le_bytes());
        stable_hash(&bytes)
    }

    pub fn key(&self, tree: &PublicTree, node: u32, private: &[crate::cards::Card], board: &[crate::cards::Card]) -> InfoSetKey {
        let n = tree.node(node);
        let round = n.round();
        let player = n.betting.to_act().expect("decision node");
        let (pb, bb) = self.bucketing.bucket(round, private, board);
        InfoSetKey::new(
            player,
            &self.bucketing.private_label(round, pb),
            &self.bucketing.board_label(round, bb),
            &n.history,
        )
    }
}

/// Cards of one deal reduced to what the abstract game needs: per player
/// and round the combined bucket index, and the showdown comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct DealBuckets {
    pub buckets: [Vec<u32>; 2],
    pub showdown: Ordering,
}

#[derive(Clone, Debug)]
pub struct AbsNode {
    pub public: u32,
    pub deal: Option<Arc<DealBuckets>>,
}

/// The abstract game: a chance move dealing the cards, then the public tree
/// with each decision split by the acting player's bucket.
pub struct AbstractGame {
    abstraction: Abstraction,
    tree: PublicTree,
    offsets: Vec<usize>,
    decision_order: Vec<u32>,
    total: usize,
    deals: Option<Vec<Deal>>,
}

/// Deals beyond this count are sampled only.
pub const MAX_ENUMERATED_DEALS: usize = 100_000;

impl AbstractGame {
    pub fn new(abstraction: Abstraction, max_nodes: usize) -> Result<Self> {
        let tree = PublicTree::build(Betting::new(abstraction.spec.clone()), &abstraction.grid, max_nodes)?;
        let mut offsets = vec![usize::MAX; tree.len()];
        let mut decision_order = Vec::new();
        let mut total = 0usize;
        for (id, node) in tree.decision_nodes() {
            let (p, b) = abstraction.bucketing.dims(node.round());
            offsets[id as usize] = total;
            decision_order.push(id);
            total += (p as usize) * (b as usize);
        }
        let spec = &abstraction.spec;
        let deal_count = count_deals(spec);
        let deals = (deal_count <= MAX_ENUMERATED_DEALS as f64).then(|| Deal::enumerate(spec));
        Ok(AbstractGame { abstraction, tree, offsets, decision_order, total, deals })
    }

    /// Card-lossless game for small specs: default grid, rank-only keys.
    pub fn lossless(spec: GameSpec, max_nodes: usize) -> Result<Self> {
        let spec = Arc::new(spec);
        let grid = super::build_action_grid(&spec, &super::GridConfig::default())?;
        let bucketing = Arc::new(crate::game::RankBucketing::new(&spec));
        AbstractGame::new(Abstraction::new(spec, grid, bucketing)?, max_nodes)
    }

    pub fn abstraction(&self) -> &Abstraction {
        &self.abstraction
    }

    pub fn tree(&self) -> &PublicTree {
        &self.tree
    }

    pub fn deal_buckets(&self, deal: &Deal) -> DealBuckets {
        let spec = &self.abstraction.spec;
        let mut buckets = [Vec::new(), Vec::new()];
        for round in 0..spec.num_rounds() {
            let board = deal.board_for_round(spec, round);
            let (_, width) = self.abstraction.bucketing.dims(round);
            let pair = self.abstraction.bucketing.bucket_pair(round, [&deal.private[0], &deal.private[1]], board);
            for p in 0..2 {
                buckets[p].push(pair[p].0 * width + pair[p].1);
            }
        }
        let showdown = hand_strength(spec.showdown, &deal.private[0], &deal.board)
            .cmp(&hand_strength(spec.showdown, &deal.private[1], &deal.board));
        DealBuckets { buckets, showdown }
    }

    pub fn node_for(&self, public: u32, deal: &Deal) -> AbsNode {
        AbsNode { public, deal: Some(Arc::new(self.deal_buckets(deal))) }
    }

    /// Dense infoset id for `player` holding `bucket` at decision `public`.
    pub fn infoset_id(&self, public: u32, bucket: u32) -> usize {
        self.offsets[public as usize] + bucket as usize
    }
}

fn count_deals(spec: &GameSpec) -> f64 {
    let mut remaining = spec.deck().len() as f64;
    let mut total = 1.0;
    let k = spec.private_cards as usize;
    for take in [k, k].into_iter().chain(spec.board_cards.iter().map(|&b| b as usize)) {
        for i in 0..take {
            total *= (remaining - i as f64) / (i as f64 + 1.0);
        }
        remaining -= take as f64;
    }
    total
}

impl Game for AbstractGame {
    type Node = AbsNode;

    fn root(&self) -> AbsNode {
        AbsNode { public: self.tree.root(), deal: None }
    }

    fn kind(&self, node: &AbsNode) -> NodeKind {
        let Some(deal) = &node.deal else { return NodeKind::Chance };
        let n = self.tree.node(node.public);
        match &n.kind {
            PublicKind::Decision { player, children } => NodeKind::Decision {
                player: *player,
                infoset: self.offsets[node.public as usize] + deal.buckets[player.index()][n.round()] as usize,
                actions: children.len(),
            },
            PublicKind::Terminal => {
                NodeKind::Terminal(n.betting.payoff(deal.showdown).expect("terminal betting") as f64)
            }
            PublicKind::Deal { .. } => unreachable!("deal nodes are skipped"),
        }
    }

    fn chance_outcomes(&self, node: &AbsNode) -> Result<Vec<(AbsNode, f64)>> {
        if node.deal.is_some() {
            return Ok(Vec::new());
        }
        let deals = self
            .deals
            .as_ref()
            .ok_or_else(|| Error::TooLarge(format!("{} has too many deals to enumerate", self.abstraction.spec.name)))?;
        let p = 1.0 / deals.len() as f64;
        let start = self.tree.skip_deals(self.tree.root());
        Ok(deals.iter().map(|d| (self.node_for(start, d), p)).collect())
    }

    fn sample_chance<R: Rng>(&self, _node: &AbsNode, rng: &mut R) -> AbsNode {
        let deal = Deal::random(&self.abstraction.spec, rng);
        self.node_for(self.tree.skip_deals(self.tree.root()), &deal)
    }

    fn child(&self, node: &AbsNode, action: usize) -> AbsNode {
        let PublicKind::Decision { children, .. } = &self.tree.node(node.public).kind else {
            panic!("child of a non-decision node");
        };
        AbsNode { public: self.tree.skip_deals(children[action].1), deal: node.deal.clone() }
    }

    fn num_infosets(&self) -> usize {
        self.total
    }

    fn infoset_actions(&self, infoset: usize) -> usize {
        match &self.tree.node(self.owner(infoset)).kind {
            PublicKind::Decision { children, .. } => children.len(),
            _ => 0,
        }
    }

    fn infoset_key(&self, infoset: usize) -> InfoSetKey {
        let public = self.owner(infoset);
        let n = self.tree.node(public);
        let round = n.round();
        let (_, width) = self.abstraction.bucketing.dims(round);
        let bucket = (infoset - self.offsets[public as usize]) as u32;
        let b = &self.abstraction.bucketing;
        InfoSetKey::new(
            n.betting.to_act().expect("decision node"),
            &b.private_label(round, bucket / width),
            &b.board_label(round, bucket % width),
            &n.history,
        )
    }

    fn action_labels(&self, infoset: usize) -> Vec<String> {
        match &self.tree.node(self.owner(infoset)).kind {
            PublicKind::Decision { children, .. } => children.iter().map(|c| c.0.token()).collect(),
            _ => Vec::new(),
        }
    }

    fn game_hash(&self) -> u64 {
        self.abstraction.spec.hash()
    }

    fn abstraction_hash(&self) -> u64 {
        self.abstraction.hash()
    }
}

impl AbstractGame {
    fn owner(&self, infoset: usize) -> u32 {
        let i = self.decision_order.partition_point(|&id| self.offsets[id as usize] <= infoset);
        self.decision_order[i - 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abstraction::{build_action_grid, BetSize, GridConfig, RoundGrid};
    use crate::equilibrium::GameTree;
    use crate::game::RankBucketing;

    fn leduc() -> AbstractGame {
        let spec = Arc::new(GameSpec::leduc());
        let grid = build_action_grid(&spec, &GridConfig::default()).unwrap();
        let bucketing = Arc::new(RankBucketing::new(&spec));
        AbstractGame::new(Abstraction::new(spec, grid, bucketing).unwrap(), 100_000).unwrap()
    }

    #[test]
    fn leduc_public_tree_and_infosets() {
        let g = leduc();
        let tree = GameTree::from_game(&g, 1_000_000).unwrap();
        // 6 first-round histories x 3 cards, 30 second-round histories x 9
        assert_eq!(tree.infosets().len(), 288);
        let key = g.infoset_key(g.infoset_id(g.tree().root(), 2));
        assert_eq!(key.as_str(), "P1|K||");
    }

    #[test]
    fn kuhn_terminals() {
        let spec = Arc::new(GameSpec::kuhn());
        let grid = build_action_grid(&spec, &GridConfig::default()).unwrap();
        let g = AbstractGame::new(Abstraction::new(spec.clone(), grid, Arc::new(RankBucketing::new(&spec))).unwrap(), 1000)
            .unwrap();
        let terminals = g.tree().nodes().iter().filter(|n| n.kind == PublicKind::Terminal).count();
        assert_eq!(terminals, 5);
        assert_eq!(GameTree::from_game(&g, 1000).unwrap().infosets().len(), 12);
    }

    #[test]
    fn grid_hash_must_match_spec() {
        let spec = Arc::new(GameSpec::river_nlhe());
        let grid = build_action_grid(
            &GameSpec::mini_nlhe(),
            &GridConfig::uniform(RoundGrid::new(vec![BetSize::AllIn], vec![]), None),
        )
        .unwrap();
        let err = Abstraction::new(spec.clone(), grid, Arc::new(RankBucketing::new(&spec))).err().unwrap();
        assert!(matches!(err, Error::HashMismatch { .. }));
    }

    #[test]
    fn river_tree_history_lookup() {
        let spec = Arc::new(GameSpec::river_nlhe());
        let cfg = GridConfig::uniform(RoundGrid::new(vec![BetSize::Pot(1.0), BetSize::AllIn], vec![BetSize::AllIn]), Some(2));
        let grid = build_action_grid(&spec, &cfg).unwrap();
        let tree = PublicTree::build(Betting::new(spec), &grid, 100_000).unwrap();
        let limp = tree.find("c").unwrap();
        assert_eq!(tree.node(limp).betting.to_act(), Some(Player::P2));
        let river = tree.find("ck/").unwrap();
        assert_eq!(tree.node(river).betting.total_pot(), 200);
        assert_eq!(tree.node(river).betting.to_act(), Some(Player::P2));
        assert_eq!(tree.child(river, Action::RaiseTo(200)).map(|c| tree.node(c).history.as_str()), Some("ck/r200"));
    }
}
