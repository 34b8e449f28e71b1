#![allow(dead_code)]

use std::sync::Arc;

use limp_core::abstraction::{
    build_action_grid, AbsNode, AbstractGame, Abstraction, BetSize, GridConfig, HoldemBucketConfig, HoldemBucketing,
    PublicKind, RoundGrid,
};
use limp_core::cards::{parse_cards, Card, CardSet};
use limp_core::equilibrium::{Game, NodeKind, StrategyTable};
use limp_core::game::{Action, Deal, GameSpec, Player};
use limp_core::harness::*;
use rand::Rng;

pub fn leduc() -> AbstractGame {
    AbstractGame::lossless(GameSpec::leduc(), 100_000).unwrap()
}

/// Random behaviour strategy; about a fifth of the entries are exactly zero.
pub fn random_trunk<R: Rng>(game: &AbstractGame, rng: &mut R) -> StrategyTable {
    let mut t = StrategyTable::uniform(game);
    for i in 0..game.num_infosets() {
        let n = game.infoset_actions(i);
        let mut v: Vec<f64> = (0..n).map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(0.01..1.0) }).collect();
        if v.iter().all(|&x| x == 0.0) {
            v[rng.gen_range(0..n)] = 1.0;
        }
        let s: f64 = v.iter().sum();
        t.insert(game.infoset_key(i), v.iter().map(|x| x / s).collect());
    }
    t
}

/// A random final-round decision node and a board card.
pub fn random_final_round_node<R: Rng>(game: &AbstractGame, rng: &mut R) -> (u32, Vec<Card>) {
    let tree = game.tree();
    let last = game.abstraction().spec.num_rounds() - 1;
    let mut id = tree.root();
    loop {
        let node = tree.node(id);
        match &node.kind {
            PublicKind::Deal { child, .. } => id = *child,
            PublicKind::Decision { children, .. } => {
                let open: Vec<u32> = children
                    .iter()
                    .map(|c| c.1)
                    .filter(|&c| !matches!(tree.node(c).kind, PublicKind::Terminal))
                    .collect();
                if node.round() == last && (open.is_empty() || rng.gen_bool(0.5)) {
                    break;
                }
                id = open[rng.gen_range(0..open.len())];
            }
            PublicKind::Terminal => unreachable!(),
        }
    }
    let deck = game.abstraction().spec.deck();
    (id, vec![deck[rng.gen_range(0..deck.len())]])
}

/// Posterior over each player's private hand by enumerating every deal with
/// this board, multiplying both players' trunk probabilities along the path
/// and marginalizing the joint. `None` when the path has zero probability.
pub fn brute_force_ranges(
    game: &AbstractGame,
    trunk: &StrategyTable,
    node: u32,
    board: &[Card],
) -> Option<[Vec<(u64, f64)>; 2]> {
    let tree = game.tree();
    let path = tree.path(node);
    let mut marg: [std::collections::HashMap<u64, f64>; 2] = Default::default();
    let mut total = 0.0;
    for deal in Deal::enumerate(&game.abstraction().spec) {
        if deal.board[..board.len()] != *board {
            continue;
        }
        let buckets = Arc::new(game.deal_buckets(&deal));
        let mut w = 1.0;
        for &(id, action) in &path {
            let n = AbsNode { public: id, deal: Some(buckets.clone()) };
            let NodeKind::Decision { infoset, .. } = game.kind(&n) else { panic!("path through a non-decision") };
            w *= trunk.get(&game.infoset_key(infoset)).unwrap()[action];
        }
        total += w;
        for p in 0..2 {
            *marg[p].entry(CardSet::from_cards(&deal.private[p]).0).or_default() += w;
        }
    }
    if total == 0.0 {
        return None;
    }
    Some(marg.map(|m| m.into_iter().map(|(k, v)| (k, v / total)).collect()))
}

pub fn river_game() -> AbstractGame {
    let spec = Arc::new(GameSpec::river_nlhe());
    let sizes = vec![BetSize::Pot(1.0), BetSize::AllIn];
    let grid = build_action_grid(&spec, &GridConfig::uniform(RoundGrid::new(sizes.clone(), sizes), Some(2))).unwrap();
    let bucketing = HoldemBucketing::new(&spec, HoldemBucketConfig::default()).unwrap();
    AbstractGame::new(Abstraction::new(spec, grid, Arc::new(bucketing)).unwrap(), 100_000).unwrap()
}

pub fn river_agent(endgame: bool) -> StrategyAgent {
    let game = river_game();
    let trunk = StrategyTable::uniform(&game);
    let settings = endgame.then(|| {
        let sizes = vec![BetSize::Pot(0.5), BetSize::Pot(1.0), BetSize::AllIn];
        let grid = build_action_grid(
            &game.abstraction().spec,
            &GridConfig::uniform(RoundGrid::new(sizes, vec![BetSize::Pot(1.0), BetSize::AllIn]), Some(2)),
        )
        .unwrap();
        EndgameSettings { grid, buckets: [4, 4] }
    });
    StrategyAgent::new(Arc::new(StrategyConfig::new("trunk", &game, trunk, None, settings).unwrap()))
}

pub fn aces_vs_kings() -> Deal {
    Deal {
        private: [parse_cards("AsAd").unwrap(), parse_cards("KsKd").unwrap()],
        board: parse_cards("2c7d9hJc3h").unwrap(),
    }
}

pub fn id(play: u8, a_seat: Player) -> HandId {
    HandId { hand_id: play as u64, pair: 0, play, a_seat }
}

pub fn rngs(seed: u64) -> [rand_chacha::ChaCha8Rng; 2] {
    [derive_rng(seed, "test", &[0]), derive_rng(seed, "test", &[1])]
}

/// Plays the below-grid raise to 250 against the strategy agent until a
/// seed maps it down to a call.
pub fn off_tree_hand(endgame: bool) -> HandRecord {
    let spec = Arc::new(GameSpec::river_nlhe());
    let deal = aces_vs_kings();
    let mut agent = river_agent(endgame);
    for seed in 0..1000 {
        let mut raiser = ScriptedAgent::new(vec![Action::RaiseTo(250)]);
        let rec = play_hand(&spec, &deal, [&mut raiser, &mut agent], rngs(seed), id(0, Player::P1)).unwrap();
        let first = rec.decisions[1].diagnostics.as_ref().unwrap();
        let reached_river = rec.decisions.iter().any(|d| d.round == 1 && d.player == Player::P2);
        if first.translations.first().is_some_and(|e| e.mapped_down) && reached_river {
            return rec;
        }
    }
    panic!("no seed mapped the raise down");
}

