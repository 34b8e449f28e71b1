mod common;

use std::collections::BTreeSet;

use limp_core::abstraction::{build_action_grid, private_hands, BetSize, GridConfig, RoundGrid};
use limp_core::cards::{parse_cards, Card, CardSet};
use limp_core::endgame::*;
use limp_core::equilibrium::{
    best_response, solve_sequence_form, table_exploitability, toys, Profile,
};
use limp_core::game::{GameSpec, Player};
use limp_core::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn clairvoyance_large_stack_moves_toward_full_pot() {
    for s in [1u32, 3, 100] {
        let solved = SolvedEndgame::solve(clairvoyance(s).unwrap()).unwrap();
        let s_f = s as f64;
        let bluff = solved.policy(Player::P1, &[Card::new(0, 0)], "").unwrap().probs[1];
        let all_in = format!("r{}", 100 * s);
        let call = solved.policy(Player::P2, &[Card::new(1, 0)], &all_in).unwrap().probs[1];
        let share = solved.solution.p1_pot_share(&solved.instance) / solved.instance.pot as f64;
        assert!((bluff - s_f / (1.0 + s_f)).abs() < 1e-6, "s={s} bluff {bluff}");
        assert!((call - 1.0 / (1.0 + s_f)).abs() < 1e-6, "s={s} call {call}");
        assert!((share - 0.5 * (1.0 + s_f / (1.0 + s_f))).abs() < 1e-6, "s={s} share {share}");
    }
}

#[test]
fn sequential_rps_endgame_value_is_zero() {
    let endgame = toys::rps_endgame_with_fixed_p1();
    let sol = solve_sequence_form(&endgame).unwrap();
    assert!(sol.value.abs() < 1e-9);
    // the same player 2 strategy placed in the full game; its exploitability
    // is reported, not asserted
    let full = toys::rock_paper_scissors();
    let mut table = sol.strategy.clone();
    for info in full.infosets().iter().filter(|i| i.player == Player::P1) {
        table.insert(info.key.clone(), vec![1.0 / 3.0; 3]);
    }
    let e = table_exploitability(&full, &table).unwrap();
    println!("sequential rps: endgame value {:.3e}, full-game exploitability {e:.6}", sol.value);
    assert!(e.is_finite());
}

fn leduc_instance(seed: u64, k: [u32; 2]) -> EndgameInstance {
    let game = common::leduc();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let trunk = common::random_trunk(&game, &mut rng);
        let (node, board) = common::random_final_round_node(&game, &mut rng);
        let round_start = game.tree().path(node).iter().map(|&(id, _)| id).find(|&id| game.tree().node(id).round() == 1);
        let start = round_start.unwrap_or(node);
        let betting = &game.tree().node(start).betting;
        let contributions = Player::BOTH.map(|p| betting.total_commit(p));
        let grid = build_action_grid(&game.abstraction().spec, &GridConfig::default()).unwrap();
        if let Ok(inst) = build_endgame(&trunk, game.abstraction(), game.tree(), start, &board, contributions, grid, k) {
            return inst;
        }
    }
}

#[test]
fn best_response_gains_nothing_inside_the_endgame() {
    for seed in 0..10 {
        let inst = leduc_instance(seed, [3, 3]);
        let sol = solve_endgame_lp(&inst).unwrap();
        assert!((sol.value - sol.value_p2).abs() < 1e-6);
        let (tree, _, _) = endgame_tree(&inst).unwrap();
        let profile = Profile::resolve(&tree, &sol.strategy, None).unwrap();
        let br1 = best_response(&tree, &profile, Player::P1).value;
        let br2 = best_response(&tree, &profile, Player::P2).value;
        assert!(br1 - sol.value <= 1e-6, "seed {seed}: {br1} vs {}", sol.value);
        assert!(br2 + sol.value <= 1e-6, "seed {seed}: {br2} vs {}", -sol.value);
    }
}

#[test]
fn reach_ranges_match_the_pairwise_oracle() {
    let game = common::leduc();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut checked = 0;
    for _ in 0..100 {
        let trunk = common::random_trunk(&game, &mut rng);
        let (node, board) = common::random_final_round_node(&game, &mut rng);
        let fast = compute_reach_ranges(&trunk, game.abstraction(), game.tree(), node, &board);
        match (fast, common::brute_force_ranges(&game, &trunk, node, &board)) {
            (Ok(ranges), Some(oracle)) => {
                for p in 0..2 {
                    for (h, &prob) in ranges[p].hands.iter().zip(&ranges[p].prob) {
                        let m = CardSet::from_cards(h).0;
                        let want = oracle[p].iter().find(|o| o.0 == m).map_or(0.0, |o| o.1);
                        assert!((prob - want).abs() < 1e-10);
                    }
                }
                checked += 1;
            }
            (Err(Error::ZeroReach(_)), None) => {}
            (fast, oracle) => panic!("disagree: {:?} vs {:?}", fast.map(|_| ()), oracle.map(|_| ())),
        }
    }
    assert!(checked > 50);
}

#[test]
fn enough_buckets_make_the_endgame_lossless() {
    let inst = leduc_instance(3, [1, 1]);
    for p in 0..2 {
        let support: Vec<usize> = (0..inst.ranges[p].hands.len()).filter(|&i| inst.ranges[p].prob[i] > 0.0).collect();
        let distinct: BTreeSet<u64> = support.iter().map(|&i| inst.equities[p][i].to_bits()).collect();
        let k = distinct.len() as u32;
        let mut ks = [1, 1];
        ks[p] = k;
        let full = EndgameInstance::from_ranges(
            inst.spec.clone(),
            inst.board.clone(),
            inst.contributions,
            inst.ranges.clone(),
            inst.grid.clone(),
            ks,
        )
        .unwrap();
        assert_eq!(full.bucket_counts[p], k);
        for &i in &support {
            for &j in &support {
                let same = full.buckets[p][i] == full.buckets[p][j];
                assert_eq!(same, full.equities[p][i] == full.equities[p][j]);
            }
        }
    }
}

fn blocker_instance() -> EndgameInstance {
    let spec = GameSpec::river_nlhe();
    let board = parse_cards("JsTs4sKcQh").unwrap();
    let hands = private_hands(&spec.deck(), 2, CardSet::from_cards(&board));
    let n = hands.len();
    let range = |player| RangeDistribution { player, hands: hands.clone(), reach: vec![1.0; n], prob: Vec::new() };
    let grid =
        build_action_grid(&spec, &GridConfig::uniform(RoundGrid::new(vec![BetSize::Pot(1.0)], vec![]), Some(1))).unwrap();
    EndgameInstance::from_ranges(spec, board, [100, 100], [range(Player::P1), range(Player::P2)], grid, [6, 6]).unwrap()
}

#[test]
fn removal_shrinks_flush_mass_but_not_the_bucket() {
    let inst = blocker_instance();
    let opp = &inst.ranges[1];
    let spade = parse_cards("As").unwrap()[0].suit();
    let flush_share = |mine: &str| {
        let m = CardSet::from_cards(&parse_cards(mine).unwrap());
        let (mut flush, mut all) = (0.0, 0.0);
        for (h, &w) in opp.hands.iter().zip(&opp.reach) {
            if CardSet::from_cards(h).intersects(m) {
                continue;
            }
            all += w;
            if h.iter().all(|c| c.suit() == spade) {
                flush += w;
            }
        }
        flush / all
    };
    assert!(opp.hands.iter().any(|h| CardSet::from_cards(h) == CardSet::from_cards(&parse_cards("As3s").unwrap())));
    assert!(flush_share("3s2c") < flush_share("3c2c"));
    let low = inst.bucket_of(Player::P2, &parse_cards("3c2c").unwrap());
    assert_eq!(low, inst.bucket_of(Player::P2, &parse_cards("3s2c").unwrap()));
    assert_eq!(low, Some(0));
}

#[test]
fn same_bucket_same_policy() {
    let solved = SolvedEndgame::solve(blocker_instance()).unwrap();
    let root = solved.tree.node(solved.tree.root());
    let (first, h) = (root.betting.to_act().unwrap(), root.history.as_str());
    let a = solved.policy(first, &parse_cards("3c2c").unwrap(), h).unwrap();
    let b = solved.policy(first, &parse_cards("3s2c").unwrap(), h).unwrap();
    assert!(!a.fallback);
    assert_eq!(a.probs, b.probs);
    let blocked = solved.policy(first, &parse_cards("Js2c").unwrap(), h);
    assert!(matches!(blocked, Ok(p) if p.fallback));
}

#[test]
fn instances_round_trip_and_hash_stably() {
    let inst = leduc_instance(5, [3, 3]);
    let json = serde_json::to_string(&inst).unwrap();
    let back: EndgameInstance = serde_json::from_str(&json).unwrap();
    assert_eq!(back, inst);
    assert_eq!(back.hash(), inst.hash());
    assert_eq!(leduc_instance(5, [3, 3]).hash(), inst.hash());
    let sol = solve_endgame_lp(&inst).unwrap();
    let sol_json = serde_json::to_string(&sol).unwrap();
    let sol_back: EndgameSolution = serde_json::from_str(&sol_json).unwrap();
    assert_eq!(sol_back.strategy.len(), sol.strategy.len());
}
