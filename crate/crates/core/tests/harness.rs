mod common;

use std::sync::Arc;

use limp_core::game::{Action, GameSpec, Player};
use limp_core::harness::*;
use proptest::prelude::*;

#[test]
fn win_rate_examples() {
    assert!((bb_per_100(732_713, 80_000, 100).unwrap() - 9.16).abs() < 0.005);
    assert_eq!(bb_per_100(0, 80_000, 100).unwrap(), 0.0);
    assert_eq!(bb_per_100(100, 100, 100).unwrap(), 1.0);
    assert!(bb_per_100(1, 0, 100).is_err());
}

#[test]
fn reversed_cards_expose_the_stronger_player() {
    let spec = Arc::new(GameSpec::river_nlhe());
    let deal = common::aces_vs_kings();
    // the first agent holds aces and wins 5,000, then holds kings and loses 10,000
    let mut a0 = ScriptedAgent::new(vec![Action::RaiseTo(5_000), Action::Check]);
    let mut b0 = ScriptedAgent::new(vec![Action::Call, Action::Check]);
    let r0 = play_hand(&spec, &deal, [&mut a0, &mut b0], common::rngs(0), common::id(0, Player::P1)).unwrap();
    let mut a1 = ScriptedAgent::new(vec![Action::Call, Action::Check]);
    let mut b1 = ScriptedAgent::new(vec![Action::RaiseTo(10_000), Action::Check]);
    let r1 = play_hand(&spec, &deal, [&mut b1, &mut a1], common::rngs(0), common::id(1, Player::P2)).unwrap();
    assert_eq!(r0.result_a(), 5_000);
    assert_eq!(r1.result_a(), -10_000);
    assert_eq!(r0.result_a() + r1.result_a(), -5_000);
}

#[test]
fn illegal_action_forfeits_the_hand() {
    let spec = GameSpec::river_nlhe();
    let bad = ScriptedAgent::new(vec![Action::RaiseTo(1)]);
    let r = play_duplicate_match(&bad, &AllInAgent, 3, &spec, 1).unwrap();
    assert_eq!(r.forfeits, 6);
    for rec in r.records() {
        let f = rec.forfeit.as_ref().unwrap();
        assert_eq!(f.action, Some(Action::RaiseTo(1)));
        // the forfeiting side loses what it had committed
        let lost = if f.player == Player::P1 { 50 } else { 100 };
        assert_eq!(rec.result_p1.abs(), lost);
    }
}

#[test]
fn all_in_game_cancels_exactly() {
    let spec = GameSpec::river_nlhe();
    let r = play_duplicate_match(&AllInAgent, &AllInAgent, 200, &spec, 3).unwrap();
    assert!(r.pairs.iter().all(|p| p.combined == 0));
    assert_eq!(r.total_a, 0);
    assert_eq!(r.var_pair, 0.0);
    let v = variance_comparison(&AllInAgent, &AllInAgent, 200, &spec, 3).unwrap();
    assert_eq!(v.var_duplicate, 0.0);
    assert!(v.var_independent > 0.0);
    assert!(v.duplicate_lower);
}

#[test]
fn identical_deterministic_agents_cancel() {
    let spec = GameSpec::leduc();
    let a = ScriptedAgent::new(vec![Action::RaiseTo(2), Action::Call, Action::Check]);
    let r = play_duplicate_match(&a, &a.clone(), 100, &spec, 9).unwrap();
    assert!(r.pairs.iter().all(|p| p.combined == 0));
}

#[test]
fn same_seed_same_match() {
    let spec = GameSpec::leduc();
    let a = play_duplicate_match(&UniformAgent::new(), &AllInAgent, 50, &spec, 11).unwrap();
    let b = play_duplicate_match(&UniformAgent::new(), &AllInAgent, 50, &spec, 11).unwrap();
    assert_eq!(a, b);
    let c = play_duplicate_match(&UniformAgent::new(), &AllInAgent, 50, &spec, 12).unwrap();
    assert_ne!(a, c);
}

#[test]
fn pairs_share_cards_and_sides_balance() {
    let spec = GameSpec::leduc();
    let r = play_duplicate_match(&UniformAgent::new(), &AllInAgent, 100, &spec, 5).unwrap();
    for p in &r.pairs {
        let [x, y] = &p.records;
        assert_eq!((&x.private, &x.board), (&y.private, &y.board));
        assert_eq!((&x.seats[0], &x.seats[1]), (&y.seats[1], &y.seats[0]));
    }
    let records: Vec<_> = r.records().cloned().collect();
    let report = match_report(&records, big_blind_unit(&spec)).unwrap();
    assert_eq!(report.broken_pairs, 0);
    assert_eq!(report.agents.iter().map(|a| a.total).sum::<i64>(), 0);
    let uniform = report.agents.iter().find(|a| a.label == "uniform").unwrap();
    assert_eq!(uniform.total, r.total_a);
}

#[test]
fn hand_history_round_trip() {
    let spec = GameSpec::leduc();
    let r = play_duplicate_match(&UniformAgent::new(), &UniformAgent::new(), 20, &spec, 2).unwrap();
    let records: Vec<_> = r.records().cloned().collect();
    let mut buf = Vec::new();
    write_jsonl(&mut buf, &records).unwrap();
    assert_eq!(buf.iter().filter(|&&b| b == b'\n').count(), 40);
    assert_eq!(read_jsonl(buf.as_slice()).unwrap(), records);
    let bad = String::from_utf8(buf).unwrap().replacen("\"schema\":1", "\"schema\":9", 1);
    assert!(read_jsonl(bad.as_bytes()).is_err());
}

#[test]
fn on_grid_opponent_leaves_no_divergence() {
    // the opponent only ever moves all-in, which is on the grid
    let spec = GameSpec::river_nlhe();
    let r = play_duplicate_match(&common::river_agent(false), &AllInAgent, 30, &spec, 4).unwrap();
    let records: Vec<_> = r.records().cloned().collect();
    let report = off_tree_report(&records, 5);
    assert_eq!(report.hands_with_divergence, 0);
    assert!(report.worst.is_empty());
}

#[test]
fn below_grid_raise_misleads_the_trunk() {
    let rec = common::off_tree_hand(false);
    let first = rec.decisions[1].diagnostics.as_ref().unwrap();
    let e = &first.translations[0];
    assert!((e.x - 0.75).abs() < 1e-12);
    assert_eq!((e.a, e.b), (0.0, 1.0));
    assert!((e.f.unwrap() - 1.0 / 7.0).abs() < 1e-12);
    assert_eq!(first.true_pot, 350);
    assert_eq!(first.perceived_pot, Some(200));
    let trace = rec.perception_trace(Player::P2, 0);
    assert!(trace.max_divergence() > 0);
    // once off the tree, the trunk never catches up within the hand
    let divs: Vec<u32> = trace.entries.iter().map(|e| e.divergence).collect();
    assert!(divs.windows(2).all(|w| w[0] <= w[1]), "{divs:?}");
    let report = off_tree_report(std::slice::from_ref(&rec), 3);
    assert_eq!(report.hands_with_divergence, 1);
    assert_eq!(report.f_histogram[1], 1);
}

#[test]
fn endgame_uses_the_true_pot() {
    let rec = common::off_tree_hand(true);
    let river = rec
        .decisions
        .iter()
        .find(|d| d.round == 1 && d.player == Player::P2)
        .and_then(|d| d.diagnostics.as_ref())
        .unwrap();
    let eg = river.endgame.as_ref().expect("endgame solved on the river");
    assert_eq!(eg.pot, river.true_pot);
    assert_eq!(eg.contributions[0], eg.contributions[1]);
    assert_eq!(river.divergence, 0);
    assert!(river.true_pot >= 500);
    let preflop = rec.decisions[1].diagnostics.as_ref().unwrap();
    assert!(preflop.divergence > 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn payouts_fill_the_pool(mut x in prop::array::uniform4(-1_000_000i64..1_000_000)) {
        x.sort_unstable_by(|a, b| b.cmp(a));
        let p = compute_payouts(x[0], x[1], x[2], x[3]).unwrap();
        prop_assert_eq!(p.cents.iter().sum::<i64>(), POOL_CENTS);
        prop_assert!(p.cents.iter().all(|&c| c >= FLOOR_CENTS));
        prop_assert!(p.cents.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn unsorted_profits_rejected(x in prop::array::uniform4(-100i64..100)) {
        let sorted = x.windows(2).all(|w| w[0] >= w[1]);
        prop_assert_eq!(compute_payouts(x[0], x[1], x[2], x[3]).is_ok(), sorted);
    }
}
