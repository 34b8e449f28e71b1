#![allow(dead_code)]

use std::path::Path;

use limp_core::config::Config;
use limp_core::equilibrium::StrategyTable;
use limp_core::game::{Action, Player};
use limp_service::protocol::{Body, ProtocolMessage, StateView};
use limp_service::{Session, SessionConfig};
use tempfile::TempDir;

/// River hold'em, small enough to build quickly. Preflop has a raise to 250
/// from the small blind; the river opens with a quarter-pot bet.
pub const RIVER_CONFIG: &str = r#"
[game]
preset = "river-nlhe"

[grid]
max_raises = 2
[[grid.rounds]]
first_bet = [0.75, 1.0, "all-in"]
raise = [0.75, 1.0, "all-in"]
[[grid.rounds]]
first_bet = [0.25, 1.0, "all-in"]
raise = [1.0, "all-in"]

[buckets]
private_buckets = 4
board_clusters = 2
"#;

/// A strategy directory holding `river.bin` (a uniform table) and `river.toml`.
pub fn strategy_dir() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    write_uniform(dir.path());
    dir
}

pub fn write_uniform(dir: &Path) {
    std::fs::write(dir.join("river.toml"), RIVER_CONFIG).unwrap();
    let game = Config::from_toml(RIVER_CONFIG).unwrap().abstract_game().unwrap();
    StrategyTable::uniform(&game).save(&dir.join("river.bin")).unwrap();
}

pub fn config(agent: &str, seat: Player, seed: u64) -> SessionConfig {
    SessionConfig { human_seat: seat, seed: Some(seed), ..SessionConfig::against(agent) }
}

pub fn open(cfg: SessionConfig, dir: &Path) -> Session {
    Session::create("t".into(), cfg, dir, None).unwrap()
}

/// A deterministic legal reply: raise the minimum once per round when
/// `aggressive`, otherwise check or call.
pub fn passive_or_min_raise(state: &StateView, aggressive: bool) -> Action {
    let legal = state.legal.expect("human to act");
    let raised_this_round = state.history.iter().any(|r| r.round == state.round && matches!(r.action, Action::RaiseTo(_)));
    match (aggressive && !raised_this_round, legal.raise_min) {
        (true, Some(min)) => Action::RaiseTo(min),
        _ if legal.check => Action::Check,
        _ => Action::Call,
    }
}

/// Plays `hands` hands with the given human policy and closes the session.
pub fn play_out(s: &mut Session, hands: u64, mut policy: impl FnMut(&StateView) -> Action) {
    for h in 0..hands {
        if h > 0 {
            s.next_hand().unwrap();
        }
        while let Some(seq) = s.awaiting() {
            let state = s.view(limp_service::protocol::Viewer::Human);
            s.submit(seq, policy(&state)).unwrap();
        }
    }
    s.close();
}

pub fn states(m: &ProtocolMessage) -> Vec<&StateView> {
    match &m.body {
        Body::State(v) => vec![v],
        Body::ActionRequest(r) => vec![&r.state],
        Body::Error(e) => e.state.iter().collect(),
        _ => vec![],
    }
}
