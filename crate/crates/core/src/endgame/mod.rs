//! Final-round subgames solved exactly against Bayes-updated ranges.

pub mod equity;
pub mod instance;
pub mod ranges;

pub use equity::{conditional_equities, EquityVector};
pub use instance::{
    build_endgame, endgame_policy, endgame_tree, solve_endgame_lp, EndgameInstance, EndgameSolution, EndgameStats,
    clairvoyance, PolicyLookup, SolvedEndgame, MAX_ENDGAME_SEQUENCES,
};
pub use ranges::{compute_reach_ranges, compute_reach_ranges_or_fallback, joint_marginals, RangeDistribution};
