//! Duplicate matches between agents, scoring and diagnostics.

mod agent;
mod duplicate;
mod load;
mod payouts;
mod record;
mod report;

pub use agent::{
    Agent, AllInAgent, Decision, Diagnostics, EndgameRef, EndgameSettings, Observation, PolicySource, ScriptedAgent,
    StrategyAgent, StrategyConfig, UniformAgent,
};
pub use duplicate::{
    bb_per_100, big_blind_unit, derive_rng, group_summary, mean_interval, play_duplicate_match, play_hand,
    variance_comparison, DuplicateResult, GroupSummary, HandId, PairResult, VarianceComparison,
};
pub use load::{load_strategy, AgentSpec};
pub use payouts::{compute_payouts, exact_payouts, PayoutResult, FLOOR_CENTS, POOL_CENTS};
pub use record::{
    read_jsonl, write_jsonl, DecisionLog, Forfeit, HandRecord, PerceptionEntry, PerceptionTrace, SCHEMA_VERSION,
};
pub use report::{match_report, off_tree_report, AgentLine, HandOffTree, MatchReport, OffTreeReport};
