//! Action and information abstraction.

mod boards;
mod buckets;
mod grid;
mod holdem;
mod tree;

pub use boards::{board_features, cluster_boards, BoardClustering};
pub use buckets::{bucket_by_equity_percentiles, BucketMap, EQUITY_TIE};
pub use grid::{build_action_grid, pot_after_call, round_half_down, ActionGrid, BetSize, GridConfig, RoundGrid, SizedRaise};
pub use holdem::{
    preflop_class, preflop_label, private_hands, uniform_equities, HoldemBucketConfig, HoldemBucketing, PREFLOP_CLASSES,
};
pub use tree::{AbsNode, AbstractGame, Abstraction, DealBuckets, PublicKind, PublicNode, PublicTree, MAX_ENUMERATED_DEALS};
