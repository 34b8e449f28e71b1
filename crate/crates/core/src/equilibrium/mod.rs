//! Equilibrium computation: game interface, regret minimization, exact
//! linear programs and best responses.

pub mod best_response;
pub mod cfr;
mod game;
pub mod sequence;
mod table;

pub use best_response::{
    best_response, exploitability, expected_value, table_expected_value, table_exploitability, BestResponse, Profile,
};
pub use cfr::{run_cfr, Cfr, CfrVariant};
pub use game::{toys, Game, GameTree, InfosetInfo, NodeKind, TreeBuilder, TreeNode};
pub use sequence::{solve_matrix_game, solve_sequence_form, SequenceSolution};
pub use table::{StrategyTable, TableMeta, SUM_TOLERANCE};
