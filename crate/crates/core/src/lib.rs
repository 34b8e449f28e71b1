//! Heads-up poker solving: game engine, abstractions, equilibrium solvers,
//! action translation, endgame re-solving and a duplicate match harness.

pub mod abstraction;
pub mod cards;
pub mod config;
pub mod error;
pub mod equilibrium;
pub mod endgame;
pub mod eval;
pub mod game;
pub mod harness;
pub mod lp;
pub mod postprocess;
pub mod translation;

pub use error::{Error, Result};
