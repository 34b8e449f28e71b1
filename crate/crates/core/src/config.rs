//! Main configuration file.
//!
//! ```toml
//! schedule = [0.0, 0.15]       # per-round thresholds applied to the trunk
//!
//! [game]
//! preset = "river-nlhe"        # or an inline [game.spec] table
//!
//! [grid]                       # action abstraction; optional for limit games
//! max_raises = 3
//! [[grid.rounds]]
//! first_bet = [0.5, 1.0, "all-in"]
//! raise = [1.0, "all-in"]
//!
//! [buckets]                    # hold'em card abstraction
//! private_buckets = 8
//! board_clusters = 4
//!
//! [endgame]
//! buckets = [8, 8]
//! max_fraction = 4.0           # drop larger pot fractions from the endgame grid
//! ```

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::abstraction::{
    build_action_grid, AbstractGame, Abstraction, ActionGrid, BetSize, GridConfig, HoldemBucketConfig, HoldemBucketing,
    RoundGrid,
};
use crate::error::{Error, Result};
use crate::game::{BettingRule, CardBucketing, GameSpec, RankBucketing, ShowdownRule};
use crate::harness::EndgameSettings;
use crate::postprocess::ThresholdSchedule;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameSection {
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub spec: Option<GameSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndgameSection {
    #[serde(default = "default_endgame_buckets")]
    pub buckets: [u32; 2],
    /// Endgame grid; the trunk grid when absent.
    #[serde(default)]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub max_fraction: Option<f64>,
}

fn default_endgame_buckets() -> [u32; 2] {
    [8, 8]
}

fn default_max_nodes() -> usize {
    1_000_000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub game: GameSection,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub buckets: Option<HoldemBucketConfig>,
    #[serde(default)]
    pub schedule: Option<Vec<f64>>,
    #[serde(default)]
    pub endgame: Option<EndgameSection>,
    #[serde(default = "default_max_nodes")]
    pub max_tree_nodes: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            game: GameSection::default(),
            grid: None,
            buckets: None,
            schedule: None,
            endgame: None,
            max_tree_nodes: default_max_nodes(),
        }
    }
}

/// Grid used for no-limit games when the config gives none.
pub fn default_no_limit_grid() -> GridConfig {
    GridConfig::uniform(
        RoundGrid::new(vec![BetSize::Pot(0.5), BetSize::Pot(1.0), BetSize::AllIn], vec![BetSize::Pot(1.0), BetSize::AllIn]),
        Some(3),
    )
}

impl Config {
    pub fn for_preset(name: &str) -> Self {
        Config { game: GameSection { preset: Some(name.into()), spec: None }, ..Default::default() }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn spec(&self) -> Result<GameSpec> {
        match (&self.game.preset, &self.game.spec) {
            (Some(_), Some(_)) => Err(Error::InvalidConfig("give either game.preset or game.spec, not both".into())),
            (Some(name), None) => GameSpec::preset(name),
            (None, Some(spec)) => {
                spec.validate()?;
                Ok(spec.clone())
            }
            (None, None) => Err(Error::InvalidConfig("no game configured".into())),
        }
    }

    fn grid_config(&self, spec: &GameSpec) -> GridConfig {
        match (&self.grid, &spec.betting) {
            (Some(g), _) => g.clone(),
            (None, BettingRule::NoLimit) => default_no_limit_grid(),
            (None, BettingRule::FixedLimit { .. }) => GridConfig::default(),
        }
    }

    pub fn grid(&self, spec: &GameSpec) -> Result<ActionGrid> {
        build_action_grid(spec, &self.grid_config(spec))
    }

    pub fn bucketing(&self, spec: &GameSpec) -> Result<Arc<dyn CardBucketing>> {
        if spec.showdown == ShowdownRule::Holdem {
            Ok(Arc::new(HoldemBucketing::new(spec, self.buckets.clone().unwrap_or_default())?))
        } else {
            Ok(Arc::new(RankBucketing::new(spec)))
        }
    }

    pub fn abstract_game(&self) -> Result<AbstractGame> {
        let spec = self.spec()?;
        let grid = self.grid(&spec)?;
        let bucketing = self.bucketing(&spec)?;
        AbstractGame::new(Abstraction::new(Arc::new(spec), grid, bucketing)?, self.max_tree_nodes)
    }

    pub fn schedule(&self) -> Result<Option<ThresholdSchedule>> {
        self.schedule.clone().map(ThresholdSchedule::new).transpose()
    }

    pub fn endgame_settings(&self, spec: &GameSpec) -> Result<Option<EndgameSettings>> {
        let Some(e) = &self.endgame else { return Ok(None) };
        let mut grid = match &e.grid {
            Some(g) => build_action_grid(spec, g)?,
            None => self.grid(spec)?,
        };
        if let Some(limit) = e.max_fraction {
            grid = grid.without_sizes_above(limit);
        }
        Ok(Some(EndgameSettings { grid, buckets: e.buckets }))
    }
}
