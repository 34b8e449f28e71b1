use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use super::agent::{Agent, AllInAgent, ScriptedAgent, StrategyAgent, StrategyConfig, UniformAgent};
use crate::config::Config;
use crate::equilibrium::StrategyTable;
use crate::error::{Error, Result};
use crate::game::Action;

/// An agent named on the command line or in a session config.
///
/// - `uniform`
/// - `all-in`
/// - `script:r250,c,k` plays the listed action tokens, then checks or calls
/// - `cfr:strat.bin` plays a saved table; the config is read from the file
///   beside it with a `.toml` extension, or from `cfr:strat.bin@other.toml`
#[derive(Clone, Debug, PartialEq)]
pub enum AgentSpec {
    Uniform,
    AllIn,
    Script(Vec<Action>),
    Strategy { table: PathBuf, config: PathBuf },
}

impl FromStr for AgentSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => return Ok(AgentSpec::Uniform),
            "all-in" => return Ok(AgentSpec::AllIn),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("script:") {
            let actions = rest
                .split(',')
                .filter(|t| !t.is_empty())
                .map(|t| Action::parse_token(t).ok_or_else(|| Error::Parse(format!("bad action token {t:?}"))))
                .collect::<Result<Vec<_>>>()?;
            return Ok(AgentSpec::Script(actions));
        }
        if let Some(rest) = s.strip_prefix("cfr:") {
            let (table, config) = match rest.split_once('@') {
                Some((t, c)) => (PathBuf::from(t), PathBuf::from(c)),
                None => (PathBuf::from(rest), Path::new(rest).with_extension("toml")),
            };
            if table.as_os_str().is_empty() {
                return Err(Error::Parse("cfr: needs a table path".into()));
            }
            return Ok(AgentSpec::Strategy { table, config });
        }
        Err(Error::Parse(format!("unknown agent {s:?}; expected uniform, all-in, script:... or cfr:...")))
    }
}

impl fmt::Display for AgentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AgentSpec::Uniform => f.write_str("uniform"),
            AgentSpec::AllIn => f.write_str("all-in"),
            AgentSpec::Script(a) => {
                let tokens: Vec<String> = a.iter().map(|a| a.token()).collect();
                write!(f, "script:{}", tokens.join(","))
            }
            AgentSpec::Strategy { table, config } => write!(f, "cfr:{}@{}", table.display(), config.display()),
        }
    }
}

impl AgentSpec {
    /// Resolves relative paths against `dir`.
    pub fn relative_to(self, dir: &Path) -> Self {
        match self {
            AgentSpec::Strategy { table, config } => AgentSpec::Strategy { table: dir.join(table), config: dir.join(config) },
            other => other,
        }
    }

    /// Loads the agent. `endgame` switches final-round solving off when
    /// false even if the config enables it.
    pub fn load(&self, endgame: bool) -> Result<Box<dyn Agent>> {
        Ok(match self {
            AgentSpec::Uniform => Box::new(UniformAgent::new()),
            AgentSpec::AllIn => Box::new(AllInAgent),
            AgentSpec::Script(a) => Box::new(ScriptedAgent::new(a.clone())),
            AgentSpec::Strategy { table, config } => {
                Box::new(StrategyAgent::new(Arc::new(load_strategy(table, config, endgame)?)))
            }
        })
    }
}

fn missing(what: &str, path: &Path) -> Error {
    Error::InvalidConfig(format!("{what} {} not found", path.display()))
}

pub fn load_strategy(table: &Path, config: &Path, endgame: bool) -> Result<StrategyConfig> {
    if !table.exists() {
        return Err(missing("strategy table", table));
    }
    if !config.exists() {
        return Err(missing("strategy config", config));
    }
    let cfg = Config::load(config)?;
    let game = cfg.abstract_game()?;
    let trunk = StrategyTable::load(table)?;
    let spec = game.abstraction().spec.clone();
    let settings = if endgame { cfg.endgame_settings(&spec)? } else { None };
    let name = format!("cfr:{}", table.file_stem().map(|s| s.to_string_lossy()).unwrap_or_default());
    StrategyConfig::new(name, &game, trunk, cfg.schedule()?.as_ref(), settings)
        .map_err(|e| Error::InvalidConfig(format!("strategy table {}: {e}", table.display())))
}
