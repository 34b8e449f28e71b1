use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::ServiceError;

/// Server settings from a TOML file, then the environment:
/// `LIMP_BIND`, `LIMP_PORT`, `LIMP_STRATEGY_DIR` and `LIMP_LOG_DIR`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceConfig {
    #[serde(default = "default_bind")]
    pub bind: String,
    #[serde(default = "default_port")]
    pub port: u16,
    /// Where strategy tables and their configs are looked up.
    #[serde(default = "default_strategy_dir")]
    pub strategy_dir: PathBuf,
    /// Session hand histories; none are written when absent.
    #[serde(default)]
    pub log_dir: Option<PathBuf>,
}

fn default_bind() -> String {
    "127.0.0.1".into()
}

fn default_port() -> u16 {
    8080
}

fn default_strategy_dir() -> PathBuf {
    PathBuf::from(".")
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig { bind: default_bind(), port: default_port(), strategy_dir: default_strategy_dir(), log_dir: None }
    }
}

impl ServiceConfig {
    pub fn from_toml(text: &str) -> Result<Self, ServiceError> {
        toml::from_str(text).map_err(|e| ServiceError::BadConfig(e.to_string()))
    }

    /// Reads `path` if given, then applies environment overrides.
    pub fn load(path: Option<&Path>) -> Result<Self, ServiceError> {
        let mut c = match path {
            Some(p) => Self::from_toml(
                &std::fs::read_to_string(p).map_err(|e| ServiceError::BadConfig(format!("{}: {e}", p.display())))?,
            )?,
            None => Self::default(),
        };
        c.apply_env(|k| std::env::var(k).ok())?;
        Ok(c)
    }

    pub fn apply_env(&mut self, get: impl Fn(&str) -> Option<String>) -> Result<(), ServiceError> {
        if let Some(b) = get("LIMP_BIND") {
            self.bind = b;
        }
        if let Some(p) = get("LIMP_PORT") {
            self.port = p.parse().map_err(|_| ServiceError::BadConfig(format!("LIMP_PORT={p} is not a port")))?;
        }
        if let Some(d) = get("LIMP_STRATEGY_DIR") {
            self.strategy_dir = d.into();
        }
        if let Some(d) = get("LIMP_LOG_DIR") {
            self.log_dir = Some(d.into());
        }
        Ok(())
    }

    pub fn addr(&self) -> Result<SocketAddr, ServiceError> {
        format!("{}:{}", self.bind, self.port)
            .parse()
            .map_err(|e| ServiceError::BadConfig(format!("bind address: {e}")))
    }
}
