use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("duplicate card {0}")]
    DuplicateCard(String),
    #[error("invalid game spec: {0}")]
    InvalidSpec(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("illegal action {action}: {reason}")]
    IllegalAction { action: String, reason: String },
    #[error("state is terminal")]
    Terminal,
    #[error("{what} hash mismatch: expected {expected:016x}, found {found:016x}")]
    HashMismatch { what: &'static str, expected: u64, found: u64 },
    #[error("strategy table has no entry for infoset {0}")]
    MissingInfoset(String),
    #[error("game too large for exact traversal: {0}")]
    TooLarge(String),
    #[error("degenerate translation interval: A = B = {0}")]
    DegenerateInterval(f64),
    #[error("empty action grid")]
    EmptyGrid,
    #[error("threshold {0} outside [0, 1)")]
    BadThreshold(f64),
    #[error("history has zero reach under the trunk strategy: {0}")]
    ZeroReach(String),
    #[error("history not in endgame tree: {0}")]
    UnknownHistory(String),
    #[error("linear program failed: {0}")]
    Lp(String),
    #[error("unsorted payout input: profits must be non-increasing")]
    UnsortedProfits,
    #[error("bad strategy file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
