//! Live sessions against a strategy agent: server-authoritative game state,
//! redacted views, and an ordered, resumable event stream.

pub mod config;
pub mod error;
pub mod protocol;
pub mod server;
pub mod session;

pub use config::ServiceConfig;
pub use error::ServiceError;
pub use server::{router, serve, AppState};
pub use session::{PairLink, Session, SessionConfig};
