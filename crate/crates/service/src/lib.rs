//! HTTP API and configuration for the `facetnet` binary.

pub mod api;
pub mod config;

pub use api::{router, AppState};
pub use config::ServiceConfig;
