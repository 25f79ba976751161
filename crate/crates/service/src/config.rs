//! Service configuration: a TOML file with `FACETNET_*` environment overrides.

use std::net::SocketAddr;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};

use facetnet_core::catalog::{MatchMode, UrlTemplate, UrlTemplates};
use facetnet_core::explorer::DEFAULT_SESSION_CAP;
use facetnet_core::network::{BuildOptions, DEFAULT_MAX_EDGES, DEFAULT_MAX_NODES};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const ENV_PREFIX: &str = "FACETNET_";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config {path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: toml::de::Error,
    },
    #[error("invalid value {value:?} for {key}: {reason}")]
    Override {
        key: String,
        value: String,
        reason: String,
    },
    #[error("{0} must be positive")]
    NotPositive(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Limits {
    pub max_nodes: usize,
    pub max_edges: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_nodes: DEFAULT_MAX_NODES,
            max_edges: DEFAULT_MAX_EDGES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceConfig {
    pub snapshot_path: Option<PathBuf>,
    pub listen: SocketAddr,
    pub url_templates: UrlTemplates,
    pub session_cap: usize,
    pub limits: Limits,
    /// Used when a request's filter does not name a mode.
    pub within_facet_mode: MatchMode,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            snapshot_path: None,
            listen: SocketAddr::from(([127, 0, 0, 1], 8080)),
            url_templates: UrlTemplates::default(),
            session_cap: DEFAULT_SESSION_CAP,
            limits: Limits::default(),
            within_facet_mode: MatchMode::Or,
        }
    }
}

impl ServiceConfig {
    /// Reads `path` if given (defaults otherwise), then applies environment
    /// overrides and validates.
    pub fn load(path: Option<&Path>) -> Result<Self, ConfigError> {
        let mut config = match path {
            Some(path) => Self::from_file(path)?,
            None => Self::default(),
        };
        config.apply_overrides(|key| std::env::var(key).ok())?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        toml::from_str(&text).map_err(|source| ConfigError::Parse {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Applies `FACETNET_*` variables looked up through `lookup`.
    pub fn apply_overrides(&mut self, lookup: impl Fn(&str) -> Option<String>) -> Result<(), ConfigError> {
        let get = |name: &str| {
            let key = format!("{ENV_PREFIX}{name}");
            lookup(&key).map(|v| (key, v))
        };
        fn bad(key: String, value: String, reason: impl ToString) -> ConfigError {
            ConfigError::Override {
                key,
                value,
                reason: reason.to_string(),
            }
        }

        if let Some((_, v)) = get("SNAPSHOT") {
            self.snapshot_path = Some(PathBuf::from(v));
        }
        if let Some((k, v)) = get("LISTEN") {
            self.listen = v.parse().map_err(|e| bad(k, v, e))?;
        }
        if let Some((k, v)) = get("DATASET_URL") {
            self.url_templates.dataset = UrlTemplate::new(v.clone()).map_err(|e| bad(k, v, e))?;
        }
        if let Some((k, v)) = get("MODEL_URL") {
            self.url_templates.model = UrlTemplate::new(v.clone()).map_err(|e| bad(k, v, e))?;
        }
        if let Some((k, v)) = get("SESSION_CAP") {
            self.session_cap = v.parse().map_err(|e| bad(k, v, e))?;
        }
        if let Some((k, v)) = get("MAX_NODES") {
            self.limits.max_nodes = v.parse().map_err(|e| bad(k, v, e))?;
        }
        if let Some((k, v)) = get("MAX_EDGES") {
            self.limits.max_edges = v.parse().map_err(|e| bad(k, v, e))?;
        }
        if let Some((k, v)) = get("MODE") {
            self.within_facet_mode = match v.to_ascii_lowercase().as_str() {
                "or" => MatchMode::Or,
                "and" => MatchMode::And,
                _ => return Err(bad(k, v, "expected \"or\" or \"and\"")),
            };
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.session_cap == 0 {
            return Err(ConfigError::NotPositive("session_cap"));
        }
        if self.limits.max_nodes == 0 {
            return Err(ConfigError::NotPositive("limits.max_nodes"));
        }
        if self.limits.max_edges == 0 {
            return Err(ConfigError::NotPositive("limits.max_edges"));
        }
        Ok(())
    }

    pub fn session_cap(&self) -> NonZeroUsize {
        NonZeroUsize::new(self.session_cap).unwrap_or(NonZeroUsize::MIN)
    }

    pub fn build_options(&self) -> BuildOptions {
        BuildOptions {
            max_nodes: self.limits.max_nodes,
            max_edges: self.limits.max_edges,
            hide_isolated: false,
        }
    }
}
