//! Co-occurrence networks over filtered catalog records.

mod build;
mod export;
mod model;
mod summary;
mod topology;

use thiserror::Error;

pub use build::{build_network, BuildOptions, DEFAULT_MAX_EDGES, DEFAULT_MAX_NODES};
pub use export::{export_network, import_network, ExportFormat};
pub use model::{Edge, EdgeItem, Network, Node, Side, Truncation};
pub use summary::{node_summary, theme_counts, thematic_breakdown, NodeSummary};
pub use topology::{validate_topology, NetworkKind, Role, TopologyError, TopologySpec, ValidTopology};

use crate::catalog::CatalogError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetworkError {
    #[error("invalid topology: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Topology(Vec<TopologyError>),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("node {0:?} is not in the network")]
    UnknownNode(String),
    #[error("no edge between {0:?} and {1:?}")]
    UnknownEdge(String, String),
    #[error("the network has no thematic variable")]
    NoThematic,
    #[error("unsupported export format {0:?}")]
    UnsupportedFormat(String),
    #[error("cannot import network: {0}")]
    Import(String),
}

impl From<Vec<TopologyError>> for NetworkError {
    fn from(errors: Vec<TopologyError>) -> Self {
        NetworkError::Topology(errors)
    }
}
