//! Dataset discovery over tagged catalog metadata.
//!
//! The pipeline is:
//!
//! 1. [`ingest`]: load dataset cards (files or a hub listing API), split
//!    their `prefix:value` tags into facets and freeze the result into a
//!    [`CatalogSnapshot`](ingest::CatalogSnapshot).
//! 2. [`catalog`]: index a snapshot for faceted filtering and
//!    count-annotated value lists.
//! 3. [`network`]: turn the filtered records into a co-occurrence network
//!    described by a source/target/link/thematic topology.
//! 4. [`explorer`]: chain egocentric, listing and temporal views off a
//!    network, keeping the provenance tree of the exploration.

pub mod catalog;
pub mod explorer;
pub mod ingest;
pub mod network;

pub use catalog::{build_index, FacetIndex, FilterSpec, MatchMode};
pub use explorer::{create_session, ExplorationSession, SessionStore};
pub use ingest::{CatalogSnapshot, DatasetRecord, FacetSchema, RawCard};
pub use network::{build_network, validate_topology, BuildOptions, Network, TopologySpec};
