//! Exploration sessions: provenance trees of chained views.
//!
//! Every session starts from a graph view built with a filter and a
//! topology. Selecting a node, edge or egocentric bar spawns a child view
//! (egocentric, listing or temporal) over the records behind that selection,
//! so each child covers a subset of its parent.

mod session;
mod store;
mod view;

use thiserror::Error;

pub use session::{create_session, ExplorationSession, ROOT_VIEW};
pub use store::{SessionHandle, SessionStore, DEFAULT_SESSION_CAP};
pub use view::{
    EgoNeighbor, Egocentric, Listing, ListingRow, Payload, Selection, Subset, Temporal, ViewId,
    ViewKind, ViewNode, UNKNOWN_BUCKET,
};

use crate::network::NetworkError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExplorerError {
    #[error("view {0} does not exist in this session")]
    UnknownView(ViewId),
    #[error("cannot spawn a {requested} view from a {parent} view")]
    WrongParentKind { parent: ViewKind, requested: ViewKind },
    #[error("invalid selection: {0}")]
    InvalidSelection(String),
    #[error("the root view cannot be closed")]
    CloseRoot,
    #[error(transparent)]
    Network(#[from] NetworkError),
}
