use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::catalog::ValueCount;
use crate::network::Network;

pub type ViewId = u32;

/// Pseudo-bucket for records without a creation timestamp.
pub const UNKNOWN_BUCKET: &str = "(unknown)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ViewKind {
    Graph,
    Egocentric,
    Listing,
    Temporal,
}

impl fmt::Display for ViewKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViewKind::Graph => "graph",
            ViewKind::Egocentric => "egocentric",
            ViewKind::Listing => "listing",
            ViewKind::Temporal => "temporal",
        })
    }
}

/// The element of a parent view a child view was spawned from.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Selection {
    /// A node of a graph view, or the center of an egocentric view.
    Node { id: String },
    /// An edge of a graph view.
    Edge { source: String, target: String },
    /// The bar between an egocentric view's center and one neighbor.
    Pair { neighbor: String },
}

impl Selection {
    pub fn node(id: &str) -> Self {
        Selection::Node { id: id.to_string() }
    }

    pub fn edge(source: &str, target: &str) -> Self {
        Selection::Edge {
            source: source.to_string(),
            target: target.to_string(),
        }
    }

    pub fn pair(neighbor: &str) -> Self {
        Selection::Pair {
            neighbor: neighbor.to_string(),
        }
    }
}

/// Records and link values a view covers.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subset {
    pub records: BTreeSet<String>,
    pub link_values: BTreeSet<String>,
}

impl Subset {
    pub fn is_subset(&self, other: &Subset) -> bool {
        self.records.is_subset(&other.records) && self.link_values.is_subset(&other.link_values)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EgoNeighbor {
    pub neighbor: String,
    /// Distinct link values shared with the center.
    pub bar_total: usize,
    pub segments: Vec<ValueCount>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Egocentric {
    pub center: String,
    pub neighbors: Vec<EgoNeighbor>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ListingRow {
    pub link_value: String,
    pub records: Vec<String>,
    pub themes: Vec<ValueCount>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub url: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Listing {
    /// Facet the listed values belong to.
    pub facet: String,
    pub rows: Vec<ListingRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Temporal {
    /// `YYYY-MM` buckets in calendar order, then [`UNKNOWN_BUCKET`].
    pub buckets: Vec<ValueCount>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "lowercase")]
pub enum Payload {
    Graph(Network),
    Egocentric(Egocentric),
    Listing(Listing),
    Temporal(Temporal),
}

impl Payload {
    pub fn kind(&self) -> ViewKind {
        match self {
            Payload::Graph(_) => ViewKind::Graph,
            Payload::Egocentric(_) => ViewKind::Egocentric,
            Payload::Listing(_) => ViewKind::Listing,
            Payload::Temporal(_) => ViewKind::Temporal,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViewNode {
    pub id: ViewId,
    pub parent: Option<ViewId>,
    pub selection: Option<Selection>,
    pub payload: Payload,
    pub subset: Subset,
}

impl ViewNode {
    pub fn kind(&self) -> ViewKind {
        self.payload.kind()
    }
}
