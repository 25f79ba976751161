use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::topology::{NetworkKind, TopologySpec};
use crate::catalog::FilterSpec;

/// Which topology variable a node's value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Source,
    Target,
    Both,
}

impl Side {
    pub(crate) fn merge(self, other: Side) -> Side {
        if self == other {
            self
        } else {
            Side::Both
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Source => "source",
            Side::Target => "target",
            Side::Both => "both",
        }
    }
}

/// One link value attached to an edge (or held by a node), with the records
/// that contributed it and the thematic values those records carry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeItem {
    pub link_value: String,
    /// Contributing record ids, sorted.
    pub records: BTreeSet<String>,
    /// Multiset of thematic values over the contributing records.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub themes: BTreeMap<String, usize>,
    /// Contributors lacking the thematic facet. Always zero without a thematic variable.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub themes_missing: usize,
}

fn is_zero(n: &usize) -> bool {
    *n == 0
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub side: Side,
    /// Number of distinct link values the node holds.
    pub size: usize,
    /// The node's link values, sorted by value.
    pub items: Vec<EdgeItem>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub source: String,
    pub target: String,
    /// Shared link values, sorted by value; never empty.
    pub items: Vec<EdgeItem>,
}

impl Edge {
    pub fn touches(&self, node: &str) -> bool {
        self.source == node || self.target == node
    }

    /// The endpoint opposite `node`.
    pub fn other(&self, node: &str) -> Option<&str> {
        if self.source == node {
            Some(&self.target)
        } else if self.target == node {
            Some(&self.source)
        } else {
            None
        }
    }

    pub fn records(&self) -> BTreeSet<&str> {
        self.items
            .iter()
            .flat_map(|i| i.records.iter().map(String::as_str))
            .collect()
    }
}

/// What the clutter guard removed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    pub nodes_total: usize,
    pub nodes_kept: usize,
    pub edges_total: usize,
    pub edges_kept: usize,
}

/// A built co-occurrence network together with the request that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Network {
    pub kind: NetworkKind,
    pub topology: TopologySpec,
    pub filter: FilterSpec,
    /// Sorted by id.
    pub nodes: Vec<Node>,
    /// Sorted by `(source, target)`.
    pub edges: Vec<Edge>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<Truncation>,
}

impl Network {
    pub fn empty(kind: NetworkKind, topology: TopologySpec, filter: FilterSpec) -> Self {
        Self {
            kind,
            topology,
            filter,
            nodes: Vec::new(),
            edges: Vec::new(),
            truncation: None,
        }
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes
            .binary_search_by(|n| n.id.as_str().cmp(id))
            .ok()
            .map(|i| &self.nodes[i])
    }

    /// The edge joining `a` and `b`, in either orientation.
    pub fn edge_between(&self, a: &str, b: &str) -> Option<&Edge> {
        let find = |s: &str, t: &str| {
            self.edges
                .binary_search_by(|e| (e.source.as_str(), e.target.as_str()).cmp(&(s, t)))
                .ok()
                .map(|i| &self.edges[i])
        };
        find(a, b).or_else(|| find(b, a))
    }

    pub fn incident_edges<'a>(&'a self, node: &'a str) -> impl Iterator<Item = &'a Edge> + 'a {
        self.edges.iter().filter(move |e| e.touches(node))
    }

    pub fn is_isolated(&self, node: &str) -> bool {
        self.incident_edges(node).next().is_none()
    }

    /// Every record id contributing to any node or edge item.
    pub fn records(&self) -> BTreeSet<&str> {
        self.nodes
            .iter()
            .flat_map(|n| n.items.iter())
            .chain(self.edges.iter().flat_map(|e| e.items.iter()))
            .flat_map(|i| i.records.iter().map(String::as_str))
            .collect()
    }
}
