use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::model::{Edge, EdgeItem, Network};
use super::NetworkError;
use crate::catalog::{ValueCount, MISSING_VALUE};

/// Hover details for one node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeSummary {
    pub id: String,
    pub neighbor_count: usize,
    pub distinct_item_count: usize,
    pub link_values: Vec<String>,
}

impl fmt::Display for NodeSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} connected \u{b7} {} unique items",
            self.id, self.neighbor_count, self.distinct_item_count
        )
    }
}

pub fn node_summary(network: &Network, node_id: &str) -> Result<NodeSummary, NetworkError> {
    let node = network
        .node(node_id)
        .ok_or_else(|| NetworkError::UnknownNode(node_id.to_string()))?;
    let neighbors: BTreeSet<&str> = network
        .incident_edges(node_id)
        .filter_map(|e| e.other(node_id))
        .collect();
    Ok(NodeSummary {
        id: node.id.clone(),
        neighbor_count: neighbors.len(),
        distinct_item_count: node.size,
        link_values: node.items.iter().map(|i| i.link_value.clone()).collect(),
    })
}

/// Thematic segments of an edge: one unit per (item, contributing record,
/// thematic value), with contributors lacking the facet under
/// [`MISSING_VALUE`]. Sorted by descending count then value; the missing
/// bucket comes last.
pub fn thematic_breakdown(network: &Network, edge: &Edge) -> Result<Vec<ValueCount>, NetworkError> {
    if network.topology.thematic.is_none() {
        return Err(NetworkError::NoThematic);
    }
    Ok(theme_counts(&edge.items))
}

/// Thematic tally over a set of items, ordered as in [`thematic_breakdown`].
pub fn theme_counts<'a>(items: impl IntoIterator<Item = &'a EdgeItem>) -> Vec<ValueCount> {
    let mut tally: BTreeMap<&str, usize> = BTreeMap::new();
    let mut missing = 0;
    for item in items {
        for (theme, n) in &item.themes {
            *tally.entry(theme.as_str()).or_default() += n;
        }
        missing += item.themes_missing;
    }
    let mut out: Vec<ValueCount> = tally
        .into_iter()
        .map(|(value, count)| ValueCount {
            value: value.to_string(),
            count,
        })
        .collect();
    out.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.value.cmp(&b.value)));
    if missing > 0 {
        out.push(ValueCount {
            value: MISSING_VALUE.to_string(),
            count: missing,
        });
    }
    out
}
