use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::model::{Edge, EdgeItem, Network, Node, Side, Truncation};
use super::topology::{NetworkKind, ValidTopology};
use crate::catalog::{CatalogError, FacetIndex, FilterSpec, Ordinal};
use crate::ingest::DatasetRecord;

pub const DEFAULT_MAX_NODES: usize = 2_000;
pub const DEFAULT_MAX_EDGES: usize = 10_000;

/// Size limits and presentation switches for [`build_network`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildOptions {
    pub max_nodes: usize,
    pub max_edges: usize,
    #[serde(default)]
    pub hide_isolated: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            max_nodes: DEFAULT_MAX_NODES,
            max_edges: DEFAULT_MAX_EDGES,
            hide_isolated: false,
        }
    }
}

impl BuildOptions {
    /// No ceilings; every node and edge is kept.
    pub fn unlimited() -> Self {
        Self {
            max_nodes: usize::MAX,
            max_edges: usize::MAX,
            hide_isolated: false,
        }
    }
}

// link value -> contributing ordinals
type ItemAcc<'a> = BTreeMap<&'a str, BTreeSet<Ordinal>>;

/// Builds the co-occurrence network of the records matching `filter`.
///
/// Bipartite topologies (source facet differs from target facet) connect
/// `s` and `t` when a single record holds both and at least one link value;
/// every link value of such a record becomes an item of the edge.
///
/// Unipartite topologies connect `u` and `v` when some link value `l` is
/// held by a record carrying `u` and by a record carrying `v` (possibly the
/// same one). The edge items are the shared link values, each contributed by
/// the records that establish possession of `l` by `u` or by `v`.
///
/// Nodes are all source/target values present in the matching records; a
/// node's size is the number of distinct link values it holds.
pub fn build_network(
    index: &FacetIndex,
    filter: &FilterSpec,
    topology: &ValidTopology,
    options: &BuildOptions,
) -> Result<Network, CatalogError> {
    let matched = index.matching(filter)?;
    let spec = topology.spec();
    let records = index.records();
    let empty = BTreeSet::new();

    let mut nodes: BTreeMap<&str, (Side, ItemAcc)> = BTreeMap::new();
    let mut edges: BTreeMap<(&str, &str), ItemAcc> = BTreeMap::new();

    let sides: &[(&str, Side)] = match topology.kind() {
        NetworkKind::Bipartite => &[(spec.source.as_str(), Side::Source), (spec.target.as_str(), Side::Target)],
        NetworkKind::Unipartite => &[(spec.source.as_str(), Side::Both)],
    };

    for ord in matched.ones() {
        let record = &records[ord];
        let ord = ord as Ordinal;
        let links = record.facets.get(&spec.link).unwrap_or(&empty);
        for &(facet, side) in sides {
            for value in record.facets.get(facet).unwrap_or(&empty) {
                let entry = nodes
                    .entry(value.as_str())
                    .or_insert_with(|| (side, BTreeMap::new()));
                entry.0 = entry.0.merge(side);
                for l in links {
                    entry.1.entry(l.as_str()).or_default().insert(ord);
                }
            }
        }
    }

    match topology.kind() {
        NetworkKind::Bipartite => {
            for ord in matched.ones() {
                let record = &records[ord];
                let Some(links) = record.facets.get(&spec.link) else {
                    continue;
                };
                let (Some(sources), Some(targets)) =
                    (record.facets.get(&spec.source), record.facets.get(&spec.target))
                else {
                    continue;
                };
                for s in sources {
                    for t in targets {
                        if s == t {
                            continue;
                        }
                        let items = edges.entry((s.as_str(), t.as_str())).or_default();
                        for l in links {
                            items.entry(l.as_str()).or_default().insert(ord as Ordinal);
                        }
                    }
                }
            }
        }
        NetworkKind::Unipartite => {
            // link value -> node value -> ordinals establishing possession
            let mut possession: BTreeMap<&str, BTreeMap<&str, BTreeSet<Ordinal>>> = BTreeMap::new();
            for (node, (_, items)) in &nodes {
                for (l, ords) in items {
                    possession
                        .entry(*l)
                        .or_default()
                        .insert(*node, ords.clone());
                }
            }
            for (l, holders) in &possession {
                if holders.len() < 2 {
                    continue;
                }
                let holders: Vec<(&str, &BTreeSet<Ordinal>)> =
                    holders.iter().map(|(n, o)| (*n, o)).collect();
                for (i, (u, u_ords)) in holders.iter().enumerate() {
                    for (v, v_ords) in &holders[i + 1..] {
                        let contributors = edges
                            .entry((*u, *v))
                            .or_default()
                            .entry(*l)
                            .or_default();
                        contributors.extend(u_ords.iter().copied());
                        contributors.extend(v_ords.iter().copied());
                    }
                }
            }
        }
    }

    let thematic = spec.thematic.as_deref();
    let to_items = |acc: ItemAcc| -> Vec<EdgeItem> {
        acc.into_iter()
            .map(|(l, ords)| make_item(records, l, &ords, thematic))
            .collect()
    };

    let mut network = Network::empty(topology.kind(), spec.clone(), filter.clone());
    network.nodes = nodes
        .into_iter()
        .map(|(id, (side, acc))| {
            let items = to_items(acc);
            Node {
                id: id.to_string(),
                side,
                size: items.len(),
                items,
            }
        })
        .collect();
    network.edges = edges
        .into_iter()
        .map(|((s, t), acc)| Edge {
            source: s.to_string(),
            target: t.to_string(),
            items: to_items(acc),
        })
        .collect();

    apply_limits(&mut network, options);
    Ok(network)
}

fn make_item(
    records: &[DatasetRecord],
    link_value: &str,
    contributors: &BTreeSet<Ordinal>,
    thematic: Option<&str>,
) -> EdgeItem {
    let mut item = EdgeItem {
        link_value: link_value.to_string(),
        records: BTreeSet::new(),
        themes: BTreeMap::new(),
        themes_missing: 0,
    };
    for &ord in contributors {
        let record = &records[ord as usize];
        item.records.insert(record.id.clone());
        if let Some(facet) = thematic {
            match record.facets.get(facet) {
                Some(vs) => {
                    for v in vs {
                        *item.themes.entry(v.clone()).or_default() += 1;
                    }
                }
                None => item.themes_missing += 1,
            }
        }
    }
    item
}

/// Clutter guard: keeps the largest nodes, then the heaviest edges, and
/// optionally drops nodes left without edges. Ties break lexicographically.
fn apply_limits(network: &mut Network, options: &BuildOptions) {
    let nodes_total = network.nodes.len();
    let edges_total = network.edges.len();

    if network.nodes.len() > options.max_nodes {
        let mut ranked: Vec<&Node> = network.nodes.iter().collect();
        ranked.sort_by(|a, b| b.size.cmp(&a.size).then_with(|| a.id.cmp(&b.id)));
        let keep: BTreeSet<String> = ranked
            .into_iter()
            .take(options.max_nodes)
            .map(|n| n.id.clone())
            .collect();
        network.nodes.retain(|n| keep.contains(&n.id));
        network
            .edges
            .retain(|e| keep.contains(&e.source) && keep.contains(&e.target));
    }
    if network.edges.len() > options.max_edges {
        let mut ranked: Vec<(usize, &str, &str)> = network
            .edges
            .iter()
            .map(|e| (e.items.len(), e.source.as_str(), e.target.as_str()))
            .collect();
        ranked.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| (a.1, a.2).cmp(&(b.1, b.2))));
        let keep: BTreeSet<(String, String)> = ranked
            .into_iter()
            .take(options.max_edges)
            .map(|(_, s, t)| (s.to_string(), t.to_string()))
            .collect();
        network
            .edges
            .retain(|e| keep.contains(&(e.source.clone(), e.target.clone())));
    }
    if network.nodes.len() < nodes_total || network.edges.len() < edges_total {
        network.truncation = Some(Truncation {
            nodes_total,
            nodes_kept: network.nodes.len(),
            edges_total,
            edges_kept: network.edges.len(),
        });
    }
    if options.hide_isolated {
        let connected: BTreeSet<&str> = network
            .edges
            .iter()
            .flat_map(|e| [e.source.as_str(), e.target.as_str()])
            .collect();
        let connected: BTreeSet<String> = connected.into_iter().map(str::to_string).collect();
        network.nodes.retain(|n| connected.contains(&n.id));
    }
}
