use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, Utc};

use super::view::{
    EgoNeighbor, Egocentric, Listing, ListingRow, Payload, Selection, Subset, Temporal, ViewId,
    ViewKind, ViewNode, UNKNOWN_BUCKET,
};
use super::ExplorerError;
use crate::catalog::{FacetIndex, FilterSpec, UrlTemplates, ValueCount};
use crate::network::{
    build_network, theme_counts, validate_topology, BuildOptions, Edge, EdgeItem, Network,
    NetworkError, TopologySpec,
};

pub const ROOT_VIEW: ViewId = 0;

/// A tree of chained views rooted at one graph view.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplorationSession {
    id: String,
    created_at: DateTime<Utc>,
    views: BTreeMap<ViewId, ViewNode>,
    next_view: ViewId,
    urls: UrlTemplates,
}

/// Builds the root network and opens a session around it.
pub fn create_session(
    index: &FacetIndex,
    filter: &FilterSpec,
    topology: &TopologySpec,
    options: &BuildOptions,
    urls: UrlTemplates,
) -> Result<ExplorationSession, NetworkError> {
    let valid = validate_topology(topology, index.schema())?;
    let network = build_network(index, filter, &valid, options)?;
    let matched = index.apply_filter(filter)?;
    let subset = Subset {
        records: matched
            .into_iter()
            .map(|o| index.records()[o as usize].id.clone())
            .collect(),
        link_values: network
            .nodes
            .iter()
            .flat_map(|n| n.items.iter())
            .chain(network.edges.iter().flat_map(|e| e.items.iter()))
            .map(|i| i.link_value.clone())
            .collect(),
    };
    let root = ViewNode {
        id: ROOT_VIEW,
        parent: None,
        selection: None,
        payload: Payload::Graph(network),
        subset,
    };
    Ok(ExplorationSession {
        id: uuid::Uuid::new_v4().simple().to_string(),
        created_at: Utc::now(),
        views: BTreeMap::from([(ROOT_VIEW, root)]),
        next_view: ROOT_VIEW + 1,
        urls,
    })
}

impl ExplorationSession {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn created_at(&self) -> DateTime<Utc> {
        self.created_at
    }

    pub fn root(&self) -> &ViewNode {
        &self.views[&ROOT_VIEW]
    }

    pub fn network(&self) -> &Network {
        match &self.root().payload {
            Payload::Graph(n) => n,
            _ => unreachable!("root view is always a graph"),
        }
    }

    pub fn view(&self, id: ViewId) -> Result<&ViewNode, ExplorerError> {
        self.views.get(&id).ok_or(ExplorerError::UnknownView(id))
    }

    pub fn views(&self) -> impl Iterator<Item = &ViewNode> {
        self.views.values()
    }

    pub fn len(&self) -> usize {
        self.views.len()
    }

    pub fn is_empty(&self) -> bool {
        self.views.is_empty()
    }

    pub fn children(&self, id: ViewId) -> impl Iterator<Item = &ViewNode> {
        self.views.values().filter(move |v| v.parent == Some(id))
    }

    /// Ids from `id` up to the root, inclusive.
    pub fn ancestry(&self, id: ViewId) -> Vec<ViewId> {
        let mut out = Vec::new();
        let mut cur = self.views.get(&id);
        while let Some(v) = cur {
            out.push(v.id);
            cur = v.parent.and_then(|p| self.views.get(&p));
        }
        out
    }

    /// Spawns a view of `kind` from `selection` in `parent`.
    pub fn spawn(
        &mut self,
        index: &FacetIndex,
        parent: ViewId,
        kind: ViewKind,
        selection: &Selection,
    ) -> Result<&ViewNode, ExplorerError> {
        match kind {
            ViewKind::Egocentric => match selection {
                Selection::Node { id } => self.spawn_egocentric(parent, id),
                other => Err(ExplorerError::InvalidSelection(format!(
                    "an egocentric view centers on a node, got {other:?}"
                ))),
            },
            ViewKind::Listing => self.spawn_listing(parent, selection),
            ViewKind::Temporal => self.spawn_temporal(index, parent, selection),
            ViewKind::Graph => Err(ExplorerError::WrongParentKind {
                parent: self.view(parent)?.kind(),
                requested: ViewKind::Graph,
            }),
        }
    }

    /// Pairwise view around `center`: one bar per neighbor, sized by the
    /// number of shared link values and split by thematic value.
    pub fn spawn_egocentric(&mut self, parent: ViewId, center: &str) -> Result<&ViewNode, ExplorerError> {
        let parent_view = self.view(parent)?;
        if parent_view.kind() != ViewKind::Graph {
            return Err(ExplorerError::WrongParentKind {
                parent: parent_view.kind(),
                requested: ViewKind::Egocentric,
            });
        }
        let network = self.network();
        let node = network
            .node(center)
            .ok_or_else(|| NetworkError::UnknownNode(center.to_string()))?;

        let mut neighbors: Vec<EgoNeighbor> = network
            .incident_edges(center)
            .map(|edge| EgoNeighbor {
                neighbor: edge.other(center).expect("incident").to_string(),
                bar_total: edge.items.len(),
                segments: if network.topology.thematic.is_some() {
                    theme_counts(&edge.items)
                } else {
                    Vec::new()
                },
            })
            .collect();
        neighbors.sort_by(|a, b| {
            b.bar_total
                .cmp(&a.bar_total)
                .then_with(|| a.neighbor.cmp(&b.neighbor))
        });

        let subset = items_subset(
            node.items
                .iter()
                .chain(network.incident_edges(center).flat_map(|e| e.items.iter())),
        );
        let payload = Payload::Egocentric(Egocentric {
            center: center.to_string(),
            neighbors,
        });
        Ok(self.insert(parent, Selection::node(center), payload, subset))
    }

    /// Lists the link values under `selection`, with themes and source links.
    pub fn spawn_listing(&mut self, parent: ViewId, selection: &Selection) -> Result<&ViewNode, ExplorerError> {
        let items = self.resolve(parent, selection, ViewKind::Listing)?;
        let network = self.network();
        let facet = network.topology.link.clone();
        let with_themes = network.topology.thematic.is_some();
        let rows = items
            .iter()
            .map(|item| ListingRow {
                link_value: item.link_value.clone(),
                records: item.records.iter().cloned().collect(),
                themes: if with_themes {
                    theme_counts([item])
                } else {
                    Vec::new()
                },
                url: self.urls.for_facet_value(&facet, &item.link_value),
            })
            .collect();
        let subset = items_subset(items.iter());
        Ok(self.insert(
            parent,
            selection.clone(),
            Payload::Listing(Listing { facet, rows }),
            subset,
        ))
    }

    /// Per-month histogram of the creation dates of the records under `selection`.
    pub fn spawn_temporal(
        &mut self,
        index: &FacetIndex,
        parent: ViewId,
        selection: &Selection,
    ) -> Result<&ViewNode, ExplorerError> {
        let items = self.resolve(parent, selection, ViewKind::Temporal)?;
        let subset = items_subset(items.iter());
        let mut months: BTreeMap<String, usize> = BTreeMap::new();
        let mut unknown = 0;
        for id in &subset.records {
            let created = index
                .record_by_id(id)
                .ok()
                .and_then(|r| r.scalars.created_at);
            match created {
                Some(ts) => {
                    *months
                        .entry(ts.with_timezone(&Utc).format("%Y-%m").to_string())
                        .or_default() += 1
                }
                None => unknown += 1,
            }
        }
        let mut buckets: Vec<ValueCount> = months
            .into_iter()
            .map(|(value, count)| ValueCount { value, count })
            .collect();
        if unknown > 0 {
            buckets.push(ValueCount {
                value: UNKNOWN_BUCKET.to_string(),
                count: unknown,
            });
        }
        Ok(self.insert(
            parent,
            selection.clone(),
            Payload::Temporal(Temporal { buckets }),
            subset,
        ))
    }

    /// Removes a view and all of its descendants; returns how many were removed.
    pub fn close_view(&mut self, id: ViewId) -> Result<usize, ExplorerError> {
        if id == ROOT_VIEW {
            return Err(ExplorerError::CloseRoot);
        }
        self.view(id)?;
        let mut doomed = BTreeSet::from([id]);
        let mut frontier = vec![id];
        while let Some(v) = frontier.pop() {
            for child in self.children(v) {
                if doomed.insert(child.id) {
                    frontier.push(child.id);
                }
            }
        }
        self.views.retain(|k, _| !doomed.contains(k));
        Ok(doomed.len())
    }

    fn insert(&mut self, parent: ViewId, selection: Selection, payload: Payload, subset: Subset) -> &ViewNode {
        let id = self.next_view;
        self.next_view += 1;
        self.views.insert(
            id,
            ViewNode {
                id,
                parent: Some(parent),
                selection: Some(selection),
                payload,
                subset,
            },
        );
        &self.views[&id]
    }

    /// The items a selection in `parent` refers to.
    fn resolve(
        &self,
        parent: ViewId,
        selection: &Selection,
        requested: ViewKind,
    ) -> Result<Vec<EdgeItem>, ExplorerError> {
        let parent_view = self.view(parent)?;
        let network = self.network();
        let node_items = |id: &str| -> Result<Vec<EdgeItem>, ExplorerError> {
            Ok(network
                .node(id)
                .ok_or_else(|| NetworkError::UnknownNode(id.to_string()))?
                .items
                .clone())
        };
        let edge_items = |a: &str, b: &str| -> Result<Vec<EdgeItem>, ExplorerError> {
            Ok(edge(network, a, b)?.items.clone())
        };
        match (&parent_view.payload, selection) {
            (Payload::Graph(_), Selection::Node { id }) => node_items(id),
            (Payload::Graph(_), Selection::Edge { source, target }) => edge_items(source, target),
            (Payload::Egocentric(ego), Selection::Node { id }) if *id == ego.center => node_items(id),
            (Payload::Egocentric(ego), Selection::Pair { neighbor }) => {
                if !ego.neighbors.iter().any(|n| n.neighbor == *neighbor) {
                    return Err(ExplorerError::InvalidSelection(format!(
                        "{neighbor:?} is not a neighbor of {:?}",
                        ego.center
                    )));
                }
                edge_items(&ego.center, neighbor)
            }
            (Payload::Graph(_) | Payload::Egocentric(_), other) => Err(ExplorerError::InvalidSelection(
                format!("{other:?} is not selectable in a {} view", parent_view.kind()),
            )),
            (Payload::Listing(_) | Payload::Temporal(_), _) => Err(ExplorerError::WrongParentKind {
                parent: parent_view.kind(),
                requested,
            }),
        }
    }
}

fn edge<'a>(network: &'a Network, a: &str, b: &str) -> Result<&'a Edge, NetworkError> {
    network
        .edge_between(a, b)
        .ok_or_else(|| NetworkError::UnknownEdge(a.to_string(), b.to_string()))
}

fn items_subset<'a>(items: impl Iterator<Item = &'a EdgeItem>) -> Subset {
    let mut subset = Subset::default();
    for item in items {
        subset.link_values.insert(item.link_value.clone());
        subset.records.extend(item.records.iter().cloned());
    }
    subset
}
