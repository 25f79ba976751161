//! Node-link JSON and GraphML serialization of [`Network`]s.
//!
//! Node-link JSON is the serde form of [`Network`]:
//!
//! ```json
//! { "kind": "unipartite",
//!   "topology": {"source": "...", "target": "...", "link": "...", "thematic": "..."},
//!   "filter": {"clauses": {...}, "within_facet_mode": "or"},
//!   "nodes": [{"id": "qa", "side": "both", "size": 2, "items": [...]}],
//!   "edges": [{"source": "qa", "target": "summarization",
//!              "items": [{"link_value": "B", "records": ["B"], "themes": {"apache-2.0": 1}}]}] }
//! ```
//!
//! GraphML carries the same content. Scalar attributes (`side`, `size`,
//! `weight`) are typed GraphML data; item lists, topology and filter are
//! embedded as JSON strings so tools that ignore them still load the graph.

use std::str::FromStr;

use quick_xml::events::{BytesDecl, BytesEnd, BytesStart, BytesText, Event};
use quick_xml::{Reader, Writer};
use serde::{Deserialize, Serialize};

use super::model::{Edge, EdgeItem, Network, Node, Side, Truncation};
use super::topology::{NetworkKind, TopologySpec};
use super::NetworkError;
use crate::catalog::FilterSpec;

const GRAPHML_NS: &str = "http://graphml.graphdrawing.org/xmlns";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExportFormat {
    NodeLinkJson,
    GraphMl,
}

impl ExportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ExportFormat::NodeLinkJson => "json",
            ExportFormat::GraphMl => "graphml",
        }
    }

    /// Guesses the format from a file name's extension.
    pub fn from_path(path: &std::path::Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "json" => Some(ExportFormat::NodeLinkJson),
            "graphml" | "xml" => Some(ExportFormat::GraphMl),
            _ => None,
        }
    }
}

impl FromStr for ExportFormat {
    type Err = NetworkError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" | "node-link" | "node-link-json" => Ok(ExportFormat::NodeLinkJson),
            "graphml" => Ok(ExportFormat::GraphMl),
            other => Err(NetworkError::UnsupportedFormat(other.to_string())),
        }
    }
}

pub fn export_network(network: &Network, format: ExportFormat) -> String {
    match format {
        ExportFormat::NodeLinkJson => {
            serde_json::to_string_pretty(network).expect("network serialization is infallible")
        }
        ExportFormat::GraphMl => to_graphml(network),
    }
}

pub fn import_network(document: &str, format: ExportFormat) -> Result<Network, NetworkError> {
    match format {
        ExportFormat::NodeLinkJson => {
            serde_json::from_str(document).map_err(|e| NetworkError::Import(e.to_string()))
        }
        ExportFormat::GraphMl => from_graphml(document),
    }
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("serialization is infallible")
}

const KEYS: &[(&str, &str, &str, &str)] = &[
    // id, for, attr.name, attr.type
    ("kind", "graph", "kind", "string"),
    ("topology", "graph", "topology", "string"),
    ("filter", "graph", "filter", "string"),
    ("truncation", "graph", "truncation", "string"),
    ("side", "node", "side", "string"),
    ("size", "node", "size", "int"),
    ("node_items", "node", "items", "string"),
    ("weight", "edge", "weight", "int"),
    ("edge_items", "edge", "items", "string"),
];

fn to_graphml(network: &Network) -> String {
    let mut w = Writer::new_with_indent(Vec::new(), b' ', 2);
    let io = "writing to a Vec cannot fail";
    w.write_event(Event::Decl(BytesDecl::new("1.0", Some("UTF-8"), None)))
        .expect(io);
    w.write_event(Event::Start(
        BytesStart::new("graphml").with_attributes([("xmlns", GRAPHML_NS)]),
    ))
    .expect(io);
    for (id, target, name, ty) in KEYS {
        w.write_event(Event::Empty(BytesStart::new("key").with_attributes([
            ("id", *id),
            ("for", *target),
            ("attr.name", *name),
            ("attr.type", *ty),
        ])))
        .expect(io);
    }
    w.write_event(Event::Start(
        BytesStart::new("graph").with_attributes([("id", "G"), ("edgedefault", "undirected")]),
    ))
    .expect(io);

    let data = |w: &mut Writer<Vec<u8>>, key: &str, value: &str| {
        w.write_event(Event::Start(
            BytesStart::new("data").with_attributes([("key", key)]),
        ))
        .expect(io);
        w.write_event(Event::Text(BytesText::new(value))).expect(io);
        w.write_event(Event::End(BytesEnd::new("data"))).expect(io);
    };

    data(&mut w, "kind", &network.kind.to_string());
    data(&mut w, "topology", &json(&network.topology));
    data(&mut w, "filter", &json(&network.filter));
    if let Some(t) = &network.truncation {
        data(&mut w, "truncation", &json(t));
    }

    for node in &network.nodes {
        w.write_event(Event::Start(
            BytesStart::new("node").with_attributes([("id", node.id.as_str())]),
        ))
        .expect(io);
        data(&mut w, "side", node.side.as_str());
        data(&mut w, "size", &node.size.to_string());
        data(&mut w, "node_items", &json(&node.items));
        w.write_event(Event::End(BytesEnd::new("node"))).expect(io);
    }
    for (i, edge) in network.edges.iter().enumerate() {
        let id = format!("e{i}");
        w.write_event(Event::Start(BytesStart::new("edge").with_attributes([
            ("id", id.as_str()),
            ("source", edge.source.as_str()),
            ("target", edge.target.as_str()),
        ])))
        .expect(io);
        data(&mut w, "weight", &edge.items.len().to_string());
        data(&mut w, "edge_items", &json(&edge.items));
        w.write_event(Event::End(BytesEnd::new("edge"))).expect(io);
    }

    w.write_event(Event::End(BytesEnd::new("graph"))).expect(io);
    w.write_event(Event::End(BytesEnd::new("graphml"))).expect(io);
    let mut out = String::from_utf8(w.into_inner()).expect("writer emits UTF-8");
    out.push('\n');
    out
}

enum Element {
    Graph,
    Node(Node),
    Edge(Edge),
}

fn from_graphml(document: &str) -> Result<Network, NetworkError> {
    let err = |msg: String| NetworkError::Import(msg);
    let mut reader = Reader::from_str(document);

    let mut kind: Option<NetworkKind> = None;
    let mut topology: Option<TopologySpec> = None;
    let mut filter = FilterSpec::default();
    let mut truncation: Option<Truncation> = None;
    let mut nodes = Vec::new();
    let mut edges = Vec::new();

    let mut current: Option<Element> = None;
    let mut data_key: Option<String> = None;
    let mut text = String::new();

    loop {
        let event = reader
            .read_event()
            .map_err(|e| err(format!("at byte {}: {e}", reader.buffer_position())))?;
        match event {
            Event::Start(e) | Event::Empty(e) if e.name().as_ref() == b"graph" => {
                current = Some(Element::Graph);
            }
            Event::Start(e) if e.name().as_ref() == b"node" => {
                let id = attr(&e, "id")?.ok_or_else(|| err("node without id".into()))?;
                current = Some(Element::Node(Node {
                    id,
                    side: Side::Both,
                    size: 0,
                    items: Vec::new(),
                }));
            }
            Event::Start(e) if e.name().as_ref() == b"edge" => {
                let source = attr(&e, "source")?.ok_or_else(|| err("edge without source".into()))?;
                let target = attr(&e, "target")?.ok_or_else(|| err("edge without target".into()))?;
                current = Some(Element::Edge(Edge {
                    source,
                    target,
                    items: Vec::new(),
                }));
            }
            Event::Empty(e) if e.name().as_ref() == b"node" => {
                let id = attr(&e, "id")?.ok_or_else(|| err("node without id".into()))?;
                nodes.push(Node {
                    id,
                    side: Side::Both,
                    size: 0,
                    items: Vec::new(),
                });
            }
            Event::Start(e) if e.name().as_ref() == b"data" => {
                data_key = Some(attr(&e, "key")?.ok_or_else(|| err("data without key".into()))?);
                text.clear();
            }
            Event::Text(t) if data_key.is_some() => {
                text.push_str(&t.unescape().map_err(|e| err(e.to_string()))?);
            }
            Event::CData(t) if data_key.is_some() => {
                text.push_str(&String::from_utf8_lossy(&t));
            }
            Event::End(e) if e.name().as_ref() == b"data" => {
                let key = data_key.take().unwrap_or_default();
                let value = std::mem::take(&mut text);
                match (&mut current, key.as_str()) {
                    (Some(Element::Graph), "kind") => {
                        kind = Some(parse_json(&format!("\"{value}\""), "kind")?)
                    }
                    (Some(Element::Graph), "topology") => topology = Some(parse_json(&value, "topology")?),
                    (Some(Element::Graph), "filter") => filter = parse_json(&value, "filter")?,
                    (Some(Element::Graph), "truncation") => {
                        truncation = Some(parse_json(&value, "truncation")?)
                    }
                    (Some(Element::Node(n)), "side") => {
                        n.side = parse_json(&format!("\"{value}\""), "side")?
                    }
                    (Some(Element::Node(n)), "size") => {
                        n.size = value
                            .trim()
                            .parse()
                            .map_err(|_| err(format!("bad size {value:?}")))?
                    }
                    (Some(Element::Node(n)), "node_items") => {
                        n.items = parse_json::<Vec<EdgeItem>>(&value, "items")?
                    }
                    (Some(Element::Edge(e)), "edge_items") => {
                        e.items = parse_json::<Vec<EdgeItem>>(&value, "items")?
                    }
                    _ => {}
                }
            }
            Event::End(e) if e.name().as_ref() == b"node" || e.name().as_ref() == b"edge" => {
                match current.take() {
                    Some(Element::Node(n)) => nodes.push(n),
                    Some(Element::Edge(e)) => edges.push(e),
                    _ => return Err(err("unbalanced node/edge element".into())),
                }
                current = Some(Element::Graph);
            }
            Event::Eof => break,
            _ => {}
        }
    }

    let topology = topology.ok_or_else(|| err("graph has no topology data".into()))?;
    let kind = kind.unwrap_or_else(|| topology.kind());
    Ok(Network {
        kind,
        topology,
        filter,
        nodes,
        edges,
        truncation,
    })
}

fn attr(e: &BytesStart<'_>, name: &str) -> Result<Option<String>, NetworkError> {
    match e.try_get_attribute(name) {
        Ok(Some(a)) => a
            .unescape_value()
            .map(|v| Some(v.into_owned()))
            .map_err(|e| NetworkError::Import(e.to_string())),
        Ok(None) => Ok(None),
        Err(e) => Err(NetworkError::Import(e.to_string())),
    }
}

fn parse_json<T: for<'de> Deserialize<'de>>(value: &str, what: &str) -> Result<T, NetworkError> {
    serde_json::from_str(value).map_err(|e| NetworkError::Import(format!("{what}: {e}")))
}
