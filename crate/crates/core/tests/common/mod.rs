//! Shared fixtures, random corpora and brute-force reference implementations.
//!
//! The reference functions here work directly on `DatasetRecord`s with set
//! comprehensions and never touch the index or network builders they are
//! compared against.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use chrono::{TimeZone, Utc};
use facetnet_core::catalog::{build_index, FacetIndex, FilterSpec, MatchMode, MISSING_VALUE};
use facetnet_core::ingest::{
    load_catalog, normalize_all, CatalogSnapshot, DatasetRecord, FacetSchema, RawCard,
};
use facetnet_core::network::{Network, NetworkKind, Side, TopologySpec};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

pub fn fixed_time() -> chrono::DateTime<Utc> {
    Utc.with_ymd_and_hms(2025, 6, 1, 12, 0, 0).unwrap()
}

pub fn snapshot_from_file(name: &str) -> CatalogSnapshot {
    let report = load_catalog(data_path(name)).expect("fixture loads");
    assert!(report.errors.is_empty(), "{:?}", report.errors);
    let schema = FacetSchema::default();
    let summary = normalize_all(&report.cards, &schema);
    CatalogSnapshot::new(summary.records, schema, name, fixed_time()).unwrap()
}

pub fn abc() -> FacetIndex {
    build_index(snapshot_from_file("abc.ndjson"))
}

pub fn hub12() -> FacetIndex {
    build_index(snapshot_from_file("hub12.ndjson"))
}

// ---------------------------------------------------------------------------
// random corpora

pub const MODALITIES: &[&str] = &["text", "tabular", "audio", "image"];
pub const TASKS: &[&str] = &[
    "qa",
    "summarization",
    "asr",
    "vqa",
    "translation",
    "classification",
    "ner",
    "retrieval",
];
pub const LICENSES: &[&str] = &["mit", "apache-2.0", "cc-by-4.0", "other"];
pub const LANGUAGES: &[&str] = &["en", "fr", "de", "zh", "sw"];
pub const SIZES: &[&str] = &["n<1K", "1K<n<10K", "10K<n<100K", "100K<n<1M"];

pub fn models(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("org/model-{i:02}")).collect()
}

/// Facets random filters and topologies draw from, with their vocabularies.
pub fn vocabulary(model_count: usize) -> Vec<(&'static str, Vec<String>)> {
    let own = |vs: &[&str]| vs.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    vec![
        ("modality", own(MODALITIES)),
        ("task_categories", own(TASKS)),
        ("license", own(LICENSES)),
        ("language", own(LANGUAGES)),
        ("size_categories", own(SIZES)),
        ("model", models(model_count)),
    ]
}

fn pick<R: Rng>(rng: &mut R, vocab: &[String], max: usize, p_missing: f64) -> Vec<String> {
    if rng.gen_bool(p_missing) {
        return Vec::new();
    }
    let k = rng.gen_range(1..=max);
    vocab.choose_multiple(rng, k).cloned().collect()
}

pub fn random_cards<R: Rng>(rng: &mut R, n: usize, model_count: usize) -> Vec<RawCard> {
    let vocab = vocabulary(model_count);
    (0..n)
        .map(|i| {
            let mut tags = Vec::new();
            for (facet, values) in &vocab {
                let (max, p_missing) = match *facet {
                    "modality" => (2, 0.2),
                    "task_categories" => (3, 0.1),
                    "license" => (1, 0.15),
                    "language" => (2, 0.3),
                    "size_categories" => (1, 0.2),
                    _ => (3, 0.35),
                };
                for v in pick(rng, values, max, p_missing) {
                    tags.push(format!("{facet}:{v}"));
                }
            }
            let mut card = RawCard::new(format!("org{}/ds-{i:05}", i % 7)).with_tags(tags);
            if rng.gen_bool(0.85) {
                let month = rng.gen_range(1..=12);
                let year = rng.gen_range(2021..=2025);
                card.created_at = Some(
                    chrono::FixedOffset::east_opt(0)
                        .unwrap()
                        .with_ymd_and_hms(year, month, 15, 0, 0, 0)
                        .unwrap(),
                );
            }
            card
        })
        .collect()
}

pub fn random_index<R: Rng>(rng: &mut R, n: usize, model_count: usize) -> FacetIndex {
    let cards = random_cards(rng, n, model_count);
    let schema = FacetSchema::default();
    let records = normalize_all(&cards, &schema).records;
    build_index(CatalogSnapshot::new(records, schema, "random", fixed_time()).unwrap())
}

pub fn random_filter<R: Rng>(rng: &mut R, model_count: usize) -> FilterSpec {
    let vocab = vocabulary(model_count);
    let mut filter = FilterSpec::new().with_mode(if rng.gen_bool(0.25) {
        MatchMode::And
    } else {
        MatchMode::Or
    });
    let clauses = rng.gen_range(0..=3);
    for (facet, values) in vocab.choose_multiple(rng, clauses) {
        let k = rng.gen_range(1..=3);
        let mut chosen: Vec<String> = values.choose_multiple(rng, k).cloned().collect();
        if rng.gen_bool(0.1) {
            chosen.push(MISSING_VALUE.to_string());
        }
        filter.select(facet, chosen);
    }
    filter
}

pub fn random_topology<R: Rng>(rng: &mut R) -> TopologySpec {
    let facets = [
        "dataset",
        "modality",
        "task_categories",
        "license",
        "language",
        "model",
        "size_categories",
    ];
    loop {
        let source = *facets.choose(rng).unwrap();
        let target = if rng.gen_bool(0.5) {
            source
        } else {
            *facets.choose(rng).unwrap()
        };
        let link = *facets.choose(rng).unwrap();
        if link == source || link == target {
            continue;
        }
        let mut spec = TopologySpec::new(source, target, link);
        if rng.gen_bool(0.6) {
            spec = spec.with_thematic(facets.choose(rng).unwrap());
        }
        return spec;
    }
}

// ---------------------------------------------------------------------------
// reference filter

fn empty() -> &'static BTreeSet<String> {
    static EMPTY: std::sync::OnceLock<BTreeSet<String>> = std::sync::OnceLock::new();
    EMPTY.get_or_init(BTreeSet::new)
}

fn vals<'a>(r: &'a DatasetRecord, facet: &str) -> &'a BTreeSet<String> {
    r.facets.get(facet).unwrap_or(empty())
}

fn holds(r: &DatasetRecord, facet: &str, value: &str) -> bool {
    if value == MISSING_VALUE {
        !r.facets.contains_key(facet)
    } else {
        vals(r, facet).contains(value)
    }
}

pub fn naive_matches(r: &DatasetRecord, filter: &FilterSpec) -> bool {
    filter.clauses.iter().all(|(facet, selected)| match filter.within_facet_mode {
        MatchMode::Or => selected.iter().any(|v| holds(r, facet, v)),
        MatchMode::And => selected.iter().all(|v| holds(r, facet, v)),
    })
}

/// Ids of matching records in catalog order.
pub fn naive_filter(records: &[DatasetRecord], filter: &FilterSpec) -> Vec<String> {
    records
        .iter()
        .filter(|r| naive_matches(r, filter))
        .map(|r| r.id.clone())
        .collect()
}

/// Brute-force value counts with the multi-select convention.
pub fn naive_facet_values(
    records: &[DatasetRecord],
    facet: &str,
    filter: &FilterSpec,
) -> Vec<(String, usize)> {
    let others = filter.without(facet);
    let matched: Vec<&DatasetRecord> = records.iter().filter(|r| naive_matches(r, &others)).collect();
    let universe: BTreeSet<&String> = matched.iter().flat_map(|r| vals(r, facet)).collect();
    let mut out: Vec<(String, usize)> = universe
        .into_iter()
        .map(|v| (v.clone(), matched.iter().filter(|r| vals(r, facet).contains(v)).count()))
        .collect();
    out.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let missing = matched.iter().filter(|r| !r.facets.contains_key(facet)).count();
    if missing > 0 {
        out.push((MISSING_VALUE.to_string(), missing));
    }
    out
}

// ---------------------------------------------------------------------------
// reference networks

/// link value -> (contributors, theme multiset, contributors lacking theme)
pub type CanonItems = BTreeMap<String, (BTreeSet<String>, BTreeMap<String, usize>, usize)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonNetwork {
    pub nodes: BTreeMap<String, (Side, usize, CanonItems)>,
    pub edges: BTreeMap<(String, String), CanonItems>,
}

fn canon_items(items: &[facetnet_core::network::EdgeItem]) -> CanonItems {
    items
        .iter()
        .map(|i| {
            (
                i.link_value.clone(),
                (i.records.clone(), i.themes.clone(), i.themes_missing),
            )
        })
        .collect()
}

pub fn canonical(net: &Network) -> CanonNetwork {
    CanonNetwork {
        nodes: net
            .nodes
            .iter()
            .map(|n| (n.id.clone(), (n.side, n.size, canon_items(&n.items))))
            .collect(),
        edges: net
            .edges
            .iter()
            .map(|e| ((e.source.clone(), e.target.clone()), canon_items(&e.items)))
            .collect(),
    }
}

fn themed(
    contributors: &BTreeSet<String>,
    by_id: &BTreeMap<&str, &DatasetRecord>,
    thematic: Option<&str>,
) -> (BTreeMap<String, usize>, usize) {
    let mut themes = BTreeMap::new();
    let mut missing = 0;
    if let Some(facet) = thematic {
        for id in contributors {
            match by_id[id.as_str()].facets.get(facet) {
                Some(vs) => {
                    for v in vs {
                        *themes.entry(v.clone()).or_insert(0) += 1;
                    }
                }
                None => missing += 1,
            }
        }
    }
    (themes, missing)
}

/// Reference network built by exhaustive enumeration over the matching records.
pub fn naive_network(
    records: &[DatasetRecord],
    filter: &FilterSpec,
    spec: &TopologySpec,
) -> CanonNetwork {
    let matched: Vec<&DatasetRecord> = records.iter().filter(|r| naive_matches(r, filter)).collect();
    let by_id: BTreeMap<&str, &DatasetRecord> = matched.iter().map(|r| (r.id.as_str(), *r)).collect();
    let thematic = spec.thematic.as_deref();
    let kind = spec.kind();
    let link_universe: BTreeSet<&String> = matched.iter().flat_map(|r| vals(r, &spec.link)).collect();

    // nodes: every source/target value present in a matching record
    let mut sides: BTreeMap<String, Side> = BTreeMap::new();
    for r in &matched {
        let roles: Vec<(&str, Side)> = match kind {
            NetworkKind::Bipartite => vec![(spec.source.as_str(), Side::Source), (spec.target.as_str(), Side::Target)],
            NetworkKind::Unipartite => vec![(spec.source.as_str(), Side::Both)],
        };
        for (facet, side) in roles {
            for v in vals(r, facet) {
                sides
                    .entry(v.clone())
                    .and_modify(|s| {
                        if *s != side {
                            *s = Side::Both
                        }
                    })
                    .or_insert(side);
            }
        }
    }
    let carries = |r: &DatasetRecord, node: &str| -> bool {
        match kind {
            NetworkKind::Bipartite => {
                vals(r, &spec.source).contains(node) || vals(r, &spec.target).contains(node)
            }
            NetworkKind::Unipartite => vals(r, &spec.source).contains(node),
        }
    };

    let mut nodes = BTreeMap::new();
    for (node, side) in &sides {
        let mut items = CanonItems::new();
        for l in &link_universe {
            let contributors: BTreeSet<String> = matched
                .iter()
                .filter(|r| carries(r, node) && vals(r, &spec.link).contains(*l))
                .map(|r| r.id.clone())
                .collect();
            if !contributors.is_empty() {
                let (themes, missing) = themed(&contributors, &by_id, thematic);
                items.insert((*l).clone(), (contributors, themes, missing));
            }
        }
        nodes.insert(node.clone(), (*side, items.len(), items));
    }

    let mut edges: BTreeMap<(String, String), CanonItems> = BTreeMap::new();
    match kind {
        NetworkKind::Bipartite => {
            let sources: BTreeSet<&String> = matched.iter().flat_map(|r| vals(r, &spec.source)).collect();
            let targets: BTreeSet<&String> = matched.iter().flat_map(|r| vals(r, &spec.target)).collect();
            for s in &sources {
                for t in &targets {
                    if s == t {
                        continue;
                    }
                    let mut items = CanonItems::new();
                    for l in &link_universe {
                        let contributors: BTreeSet<String> = matched
                            .iter()
                            .filter(|r| {
                                vals(r, &spec.source).contains(*s)
                                    && vals(r, &spec.target).contains(*t)
                                    && vals(r, &spec.link).contains(*l)
                            })
                            .map(|r| r.id.clone())
                            .collect();
                        if !contributors.is_empty() {
                            let (themes, missing) = themed(&contributors, &by_id, thematic);
                            items.insert((*l).clone(), (contributors, themes, missing));
                        }
                    }
                    if !items.is_empty() {
                        edges.insert(((*s).clone(), (*t).clone()), items);
                    }
                }
            }
        }
        NetworkKind::Unipartite => {
            // every pair of matching records (including a record with itself)
            let mut shared: BTreeMap<(String, String), BTreeSet<String>> = BTreeMap::new();
            for r1 in &matched {
                for r2 in &matched {
                    let common: Vec<&String> = vals(r1, &spec.link)
                        .intersection(vals(r2, &spec.link))
                        .collect();
                    if common.is_empty() {
                        continue;
                    }
                    for u in vals(r1, &spec.source) {
                        for v in vals(r2, &spec.source) {
                            if u < v {
                                shared
                                    .entry((u.clone(), v.clone()))
                                    .or_default()
                                    .extend(common.iter().map(|s| (*s).clone()));
                            }
                        }
                    }
                }
            }
            for ((u, v), links) in shared {
                let mut items = CanonItems::new();
                for l in links {
                    let contributors: BTreeSet<String> = matched
                        .iter()
                        .filter(|r| {
                            vals(r, &spec.link).contains(&l)
                                && (vals(r, &spec.source).contains(&u) || vals(r, &spec.source).contains(&v))
                        })
                        .map(|r| r.id.clone())
                        .collect();
                    let (themes, missing) = themed(&contributors, &by_id, thematic);
                    items.insert(l, (contributors, themes, missing));
                }
                edges.insert((u, v), items);
            }
        }
    }
    CanonNetwork { nodes, edges }
}

/// Unipartite network with the record-identity facet as link, enumerated
/// directly as pairs of values within each record.
pub fn within_record_pairs(
    records: &[DatasetRecord],
    filter: &FilterSpec,
    facet: &str,
) -> BTreeMap<(String, String), BTreeSet<String>> {
    let mut out: BTreeMap<(String, String), BTreeSet<String>> = BTreeMap::new();
    for r in records.iter().filter(|r| naive_matches(r, filter)) {
        let values: Vec<&String> = vals(r, facet).iter().collect();
        for (i, u) in values.iter().enumerate() {
            for v in &values[i + 1..] {
                out.entry(((*u).clone(), (*v).clone()))
                    .or_default()
                    .insert(r.id.clone());
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// property checks shared by the proptest suite and the acceptance runner.
// Each takes a seed, builds its own small random case and reports the first
// violation it finds.

use facetnet_core::catalog::UrlTemplates;
use facetnet_core::explorer::{create_session, Payload, Selection, ViewKind, ROOT_VIEW};
use facetnet_core::network::{
    build_network, export_network, import_network, validate_topology, BuildOptions, ExportFormat,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn small_case(seed: u64) -> (ChaCha8Rng, FacetIndex) {
    let mut rng = rng(seed);
    let n = rng.gen_range(8..40);
    let models = rng.gen_range(3..10);
    let idx = random_index(&mut rng, n, models);
    (rng, idx)
}

fn random_network(rng: &mut ChaCha8Rng, idx: &FacetIndex) -> Network {
    let spec = random_topology(rng);
    let filter = random_filter(rng, 10);
    let valid = validate_topology(&spec, idx.schema()).expect("generated topology is valid");
    build_network(idx, &filter, &valid, &BuildOptions::unlimited()).expect("generated filter is valid")
}

fn ids(idx: &FacetIndex, filter: &FilterSpec) -> BTreeSet<u32> {
    idx.apply_filter(filter).unwrap().into_iter().collect()
}

/// Adding a clause never grows the result; adding values to a clause grows
/// it under OR and shrinks it under AND.
pub fn check_monotonicity(seed: u64) -> Check {
    let (mut rng, idx) = small_case(seed);
    let base = random_filter(&mut rng, 10);
    let before = ids(&idx, &base);
    let vocab = vocabulary(10);
    let (facet, values) = vocab.choose(&mut rng).unwrap();
    let value = values.choose(&mut rng).unwrap().clone();

    let mut widened = base.clone();
    widened.select(facet, [value.clone()]);
    let after = ids(&idx, &widened);
    if base.clauses.contains_key(*facet) {
        match base.within_facet_mode {
            MatchMode::Or => ensure(before.is_subset(&after), || {
                format!("OR clause {facet} grew by {value} but lost records: {base:?}")
            })?,
            MatchMode::And => ensure(after.is_subset(&before), || {
                format!("AND clause {facet} grew by {value} but gained records: {base:?}")
            })?,
        }
    } else {
        ensure(after.is_subset(&before), || {
            format!("new clause {facet}={value} gained records: {base:?}")
        })?;
    }
    let empty = ids(&idx, &FilterSpec::new());
    ensure(before.is_subset(&empty) && empty.len() == idx.len(), || {
        "empty filter must match every record".into()
    })
}

/// Every child view covers a subset of its parent, along every chain the
/// explorer allows.
pub fn check_subset_containment(seed: u64) -> Check {
    let (mut rng, idx) = small_case(seed);
    let spec = random_topology(&mut rng);
    let filter = random_filter(&mut rng, 10);
    let mut session = create_session(&idx, &filter, &spec, &BuildOptions::unlimited(), UrlTemplates::default())
        .map_err(|e| e.to_string())?;
    let network = session.network().clone();
    ensure(
        network.records().iter().all(|r| session.root().subset.records.contains(*r)),
        || "root subset misses a contributing record".into(),
    )?;
    if network.nodes.is_empty() {
        return Ok(());
    }
    for _ in 0..4 {
        let node = network.nodes.choose(&mut rng).unwrap().id.clone();
        let ego = session.spawn_egocentric(ROOT_VIEW, &node).map_err(|e| e.to_string())?.id;
        let mut selections = vec![Selection::node(&node)];
        for e in network.incident_edges(&node) {
            selections.push(Selection::pair(e.other(&node).unwrap()));
        }
        let sel = selections.choose(&mut rng).unwrap().clone();
        for kind in [ViewKind::Listing, ViewKind::Temporal] {
            session.spawn(&idx, ego, kind, &sel).map_err(|e| e.to_string())?;
        }
        let root_sel = match network.edges.choose(&mut rng) {
            Some(e) if rng.gen_bool(0.5) => Selection::edge(&e.source, &e.target),
            _ => Selection::node(&node),
        };
        for kind in [ViewKind::Listing, ViewKind::Temporal] {
            session.spawn(&idx, ROOT_VIEW, kind, &root_sel).map_err(|e| e.to_string())?;
        }
    }
    for view in session.views() {
        let Some(parent) = view.parent else { continue };
        let parent = session.view(parent).unwrap();
        ensure(view.subset.is_subset(&parent.subset), || {
            format!("view {} ({:?}) escapes parent {}", view.id, view.kind(), parent.id)
        })?;
        if let Payload::Listing(listing) = &view.payload {
            for row in &listing.rows {
                ensure(
                    row.records.iter().all(|r| parent.subset.records.contains(r))
                        && parent.subset.link_values.contains(&row.link_value),
                    || format!("listing row {:?} escapes parent", row.link_value),
                )?;
            }
        }
    }
    Ok(())
}

pub fn check_no_self_loops(seed: u64) -> Check {
    let (mut rng, idx) = small_case(seed);
    let net = random_network(&mut rng, &idx);
    for e in &net.edges {
        ensure(e.source != e.target, || format!("self-loop on {:?}", e.source))?;
        if net.kind == NetworkKind::Unipartite {
            ensure(e.source < e.target, || {
                format!("unordered pair {:?}-{:?}", e.source, e.target)
            })?;
        }
        ensure(net.node(&e.source).is_some() && net.node(&e.target).is_some(), || {
            "dangling edge".into()
        })?;
    }
    Ok(())
}

pub fn check_round_trip(seed: u64) -> Check {
    let (mut rng, idx) = small_case(seed);
    let net = random_network(&mut rng, &idx);
    for fmt in [ExportFormat::NodeLinkJson, ExportFormat::GraphMl] {
        let doc = export_network(&net, fmt);
        let back = import_network(&doc, fmt).map_err(|e| format!("{fmt:?}: {e}"))?;
        ensure(back == net, || format!("{fmt:?} round trip changed the network"))?;
    }
    Ok(())
}

/// Exporting the same network twice, or a rebuilt copy of it, gives the same bytes.
pub fn check_export_determinism(seed: u64) -> Check {
    let (mut rng, idx) = small_case(seed);
    let spec = random_topology(&mut rng);
    let filter = random_filter(&mut rng, 10);
    let valid = validate_topology(&spec, idx.schema()).unwrap();
    let a = build_network(&idx, &filter, &valid, &BuildOptions::unlimited()).unwrap();
    let b = build_network(&idx, &filter, &valid, &BuildOptions::unlimited()).unwrap();
    for fmt in [ExportFormat::NodeLinkJson, ExportFormat::GraphMl] {
        let first = export_network(&a, fmt);
        ensure(first == export_network(&a, fmt), || format!("{fmt:?} export differs on repeat"))?;
        ensure(first == export_network(&b, fmt), || format!("{fmt:?} export differs after rebuild"))?;
    }
    Ok(())
}
