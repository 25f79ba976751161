mod common;

use std::collections::BTreeSet;

use common::*;
use facetnet_core::catalog::{FilterSpec, MatchMode};
use facetnet_core::network::{build_network, node_summary, validate_topology, BuildOptions, TopologySpec};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn filter_monotonicity(seed in any::<u64>()) {
        check_monotonicity(seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn chained_views_stay_inside_parents(seed in any::<u64>()) {
        check_subset_containment(seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn no_self_loops(seed in any::<u64>()) {
        check_no_self_loops(seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn export_round_trip(seed in any::<u64>()) {
        check_round_trip(seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn export_is_deterministic(seed in any::<u64>()) {
        check_export_determinism(seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn filter_matches_naive_scan(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let idx = random_index(&mut rng, 60, 6);
        for _ in 0..10 {
            let filter = random_filter(&mut rng, 6);
            let got: Vec<String> = idx.apply_filter(&filter).unwrap()
                .into_iter().map(|o| idx.records()[o as usize].id.clone()).collect();
            prop_assert_eq!(got, naive_filter(idx.records(), &filter));
        }
    }

    #[test]
    fn facet_values_match_naive_counts(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let idx = random_index(&mut rng, 60, 6);
        let filter = random_filter(&mut rng, 6);
        for (facet, _) in vocabulary(6) {
            let got: Vec<(String, usize)> = idx.facet_values(facet, &filter).unwrap()
                .into_iter().map(|v| (v.value, v.count)).collect();
            prop_assert_eq!(got, naive_facet_values(idx.records(), facet, &filter));
        }
    }

    #[test]
    fn network_matches_reference(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let idx = random_index(&mut rng, 30, 6);
        let spec = random_topology(&mut rng);
        let filter = random_filter(&mut rng, 6);
        let valid = validate_topology(&spec, idx.schema()).unwrap();
        let net = build_network(&idx, &filter, &valid, &BuildOptions::unlimited()).unwrap();
        prop_assert_eq!(canonical(&net), naive_network(idx.records(), &filter, &spec));
    }

    /// With the record-identity facet as link, a unipartite network is
    /// exactly the within-record pairing of source values.
    #[test]
    fn identity_link_is_within_record_pairing(seed in any::<u64>(), facet in prop::sample::select(vec!["task_categories", "modality", "model", "language"])) {
        let mut rng = rng(seed);
        let idx = random_index(&mut rng, 40, 6);
        let filter = random_filter(&mut rng, 6);
        let spec = TopologySpec::new(facet, facet, "dataset");
        let valid = validate_topology(&spec, idx.schema()).unwrap();
        let net = build_network(&idx, &filter, &valid, &BuildOptions::unlimited()).unwrap();
        let got: std::collections::BTreeMap<(String, String), BTreeSet<String>> = net.edges.iter()
            .map(|e| ((e.source.clone(), e.target.clone()), e.items.iter().map(|i| i.link_value.clone()).collect()))
            .collect();
        prop_assert_eq!(got, within_record_pairs(idx.records(), &filter, facet));
    }

    #[test]
    fn contributors_come_from_filtered_records(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let idx = random_index(&mut rng, 40, 6);
        let spec = random_topology(&mut rng);
        let filter = random_filter(&mut rng, 6);
        let matched: BTreeSet<String> = naive_filter(idx.records(), &filter).into_iter().collect();
        let valid = validate_topology(&spec, idx.schema()).unwrap();
        let net = build_network(&idx, &filter, &valid, &BuildOptions::unlimited()).unwrap();
        for item in net.edges.iter().flat_map(|e| &e.items).chain(net.nodes.iter().flat_map(|n| &n.items)) {
            prop_assert!(!item.records.is_empty());
            prop_assert!(item.records.iter().all(|r| matched.contains(r)));
            let themed: usize = item.themes.values().sum::<usize>() + item.themes_missing;
            prop_assert!(spec.thematic.is_none() || themed >= item.records.len());
        }
    }

    #[test]
    fn node_size_matches_summary(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let idx = random_index(&mut rng, 40, 6);
        let spec = random_topology(&mut rng);
        let valid = validate_topology(&spec, idx.schema()).unwrap();
        let net = build_network(&idx, &FilterSpec::new(), &valid, &BuildOptions::unlimited()).unwrap();
        for node in &net.nodes {
            let s = node_summary(&net, &node.id).unwrap();
            prop_assert_eq!(s.distinct_item_count, node.size);
            prop_assert_eq!(s.neighbor_count, net.incident_edges(&node.id).count());
            // every value an incident edge carries is one the node holds
            let own: BTreeSet<&str> = node.items.iter().map(|i| i.link_value.as_str()).collect();
            for e in net.incident_edges(&node.id) {
                prop_assert!(e.items.iter().all(|i| own.contains(i.link_value.as_str())));
            }
        }
    }

    #[test]
    fn clutter_guard_respects_ceilings(seed in any::<u64>(), max_nodes in 1usize..20, max_edges in 1usize..20, hide in any::<bool>()) {
        let mut rng = rng(seed);
        let idx = random_index(&mut rng, 40, 6);
        let spec = random_topology(&mut rng);
        let valid = validate_topology(&spec, idx.schema()).unwrap();
        let full = build_network(&idx, &FilterSpec::new(), &valid, &BuildOptions::unlimited()).unwrap();
        let opts = BuildOptions { max_nodes, max_edges, hide_isolated: hide };
        let net = build_network(&idx, &FilterSpec::new(), &valid, &opts).unwrap();
        prop_assert!(net.nodes.len() <= max_nodes && net.edges.len() <= max_edges);
        prop_assert_eq!(
            net.truncation.is_some(),
            full.nodes.len() > max_nodes || full.edges.len() > max_edges
        );
        for e in &net.edges {
            prop_assert_eq!(Some(e), full.edge_between(&e.source, &e.target));
        }
        for n in &net.nodes {
            prop_assert_eq!(Some(n), full.node(&n.id));
            prop_assert!(!hide || !net.is_isolated(&n.id));
        }
    }

    #[test]
    fn and_mode_never_exceeds_or_mode(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let idx = random_index(&mut rng, 60, 6);
        let filter = random_filter(&mut rng, 6);
        let or: BTreeSet<u32> = idx.apply_filter(&filter.clone().with_mode(MatchMode::Or)).unwrap().into_iter().collect();
        let and: BTreeSet<u32> = idx.apply_filter(&filter.with_mode(MatchMode::And)).unwrap().into_iter().collect();
        prop_assert!(and.is_subset(&or));
    }
}
