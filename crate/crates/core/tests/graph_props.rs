mod common;

use proptest::prelude::*;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{random_document, random_graph, random_input, Oracle};
use neurashed::graph::{
    compute_firing, feature_pathway, parse_graph_spec, union_firing, validate_graph, GraphDocument, InputPattern,
    NeurashedGraph, NodeDocument,
};

/// Applies one random structural change; the result may or may not still be
/// valid.
fn mutate(rng: &mut impl Rng, doc: &mut GraphDocument) {
    let n = doc.nodes.len();
    match rng.random_range(0..11) {
        0 => {
            let a = rng.random_range(0..n);
            let b = rng.random_range(0..n);
            doc.edges.push([a, b]);
        }
        1 => {
            let i = rng.random_range(0..n);
            doc.nodes[i].threshold = Some(rng.random_range(0..5));
        }
        2 => {
            let i = rng.random_range(0..n);
            doc.nodes[i].threshold = None;
        }
        3 => {
            let i = rng.random_range(0..n);
            let j = rng.random_range(0..n);
            doc.nodes[i].id = doc.nodes[j].id;
        }
        4 => {
            let keep = rng.random_range(0..2);
            doc.class_nodes.truncate(keep);
        }
        5 => {
            let i = rng.random_range(0..n);
            doc.nodes[i].level = rng.random_range(0..=doc.levels + 1);
        }
        6 => {
            if let Some(&e) = doc.edges.choose(rng) {
                doc.edges.push(e);
            }
        }
        7 => {
            let target = rng.random_range(0..n);
            doc.edges.retain(|e| e[1] != target);
        }
        8 => {
            let i = rng.random_range(0..n);
            doc.nodes.remove(i);
        }
        9 => doc.edges.push([n + 3, 0]),
        _ => {
            let c = rng.random_range(0..n + 1);
            doc.class_nodes.push(c);
        }
    }
}

#[test]
fn parser_and_validator_agree_on_random_documents() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut accepted = 0;
    for _ in 0..1000 {
        let levels = rng.random_range(2..=6);
        let mut doc = random_document(&mut rng, levels, 50);
        while doc.nodes.len() < 50 {
            // pad the first level so every document has 50 nodes
            let id = doc.nodes.len();
            doc.nodes.push(NodeDocument {
                id,
                level: 1,
                threshold: None,
            });
        }
        for _ in 0..rng.random_range(0..3) {
            mutate(&mut rng, &mut doc);
        }
        let violations = validate_graph(&doc);
        let text = serde_json::to_string(&doc).unwrap();
        match parse_graph_spec(&text) {
            Ok(_) => {
                assert!(violations.is_empty(), "parser accepted, validator found {violations:?}");
                accepted += 1;
            }
            Err(e) => {
                assert!(!violations.is_empty(), "parser rejected with {e} but validator found nothing");
                assert!(
                    violations.iter().any(|v| v.kind() == e.kind()),
                    "parser error {e} not among {violations:?}"
                );
            }
        }
    }
    // both outcomes must be exercised
    assert!(accepted > 200 && accepted < 800, "{accepted}");
}

fn graph_from(seed: u64) -> (GraphDocument, NeurashedGraph) {
    random_graph(&mut ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn firing_is_monotone_in_inputs(seed in any::<u64>()) {
        let (_, g) = graph_from(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let small = random_input(&mut rng, &g);
        let extra = random_input(&mut rng, &g);
        let mut fire: Vec<usize> = small.firing().iter().chain(extra.firing()).map(|id| id.0).collect();
        fire.sort_unstable();
        let big = InputPattern::new(fire, small.label).unwrap();
        let a = compute_firing(&g, &small, false).unwrap();
        let b = compute_firing(&g, &big, false).unwrap();
        for id in a.nodes() {
            prop_assert!(b.contains(id));
        }
    }

    #[test]
    fn union_is_the_union_of_pathways(seed in any::<u64>(), k in 1usize..5) {
        let (doc, g) = graph_from(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 2);
        let batch: Vec<InputPattern> = (0..k).map(|_| random_input(&mut rng, &g)).collect();
        let refs: Vec<&InputPattern> = batch.iter().collect();
        let u = union_firing(&g, &refs).unwrap();
        let oracle = Oracle { doc: &doc };
        for id in g.node_ids() {
            let expected = batch.iter().any(|p| {
                let fire: Vec<usize> = p.firing().iter().map(|n| n.0).collect();
                if g.is_top(id) { g.class_nodes()[p.label] == id } else { oracle.fires(id.0, &fire) }
            });
            prop_assert_eq!(u.contains(id), expected, "node {}", id);
        }
        let mut from_pathways = std::collections::BTreeSet::new();
        for p in &batch {
            from_pathways.extend(feature_pathway(&g, p).unwrap().nodes);
        }
        prop_assert_eq!(u.nodes().collect::<std::collections::BTreeSet<_>>(), from_pathways);
    }

    #[test]
    fn pathway_edges_join_adjacent_levels(seed in any::<u64>()) {
        let (_, g) = graph_from(seed);
        let input = random_input(&mut ChaCha8Rng::seed_from_u64(seed ^ 3), &g);
        let p = feature_pathway(&g, &input).unwrap();
        for (a, b) in p.edges {
            prop_assert_eq!(g.level_of(b), g.level_of(a) + 1);
        }
    }

    #[test]
    fn serialization_round_trips(seed in any::<u64>()) {
        let (_, g) = graph_from(seed);
        let again = parse_graph_spec(&g.to_json()).unwrap();
        prop_assert_eq!(&again, &g);
        prop_assert_eq!(again.to_json(), g.to_json());
    }
}

#[test]
fn all_inputs_firing_fires_every_middle_node() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..100 {
        let (_, g) = random_graph(&mut rng);
        let all = InputPattern::new(g.nodes_at(1).iter().map(|id| id.0), 0).unwrap();
        let f = compute_firing(&g, &all, false).unwrap();
        for l in 2..g.num_levels() {
            assert!(g.nodes_at(l).iter().all(|&id| f.contains(id)));
        }
    }
}
