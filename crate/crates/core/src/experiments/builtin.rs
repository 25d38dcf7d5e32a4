//! Built-in scenarios. The graphs are reconstructions: each satisfies the
//! pathway lists, threshold rules and symmetries it is meant to show, but
//! other wirings would satisfy them too.

use crate::dynamics::{Init, RuleOverride, RuleTable, Sampling, TrainConfig, UpdateRule, UpdateSchedule};
use crate::graph::{Dataset, GraphDocument, InputPattern, NeurashedGraph, NodeDocument, NodeId};
use crate::metrics::{NodeGroup, DEFAULT_MC_SAMPLES, DEFAULT_SIGMA};

use super::{BatchSize, Expectation, Scenario};

pub const BUILTIN_NAMES: [&str; 3] = ["fig2-three-class", "fig3-bottleneck", "fig4-batch"];

pub fn describe(name: &str) -> Option<&'static str> {
    Some(match name {
        "fig2-three-class" => "4-level, 3-class graph with sub-types 1a/1b; convergence and local elasticity",
        "fig3-bottleneck" => "binary graph with shared node 7 and dominant level-2 nodes; information bottleneck",
        "fig4-batch" => "single class with two redundant pathways; small vs full batch sparsity",
        _ => return None,
    })
}

pub fn builtin(name: &str) -> Option<Scenario> {
    match name {
        "fig2-three-class" => Some(fig2_three_class()),
        "fig3-bottleneck" => Some(fig3_bottleneck()),
        "fig4-batch" => Some(fig4_batch()),
        _ => None,
    }
}

/// Nodes listed level by level as `(threshold, dependents)`; level-1 nodes
/// are given as a count. Ids are assigned densely in listing order.
fn layered(inputs: usize, middle: &[&[(u32, &[usize])]], classes: &[&[usize]]) -> NeurashedGraph {
    let levels = middle.len() + 2;
    let mut nodes: Vec<NodeDocument> = (0..inputs)
        .map(|id| NodeDocument {
            id,
            level: 1,
            threshold: None,
        })
        .collect();
    let mut edges = Vec::new();
    for (l, level) in middle.iter().enumerate() {
        for &(threshold, deps) in level.iter() {
            let id = nodes.len();
            nodes.push(NodeDocument {
                id,
                level: l + 2,
                threshold: Some(threshold),
            });
            edges.extend(deps.iter().map(|&d| [d, id]));
        }
    }
    let mut class_nodes = Vec::new();
    for deps in classes {
        let id = nodes.len();
        nodes.push(NodeDocument {
            id,
            level: levels,
            threshold: None,
        });
        edges.extend(deps.iter().map(|&d| [d, id]));
        class_nodes.push(id);
    }
    let doc = GraphDocument {
        levels,
        nodes,
        edges,
        class_nodes,
    };
    NeurashedGraph::from_document(&doc).expect("built-in graph is valid")
}

fn pattern(fire: &[usize], label: usize, weight: f64, group: &str) -> InputPattern {
    InputPattern::new(fire.iter().copied(), label)
        .expect("built-in pattern is nonempty")
        .with_weight(weight)
        .with_group(group)
}

fn config(iterations: u64, snapshot_every: u64) -> TrainConfig {
    TrainConfig {
        batch_size: 1,
        iterations,
        seed: 1,
        init: Init::Uniform { lo: 0.0, hi: 0.01 },
        snapshot_every,
        sampling: Sampling::WithReplacement,
    }
}

/// Three classes on four levels. Level 1 is u0..u7 (ids 0-7), level 2
/// v0..v3 (8-11), level 3 w0..w2 (12-14), classes C1..C3 (15-17).
///
/// Class 1 has two sub-types that differ in one input (u3 vs u4) and share
/// the rest of their pathway; class 2 shares u0, u1 and v0 with class 1;
/// class 3 shares only u0.
pub fn fig2_three_class() -> Scenario {
    let graph = layered(
        8,
        &[
            &[(2, &[0, 1, 2]), (1, &[2, 3, 4]), (2, &[1, 5, 6]), (2, &[0, 6, 7])],
            &[(2, &[8, 9]), (2, &[8, 10]), (1, &[11])],
        ],
        &[&[12], &[13], &[14]],
    );
    let dataset = Dataset::new(vec![
        pattern(&[0, 1, 2, 3], 0, 2.0, "1a"),
        pattern(&[0, 1, 2, 4], 0, 2.0, "1b"),
        pattern(&[0, 1, 5], 1, 3.0, "2"),
        pattern(&[0, 6, 7], 2, 3.0, "3"),
    ]);
    let schedule = UpdateSchedule::uniform(UpdateRule::multiply(1.05), UpdateRule::multiply(0.98));
    let node_groups = vec![
        NodeGroup::new("level1", 0..8),
        NodeGroup::new("level2", 8..12),
        NodeGroup::new("level3", 12..15),
    ];
    Scenario {
        name: "fig2-three-class".into(),
        graph,
        dataset,
        config: config(2000, 100),
        schedule,
        node_groups,
        expectations: vec![
            Expectation::Convergence {
                seeds: vec![1, 2, 3],
                min_true_class_probability: 0.99,
            },
            Expectation::ElasticityOrder {
                seeds: vec![1, 2, 3],
                base_group: "1a".into(),
                test_groups: vec!["1b".into(), "2".into(), "3".into()],
            },
        ],
    }
}

/// Binary classification. Level-1 ids 0-12 are inputs 1-13 (input 7, id 6,
/// is shared by both classes); level 2 is n1..n6 (ids 13-18); classes are
/// ids 19 and 20.
///
/// n2 and n5 are the dominant nodes: they fire on two of their three
/// dependents and so fire for every pattern of their class, while n1/n3
/// (n4/n6) split the class into two sub-types.
pub fn fig3_bottleneck() -> Scenario {
    let graph = layered(
        13,
        &[&[
            (1, &[0, 1, 2]),
            (2, &[1, 4, 6]),
            (1, &[3, 4, 5]),
            (1, &[7, 8, 9]),
            (2, &[8, 11, 6]),
            (1, &[10, 11, 12]),
        ]],
        &[&[13, 14, 15], &[16, 17, 18]],
    );
    let ones = |v: [usize; 3]| v.map(|i| i - 1);
    let dataset = Dataset::new(vec![
        pattern(&ones([1, 2, 7]), 0, 1.0, "1-a"),
        pattern(&ones([2, 3, 7]), 0, 1.0, "1-b"),
        pattern(&ones([4, 5, 7]), 0, 1.0, "1-c"),
        pattern(&ones([5, 6, 7]), 0, 1.0, "1-d"),
        pattern(&ones([8, 9, 7]), 1, 1.0, "2-a"),
        pattern(&ones([9, 10, 7]), 1, 1.0, "2-b"),
        pattern(&ones([11, 12, 7]), 1, 1.0, "2-c"),
        pattern(&ones([12, 13, 7]), 1, 1.0, "2-d"),
    ]);
    let up = UpdateRule::multiply(1.022f64.powf(11.0 / 4.0));
    let down = UpdateRule::multiply(1.022f64.powf(-1.0 / 4.0));
    let shared = RuleOverride {
        up: Some(UpdateRule::multiply(1.022f64.powf(3.0 / 4.0))),
        down: None,
    };
    let schedule = UpdateSchedule::from_table(RuleTable::new(up, down).with_node_override(NodeId(6), shared));
    Scenario {
        name: "fig3-bottleneck".into(),
        graph,
        dataset,
        config: config(4000, 50),
        schedule,
        node_groups: vec![NodeGroup::new("level1", 0..13), NodeGroup::new("level2", 13..19)],
        expectations: vec![Expectation::InformationBottleneck {
            level: 2,
            seed: 1,
            eval_every: 50,
            sigma: DEFAULT_SIGMA,
            mc_samples: DEFAULT_MC_SAMPLES,
            min_peak_mi_input: 1.85,
            final_mi_input: 1.0,
            final_mi_input_tolerance: 0.15,
            final_mi_label: 1.0,
            final_mi_label_tolerance: 0.1,
        }],
    }
}

/// One class reached by two redundant pathways that share s0, s1 and m_s.
///
/// Level 1 is s0, s1, a0, a1, b0, b1 (ids 0-5) plus x0 (6); level 2 is
/// m_s, m_a, m_b (7-9) plus m_x (10); the class of interest is id 11. The
/// x0 -> m_x -> id 12 branch only exists because a graph needs two classes;
/// no pattern uses it.
pub fn fig4_batch() -> Scenario {
    let graph = layered(
        7,
        &[&[(2, &[0, 1]), (1, &[2, 3]), (1, &[4, 5]), (1, &[6])]],
        &[&[7, 8, 9], &[10]],
    );
    let dataset = Dataset::new(vec![
        pattern(&[0, 1, 2, 3], 0, 1.0, "a"),
        pattern(&[0, 1, 4, 5], 0, 1.0, "b"),
    ]);
    let schedule = UpdateSchedule::uniform(UpdateRule::multiply(1.05), UpdateRule::multiply(0.98));
    Scenario {
        name: "fig4-batch".into(),
        graph,
        dataset,
        config: config(1500, 100),
        schedule,
        node_groups: vec![
            NodeGroup::new("pathway_a", [0, 1, 2, 3, 7, 8]),
            NodeGroup::new("pathway_b", [0, 1, 4, 5, 7, 9]),
            NodeGroup::new("shared", [0, 1, 7]),
        ],
        expectations: vec![Expectation::SparserWithSmallBatch {
            seeds: vec![1, 2, 3],
            small_batch: BatchSize::Size(1),
            large_batch: BatchSize::Full,
            groups: vec!["pathway_a".into(), "pathway_b".into()],
        }],
    }
}
