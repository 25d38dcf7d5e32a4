//! Random graph generators and brute-force reference evaluators shared by
//! the integration tests.
#![allow(dead_code)]

use rand::seq::IndexedRandom;
use rand::Rng;

use neurashed::dynamics::ModelState;
use neurashed::graph::{GraphDocument, InputPattern, NeurashedGraph, NodeDocument, NodeId};

/// A random valid graph document with `levels` levels and at most
/// `max_nodes` nodes. Every upper node gets a nonempty dependent set drawn
/// from the level below.
pub fn random_document(rng: &mut impl Rng, levels: usize, max_nodes: usize) -> GraphDocument {
    assert!(levels >= 2 && max_nodes >= 2 * levels);
    let mut sizes = vec![1usize; levels];
    sizes[levels - 1] = 2;
    let mut spare = rng.random_range(0..=max_nodes - (levels + 1));
    while spare > 0 {
        let l = rng.random_range(0..levels);
        if l == levels - 1 && sizes[l] >= 4 {
            continue;
        }
        sizes[l] += 1;
        spare -= 1;
    }
    let mut nodes = Vec::new();
    let mut by_level: Vec<Vec<usize>> = Vec::new();
    for (l, &n) in sizes.iter().enumerate() {
        let ids: Vec<usize> = (nodes.len()..nodes.len() + n).collect();
        for &id in &ids {
            nodes.push(NodeDocument {
                id,
                level: l + 1,
                threshold: None,
            });
        }
        by_level.push(ids);
    }
    let mut edges = Vec::new();
    for l in 1..levels {
        for &upper in &by_level[l] {
            let below = &by_level[l - 1];
            let k = rng.random_range(1..=below.len().min(4));
            let deps: Vec<usize> = below.choose_multiple(rng, k).copied().collect();
            for &d in &deps {
                edges.push([d, upper]);
            }
            if l < levels - 1 {
                nodes[upper].threshold = Some(rng.random_range(1..=k as u32));
            }
        }
    }
    GraphDocument {
        levels,
        nodes,
        edges,
        class_nodes: by_level[levels - 1].clone(),
    }
}

pub fn random_graph(rng: &mut impl Rng) -> (GraphDocument, NeurashedGraph) {
    let levels = rng.random_range(2..=5);
    let doc = random_document(rng, levels, 30);
    let g = NeurashedGraph::from_document(&doc).expect("generated graph is valid");
    (doc, g)
}

/// Random non-negative state, with some exact zeros.
pub fn random_state(rng: &mut impl Rng, g: &NeurashedGraph) -> ModelState {
    let mut s = ModelState::zeros(g);
    let draw = |rng: &mut dyn rand::RngCore| {
        if rng.random_bool(0.1) {
            0.0
        } else {
            rng.random_range(0.0..3.0)
        }
    };
    for id in g.amplified_nodes().collect::<Vec<_>>() {
        s.set_lambda(id, draw(rng));
    }
    for i in 0..g.eta_edges().len() {
        s.set_eta(i, draw(rng));
    }
    s
}

pub fn random_input(rng: &mut impl Rng, g: &NeurashedGraph) -> InputPattern {
    let firsts: Vec<usize> = g.nodes_at(1).iter().map(|id| id.0).collect();
    let k = rng.random_range(1..=firsts.len());
    let fire: Vec<usize> = firsts.choose_multiple(rng, k).copied().collect();
    InputPattern::new(fire, rng.random_range(0..g.num_classes())).unwrap()
}

/// Reference evaluator working directly on the document: plain recursion
/// with no memoization and no use of the graph's level index.
pub struct Oracle<'a> {
    pub doc: &'a GraphDocument,
}

impl Oracle<'_> {
    fn level(&self, id: usize) -> usize {
        self.doc.nodes.iter().find(|n| n.id == id).unwrap().level
    }

    fn deps(&self, id: usize) -> Vec<usize> {
        self.doc.edges.iter().filter(|e| e[1] == id).map(|e| e[0]).collect()
    }

    pub fn fires(&self, id: usize, input: &[usize]) -> bool {
        let node = self.doc.nodes.iter().find(|n| n.id == id).unwrap();
        if node.level == 1 {
            return input.contains(&id);
        }
        if node.level == self.doc.levels {
            return false;
        }
        let active = self.deps(id).into_iter().filter(|&d| self.fires(d, input)).count();
        active >= node.threshold.unwrap() as usize
    }

    pub fn score(&self, id: usize, input: &[usize], lambda: &dyn Fn(usize) -> f64) -> f64 {
        if !self.fires(id, input) {
            return 0.0;
        }
        if self.level(id) == 1 {
            return lambda(id);
        }
        lambda(id) * self.deps(id).into_iter().map(|d| self.score(d, input, lambda)).sum::<f64>()
    }

    /// Class edges in ascending `(lower, upper)` order.
    pub fn class_edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<(usize, usize)> = self
            .doc
            .edges
            .iter()
            .filter(|e| self.level(e[1]) == self.doc.levels)
            .map(|e| (e[0], e[1]))
            .collect();
        e.sort_unstable();
        e
    }

    pub fn logits(&self, input: &[usize], state: &ModelState) -> Vec<f64> {
        let lambda = |id: usize| state.lambda(NodeId(id));
        let edges = self.class_edges();
        self.doc
            .class_nodes
            .iter()
            .map(|&c| {
                edges
                    .iter()
                    .zip(state.etas())
                    .filter(|((_, u), _)| *u == c)
                    .map(|(&(f, _), &eta)| eta * self.score(f, input, &lambda))
                    .sum()
            })
            .collect()
    }
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs())
}
