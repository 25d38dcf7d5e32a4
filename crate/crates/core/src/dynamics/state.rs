use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{NeurashedGraph, NodeId};

use super::config::{Init, TrainConfig};

/// RNG stream used for initial values; sampling uses [`SAMPLING_STREAM`].
pub const INIT_STREAM: u64 = 0;
pub const SAMPLING_STREAM: u64 = 1;

/// Learnable values: one amplification factor per non-top node and one weight
/// per class edge.
///
/// `lambda` is indexed by node id; slots of top-level nodes exist but are
/// always zero and never updated. `eta` follows
/// [`NeurashedGraph::eta_edges`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelState {
    lambda: Vec<f64>,
    eta: Vec<f64>,
}

impl ModelState {
    pub fn filled(graph: &NeurashedGraph, value: f64) -> Self {
        let lambda = graph
            .node_ids()
            .map(|id| if graph.is_top(id) { 0.0 } else { value })
            .collect();
        ModelState {
            lambda,
            eta: vec![value; graph.eta_edges().len()],
        }
    }

    pub fn zeros(graph: &NeurashedGraph) -> Self {
        Self::filled(graph, 0.0)
    }

    pub fn lambda(&self, id: NodeId) -> f64 {
        self.lambda[id.0]
    }

    pub fn set_lambda(&mut self, id: NodeId, value: f64) {
        self.lambda[id.0] = value;
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambda
    }

    pub fn eta(&self, index: usize) -> f64 {
        self.eta[index]
    }

    pub fn set_eta(&mut self, index: usize, value: f64) {
        self.eta[index] = value;
    }

    pub fn etas(&self) -> &[f64] {
        &self.eta
    }

    pub(crate) fn from_parts(lambda: Vec<f64>, eta: Vec<f64>) -> Self {
        ModelState { lambda, eta }
    }

    pub fn matches(&self, graph: &NeurashedGraph) -> bool {
        self.lambda.len() == graph.num_nodes()
            && self.eta.len() == graph.eta_edges().len()
            && graph
                .node_ids()
                .filter(|&id| graph.is_top(id))
                .all(|id| self.lambda[id.0] == 0.0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.lambda.iter().chain(&self.eta).all(|&v| v >= 0.0)
    }
}

fn draw_open(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    loop {
        let v = rng.random_range(lo..hi);
        if v > lo {
            return v;
        }
    }
}

/// Initial state.
///
/// Uniform draws come from ChaCha8 seeded with `config.seed` on stream
/// [`INIT_STREAM`]: first `λ` for non-top nodes in ascending id order, then
/// `η` in class-edge order.
pub fn init_state(graph: &NeurashedGraph, config: &TrainConfig) -> ModelState {
    match config.init {
        Init::Zeros => ModelState::zeros(graph),
        Init::Constant { value } => ModelState::filled(graph, value),
        Init::Uniform { lo, hi } => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(INIT_STREAM);
            let mut state = ModelState::zeros(graph);
            for id in graph.amplified_nodes() {
                state.lambda[id.0] = draw_open(&mut rng, lo, hi);
            }
            for v in state.eta.iter_mut() {
                *v = draw_open(&mut rng, lo, hi);
            }
            state
        }
    }
}
