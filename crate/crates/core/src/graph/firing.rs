use super::{FiringError, InputPattern, NeurashedGraph, NodeId};

/// Which nodes fire, across all levels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiringState {
    firing: Vec<bool>,
}

impl FiringState {
    pub fn empty(num_nodes: usize) -> Self {
        FiringState {
            firing: vec![false; num_nodes],
        }
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.firing.get(id.0).copied().unwrap_or(false)
    }

    pub fn insert(&mut self, id: NodeId) {
        self.firing[id.0] = true;
    }

    /// Firing node ids, ascending.
    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.firing
            .iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(|(i, _)| NodeId(i))
    }

    pub fn count(&self) -> usize {
        self.firing.iter().filter(|&&f| f).count()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.firing
    }

    pub fn union_with(&mut self, other: &FiringState) {
        for (a, &b) in self.firing.iter_mut().zip(&other.firing) {
            *a |= b;
        }
    }
}

/// Subgraph induced by a firing state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeaturePathway {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<(NodeId, NodeId)>,
}

impl FeaturePathway {
    pub fn induced(graph: &NeurashedGraph, state: &FiringState) -> Self {
        FeaturePathway {
            nodes: state.nodes().collect(),
            edges: graph
                .edges()
                .iter()
                .copied()
                .filter(|&(a, b)| state.contains(a) && state.contains(b))
                .collect(),
        }
    }
}

/// Evaluates threshold rules level by level.
///
/// First-level firing comes from the input. A middle node fires when at least
/// `threshold` of its dependents fire. When `supervised`, the class node of
/// the input's label fires at the top level; otherwise no top node fires.
pub fn compute_firing(
    graph: &NeurashedGraph,
    input: &InputPattern,
    supervised: bool,
) -> Result<FiringState, FiringError> {
    input.check(graph)?;
    let mut state = FiringState::empty(graph.num_nodes());
    for &id in input.firing() {
        state.insert(id);
    }
    for level in 2..graph.num_levels() {
        for &id in graph.nodes_at(level) {
            let active = graph
                .dependents(id)
                .iter()
                .filter(|&&d| state.contains(d))
                .count();
            let threshold = graph.threshold(id).expect("middle nodes carry thresholds") as usize;
            if active >= threshold {
                state.insert(id);
            }
        }
    }
    if supervised {
        state.insert(graph.class_nodes()[input.label]);
    }
    Ok(state)
}

/// Feature pathway of a single input (supervised firing).
pub fn feature_pathway(
    graph: &NeurashedGraph,
    input: &InputPattern,
) -> Result<FeaturePathway, FiringError> {
    let state = compute_firing(graph, input, true)?;
    Ok(FeaturePathway::induced(graph, &state))
}

/// Mini-batch firing: a node fires if it lies on the pathway of at least one
/// batch member. Thresholds are evaluated per sample, never on the union of
/// the inputs.
pub fn union_firing(
    graph: &NeurashedGraph,
    batch: &[&InputPattern],
) -> Result<FiringState, FiringError> {
    if batch.is_empty() {
        return Err(FiringError::EmptyBatch);
    }
    let mut union = FiringState::empty(graph.num_nodes());
    for input in batch {
        union.union_with(&compute_firing(graph, input, true)?);
    }
    Ok(union)
}
