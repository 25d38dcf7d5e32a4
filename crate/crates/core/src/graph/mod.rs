//! Leveled feature graphs: structure, on-disk description and firing rules.
//!
//! A graph is a stack of levels. Level 1 holds the input features, the top
//! level holds one node per class, and every edge joins a node to one of its
//! dependents on the level directly below. Middle-level nodes carry an integer
//! firing threshold: they fire when at least that many dependents fire.

mod dataset;
mod document;
mod firing;

pub use dataset::{parse_dataset, Dataset, DatasetDocument, DatasetError, InputPattern, PatternDocument};
pub use document::{parse_graph_spec, validate_graph, GraphDocument, NodeDocument};
pub use firing::{compute_firing, feature_pathway, union_firing, FeaturePathway, FiringState};

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense node identifier, `0..N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<usize> for NodeId {
    fn from(v: usize) -> Self {
        NodeId(v)
    }
}

/// Structural problems with a graph description.
///
/// The parser stops at the first one it meets; [`validate_graph`] collects all
/// of them.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("MalformedDocument: {0}")]
    MalformedDocument(String),
    #[error("TooFewLevels: a graph needs at least 2 levels, got {0}")]
    TooFewLevels(usize),
    #[error("DuplicateNodeId: node {0} declared more than once")]
    DuplicateNodeId(usize),
    #[error("NonDenseIds: node ids must be exactly 0..{count}, missing {missing}")]
    NonDenseIds { count: usize, missing: usize },
    #[error("LevelOutOfRange: node {node} has level {level}, expected 1..={levels}")]
    LevelOutOfRange { node: usize, level: usize, levels: usize },
    #[error("UnknownNode: id {0} is referenced but never declared")]
    UnknownNode(usize),
    #[error("EdgeSkipsLevel: edge {lower}->{upper} joins level {lower_level} to level {upper_level}")]
    EdgeSkipsLevel {
        lower: usize,
        upper: usize,
        lower_level: usize,
        upper_level: usize,
    },
    #[error("DuplicateEdge: edge {0}->{1} listed more than once")]
    DuplicateEdge(usize, usize),
    #[error("ThresholdOutOfRange: node {node} has threshold {threshold:?} with indegree {indegree}")]
    ThresholdOutOfRange {
        node: usize,
        threshold: Option<u32>,
        indegree: usize,
    },
    #[error("NoClassNodes: at least 2 class nodes are required, got {0}")]
    NoClassNodes(usize),
    #[error("ClassNodeMismatch: {0}")]
    ClassNodeMismatch(String),
}

impl GraphError {
    /// Stable name of the violation kind, used in messages and comparisons.
    pub fn kind(&self) -> &'static str {
        match self {
            GraphError::MalformedDocument(_) => "MalformedDocument",
            GraphError::TooFewLevels(_) => "TooFewLevels",
            GraphError::DuplicateNodeId(_) => "DuplicateNodeId",
            GraphError::NonDenseIds { .. } => "NonDenseIds",
            GraphError::LevelOutOfRange { .. } => "LevelOutOfRange",
            GraphError::UnknownNode(_) => "UnknownNode",
            GraphError::EdgeSkipsLevel { .. } => "EdgeSkipsLevel",
            GraphError::DuplicateEdge(..) => "DuplicateEdge",
            GraphError::ThresholdOutOfRange { .. } => "ThresholdOutOfRange",
            GraphError::NoClassNodes(_) => "NoClassNodes",
            GraphError::ClassNodeMismatch(_) => "ClassNodeMismatch",
        }
    }
}

/// Errors raised when evaluating inputs against a graph.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FiringError {
    #[error("InputNodeNotLevelOne: node {0} is not a first-level node")]
    InputNodeNotLevelOne(NodeId),
    #[error("UnknownNode: input references node {0} outside the graph")]
    UnknownNode(NodeId),
    #[error("EmptyFiringSet: an input pattern must fire at least one node")]
    EmptyFiringSet,
    #[error("LabelOutOfRange: label {label} but the graph has {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },
    #[error("EmptyBatch: a batch needs at least one pattern")]
    EmptyBatch,
}

/// Immutable leveled DAG.
///
/// Levels are 1-based. Every node appears in exactly one level; dependents of a
/// node are the nodes on the level below that have an edge into it.
#[derive(Debug, Clone, PartialEq)]
pub struct NeurashedGraph {
    num_levels: usize,
    level: Vec<usize>,
    threshold: Vec<Option<u32>>,
    deps: Vec<Vec<NodeId>>,
    levels: Vec<Vec<NodeId>>,
    class_nodes: Vec<NodeId>,
    class_index: Vec<Option<usize>>,
    edges: Vec<(NodeId, NodeId)>,
    eta_edges: Vec<(NodeId, NodeId)>,
}

impl NeurashedGraph {
    pub fn num_levels(&self) -> usize {
        self.num_levels
    }

    pub fn num_nodes(&self) -> usize {
        self.level.len()
    }

    pub fn num_classes(&self) -> usize {
        self.class_nodes.len()
    }

    pub fn level_of(&self, id: NodeId) -> usize {
        self.level[id.0]
    }

    pub fn threshold(&self, id: NodeId) -> Option<u32> {
        self.threshold[id.0]
    }

    /// Dependents of `id` on the level below, in ascending id order.
    pub fn dependents(&self, id: NodeId) -> &[NodeId] {
        &self.deps[id.0]
    }

    /// Node ids on `level` (1-based), ascending.
    pub fn nodes_at(&self, level: usize) -> &[NodeId] {
        &self.levels[level - 1]
    }

    pub fn class_nodes(&self) -> &[NodeId] {
        &self.class_nodes
    }

    /// Class index of a top-level node.
    pub fn class_of(&self, id: NodeId) -> Option<usize> {
        self.class_index[id.0]
    }

    pub fn is_top(&self, id: NodeId) -> bool {
        self.level[id.0] == self.num_levels
    }

    pub fn contains(&self, id: NodeId) -> bool {
        id.0 < self.level.len()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.level.len()).map(NodeId)
    }

    /// All nodes that carry an amplification factor (everything below the top
    /// level), ascending.
    pub fn amplified_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.node_ids().filter(move |&id| !self.is_top(id))
    }

    /// All edges, sorted by `(lower, upper)`.
    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    /// Edges from the second-last level into class nodes, sorted by
    /// `(lower, upper)`. This order is the storage order of edge weights.
    pub fn eta_edges(&self) -> &[(NodeId, NodeId)] {
        &self.eta_edges
    }

    pub fn eta_index(&self, lower: NodeId, class_node: NodeId) -> Option<usize> {
        self.eta_edges.binary_search(&(lower, class_node)).ok()
    }

    /// Canonical document: nodes by id, edges sorted, class order preserved.
    pub fn to_document(&self) -> GraphDocument {
        GraphDocument {
            levels: self.num_levels,
            nodes: self
                .node_ids()
                .map(|id| NodeDocument {
                    id: id.0,
                    level: self.level[id.0],
                    threshold: self.threshold[id.0],
                })
                .collect(),
            edges: self.edges.iter().map(|&(a, b)| [a.0, b.0]).collect(),
            class_nodes: self.class_nodes.iter().map(|c| c.0).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("graph document serializes")
    }
}
