//! Measurement instruments: level activations and their noisy mutual
//! information, local elasticity, and amplification sparsity.

mod elasticity;
mod mi;
mod sparsity;

pub use elasticity::{elasticity_report, local_elasticity, ElasticityReport};
pub use mi::{estimate_mutual_information, sup_normalize, MiEstimate, DEFAULT_MC_SAMPLES, DEFAULT_SIGMA};
pub use sparsity::{normalized_entropy, sparsity_profile, NodeGroup};

use thiserror::Error;

use crate::dynamics::{node_scores, ModelState};
use crate::graph::{FiringError, InputPattern, NeurashedGraph, NodeId};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("LevelOutOfRange: level {level}, activations exist for levels 1..={max}")]
    LevelOutOfRange { level: usize, max: usize },
    #[error("NonPositiveSigma: noise level must be positive, got {0}")]
    NonPositiveSigma(f64),
    #[error("NoSamples: at least one Monte Carlo sample is required")]
    NoSamples,
    #[error("NoPatterns: at least one activation vector is required")]
    NoPatterns,
    #[error("LengthMismatch: activations, weights and labels disagree in shape")]
    LengthMismatch,
    #[error("NonFiniteActivation: activations must be finite")]
    NonFiniteActivation,
    #[error("BadWeights: pattern weights must be positive")]
    BadWeights,
    #[error("ZeroDenominator: the update at the base input leaves its logits unchanged")]
    ZeroDenominator,
    #[error("EmptyGroup: node group {0:?} has no members")]
    EmptyGroup(String),
    #[error("UnknownNode: node {0} has no amplification factor")]
    UnknownNode(NodeId),
    #[error(transparent)]
    Firing(#[from] FiringError),
}

/// Scores of every node on `level`, in ascending id order (0 when not
/// firing). Only levels below the top carry scores.
pub fn level_activations(
    graph: &NeurashedGraph,
    state: &ModelState,
    input: &InputPattern,
    level: usize,
) -> Result<Vec<f64>, MetricsError> {
    let max = graph.num_levels() - 1;
    if level == 0 || level > max {
        return Err(MetricsError::LevelOutOfRange { level, max });
    }
    let scores = node_scores(graph, state, input)?;
    Ok(graph.nodes_at(level).iter().map(|id| scores[id.0]).collect())
}
