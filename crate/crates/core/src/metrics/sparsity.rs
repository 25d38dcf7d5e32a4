use serde::{Deserialize, Serialize};

use crate::dynamics::ModelState;
use crate::graph::NodeId;

use super::MetricsError;

/// A named set of nodes whose amplification factors are compared.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeGroup {
    pub name: String,
    pub nodes: Vec<NodeId>,
}

impl NodeGroup {
    pub fn new(name: impl Into<String>, nodes: impl IntoIterator<Item = usize>) -> Self {
        NodeGroup {
            name: name.into(),
            nodes: nodes.into_iter().map(NodeId).collect(),
        }
    }
}

/// Shannon entropy of `values / Σ values`, divided by `log₂ n`.
///
/// An all-zero vector counts as uniform (1.0). A single value has nothing to
/// spread over and gives 0.0.
pub fn normalized_entropy(values: &[f64]) -> f64 {
    let n = values.len();
    if n <= 1 {
        return 0.0;
    }
    let total: f64 = values.iter().sum();
    if total <= 0.0 {
        return 1.0;
    }
    let h: f64 = values
        .iter()
        .map(|&v| v / total)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum();
    h / (n as f64).log2()
}

/// Normalized `λ` entropy per group. Lower means sparser.
pub fn sparsity_profile(state: &ModelState, groups: &[NodeGroup]) -> Result<Vec<(String, f64)>, MetricsError> {
    groups
        .iter()
        .map(|g| {
            if g.nodes.is_empty() {
                return Err(MetricsError::EmptyGroup(g.name.clone()));
            }
            let values = g
                .nodes
                .iter()
                .map(|&id| {
                    state
                        .lambdas()
                        .get(id.0)
                        .copied()
                        .ok_or(MetricsError::UnknownNode(id))
                })
                .collect::<Result<Vec<f64>, _>>()?;
            Ok((g.name.clone(), normalized_entropy(&values)))
        })
        .collect()
}
