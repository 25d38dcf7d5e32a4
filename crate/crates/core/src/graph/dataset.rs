use serde::{Deserialize, Serialize};

use super::{FiringError, NeurashedGraph, NodeId};

/// One training sample: the set of first-level nodes it fires and its class.
#[derive(Debug, Clone, PartialEq)]
pub struct InputPattern {
    firing: Vec<NodeId>,
    pub label: usize,
    pub weight: f64,
    /// Optional grouping tag (e.g. a sub-type within a class).
    pub group: Option<String>,
}

impl InputPattern {
    pub fn new(firing: impl IntoIterator<Item = usize>, label: usize) -> Result<Self, FiringError> {
        let mut firing: Vec<NodeId> = firing.into_iter().map(NodeId).collect();
        firing.sort_unstable();
        firing.dedup();
        if firing.is_empty() {
            return Err(FiringError::EmptyFiringSet);
        }
        Ok(InputPattern {
            firing,
            label,
            weight: 1.0,
            group: None,
        })
    }

    pub fn with_weight(mut self, weight: f64) -> Self {
        self.weight = weight;
        self
    }

    pub fn with_group(mut self, group: impl Into<String>) -> Self {
        self.group = Some(group.into());
        self
    }

    /// Sorted, deduplicated first-level firing set.
    pub fn firing(&self) -> &[NodeId] {
        &self.firing
    }

    /// Group tag, falling back to `class<label>`.
    pub fn group_name(&self) -> String {
        self.group
            .clone()
            .unwrap_or_else(|| format!("class{}", self.label))
    }

    /// Checks the pattern against a graph.
    pub fn check(&self, graph: &NeurashedGraph) -> Result<(), FiringError> {
        for &id in &self.firing {
            if !graph.contains(id) {
                return Err(FiringError::UnknownNode(id));
            }
            if graph.level_of(id) != 1 {
                return Err(FiringError::InputNodeNotLevelOne(id));
            }
        }
        if self.label >= graph.num_classes() {
            return Err(FiringError::LabelOutOfRange {
                label: self.label,
                classes: graph.num_classes(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetDocument {
    pub patterns: Vec<PatternDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternDocument {
    pub fire: Vec<usize>,
    pub label: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
}

/// An ordered list of training patterns. Pattern ids are list positions.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub patterns: Vec<InputPattern>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DatasetError {
    #[error("MalformedDocument: {0}")]
    MalformedDocument(String),
    #[error("EmptyDataset: no patterns")]
    EmptyDataset,
    #[error("NonPositiveWeight: pattern {index} has weight {weight}")]
    NonPositiveWeight { index: usize, weight: f64 },
    #[error("pattern {index}: {source}")]
    Pattern {
        index: usize,
        #[source]
        source: FiringError,
    },
}

impl DatasetError {
    pub fn kind(&self) -> &'static str {
        match self {
            DatasetError::MalformedDocument(_) => "MalformedDocument",
            DatasetError::EmptyDataset => "EmptyDataset",
            DatasetError::NonPositiveWeight { .. } => "NonPositiveWeight",
            DatasetError::Pattern { source, .. } => match source {
                FiringError::InputNodeNotLevelOne(_) => "InputNodeNotLevelOne",
                FiringError::UnknownNode(_) => "UnknownNode",
                FiringError::EmptyFiringSet => "EmptyFiringSet",
                FiringError::LabelOutOfRange { .. } => "LabelOutOfRange",
                FiringError::EmptyBatch => "EmptyBatch",
            },
        }
    }
}

/// Parses a dataset file. Graph-dependent checks happen in
/// [`Dataset::validate_for`].
pub fn parse_dataset(text: &str) -> Result<Dataset, DatasetError> {
    let doc: DatasetDocument =
        serde_json::from_str(text).map_err(|e| DatasetError::MalformedDocument(e.to_string()))?;
    Dataset::from_document(&doc)
}

impl Dataset {
    pub fn new(patterns: Vec<InputPattern>) -> Self {
        Dataset { patterns }
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn from_document(doc: &DatasetDocument) -> Result<Self, DatasetError> {
        let mut patterns = Vec::with_capacity(doc.patterns.len());
        for (index, p) in doc.patterns.iter().enumerate() {
            let mut pat = InputPattern::new(p.fire.iter().copied(), p.label)
                .map_err(|source| DatasetError::Pattern { index, source })?;
            if let Some(w) = p.weight {
                if !(w > 0.0 && w.is_finite()) {
                    return Err(DatasetError::NonPositiveWeight { index, weight: w });
                }
                pat.weight = w;
            }
            pat.group = p.group.clone();
            patterns.push(pat);
        }
        Ok(Dataset { patterns })
    }

    pub fn to_document(&self) -> DatasetDocument {
        DatasetDocument {
            patterns: self
                .patterns
                .iter()
                .map(|p| PatternDocument {
                    fire: p.firing.iter().map(|n| n.0).collect(),
                    label: p.label,
                    weight: (p.weight != 1.0).then_some(p.weight),
                    group: p.group.clone(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("dataset serializes")
    }

    /// Full check of every pattern against `graph`.
    pub fn validate_for(&self, graph: &NeurashedGraph) -> Result<(), DatasetError> {
        if self.patterns.is_empty() {
            return Err(DatasetError::EmptyDataset);
        }
        for (index, p) in self.patterns.iter().enumerate() {
            if !(p.weight > 0.0 && p.weight.is_finite()) {
                return Err(DatasetError::NonPositiveWeight {
                    index,
                    weight: p.weight,
                });
            }
            p.check(graph)
                .map_err(|source| DatasetError::Pattern { index, source })?;
        }
        Ok(())
    }

    /// Distinct group names in first-appearance order.
    pub fn group_names(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for p in &self.patterns {
            let g = p.group_name();
            if !out.contains(&g) {
                out.push(g);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_weights_and_rejects_unknown_fields() {
        let ds = parse_dataset(r#"{"patterns":[{"fire":[1,0],"label":1,"weight":2.5}]}"#).unwrap();
        assert_eq!(ds.patterns[0].firing(), &[NodeId(0), NodeId(1)]);
        assert_eq!(ds.patterns[0].weight, 2.5);
        let err = parse_dataset(r#"{"patterns":[{"fire":[0],"label":0,"colour":1}]}"#).unwrap_err();
        assert_eq!(err.kind(), "MalformedDocument");
    }

    #[test]
    fn empty_firing_set_and_bad_weight() {
        let err = parse_dataset(r#"{"patterns":[{"fire":[],"label":0}]}"#).unwrap_err();
        assert_eq!(err.kind(), "EmptyFiringSet");
        let err = parse_dataset(r#"{"patterns":[{"fire":[0],"label":0,"weight":0}]}"#).unwrap_err();
        assert_eq!(err.kind(), "NonPositiveWeight");
    }
}
