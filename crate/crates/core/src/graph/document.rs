use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use super::{GraphError, NeurashedGraph, NodeId};

/// On-disk graph description.
///
/// ```json
/// { "levels": 3,
///   "nodes": [{"id": 0, "level": 1}, {"id": 2, "level": 2, "threshold": 1}],
///   "edges": [[0, 2]],
///   "class_nodes": [3, 4] }
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub levels: usize,
    pub nodes: Vec<NodeDocument>,
    pub edges: Vec<[usize; 2]>,
    pub class_nodes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeDocument {
    pub id: usize,
    pub level: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<u32>,
}

/// Parses and validates a JSON graph description.
pub fn parse_graph_spec(text: &str) -> Result<NeurashedGraph, GraphError> {
    let doc: GraphDocument =
        serde_json::from_str(text).map_err(|e| GraphError::MalformedDocument(e.to_string()))?;
    NeurashedGraph::from_document(&doc)
}

impl NeurashedGraph {
    /// Builds a graph, failing on the first structural violation.
    pub fn from_document(doc: &GraphDocument) -> Result<Self, GraphError> {
        let num_levels = doc.levels;
        if num_levels < 2 {
            return Err(GraphError::TooFewLevels(num_levels));
        }

        let n = doc.nodes.len();
        let mut level = vec![0usize; n];
        let mut threshold = vec![None; n];
        let mut seen = vec![false; n];
        for node in &doc.nodes {
            if node.id < n && seen[node.id] {
                return Err(GraphError::DuplicateNodeId(node.id));
            }
            if node.id >= n {
                // Either a duplicate of a later id or a gap; find which.
                let dup = doc.nodes.iter().filter(|m| m.id == node.id).count() > 1;
                if dup {
                    return Err(GraphError::DuplicateNodeId(node.id));
                }
                let missing = (0..n)
                    .find(|&i| !doc.nodes.iter().any(|m| m.id == i))
                    .unwrap_or(n);
                return Err(GraphError::NonDenseIds { count: n, missing });
            }
            seen[node.id] = true;
            if node.level == 0 || node.level > num_levels {
                return Err(GraphError::LevelOutOfRange {
                    node: node.id,
                    level: node.level,
                    levels: num_levels,
                });
            }
            level[node.id] = node.level;
            threshold[node.id] = node.threshold;
        }

        let mut levels: Vec<Vec<NodeId>> = vec![Vec::new(); num_levels];
        for (i, &l) in level.iter().enumerate() {
            levels[l - 1].push(NodeId(i));
        }
        if let Some(empty) = levels.iter().position(Vec::is_empty) {
            return Err(GraphError::MalformedDocument(format!(
                "level {} has no nodes",
                empty + 1
            )));
        }

        let mut edge_set = BTreeSet::new();
        let mut deps: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        for &[lower, upper] in &doc.edges {
            for id in [lower, upper] {
                if id >= n {
                    return Err(GraphError::UnknownNode(id));
                }
            }
            if level[upper] != level[lower] + 1 {
                return Err(GraphError::EdgeSkipsLevel {
                    lower,
                    upper,
                    lower_level: level[lower],
                    upper_level: level[upper],
                });
            }
            if !edge_set.insert((NodeId(lower), NodeId(upper))) {
                return Err(GraphError::DuplicateEdge(lower, upper));
            }
            deps[upper].push(NodeId(lower));
        }
        for d in &mut deps {
            d.sort_unstable();
        }

        if doc.class_nodes.len() < 2 {
            return Err(GraphError::NoClassNodes(doc.class_nodes.len()));
        }
        let mut class_index = vec![None; n];
        for (k, &c) in doc.class_nodes.iter().enumerate() {
            if c >= n {
                return Err(GraphError::UnknownNode(c));
            }
            if level[c] != num_levels {
                return Err(GraphError::ClassNodeMismatch(format!(
                    "class node {c} is on level {}, not the top level",
                    level[c]
                )));
            }
            if class_index[c].replace(k).is_some() {
                return Err(GraphError::ClassNodeMismatch(format!(
                    "class node {c} listed twice"
                )));
            }
        }
        if let Some(&unlisted) = levels[num_levels - 1]
            .iter()
            .find(|id| class_index[id.0].is_none())
        {
            return Err(GraphError::ClassNodeMismatch(format!(
                "top-level node {unlisted} is not listed as a class node"
            )));
        }

        for id in 0..n {
            let middle = level[id] > 1 && level[id] < num_levels;
            let indegree = deps[id].len();
            let ok = match threshold[id] {
                Some(t) => middle && t >= 1 && (t as usize) <= indegree,
                None => !middle,
            };
            if !ok {
                return Err(GraphError::ThresholdOutOfRange {
                    node: id,
                    threshold: threshold[id],
                    indegree,
                });
            }
        }

        let edges: Vec<_> = edge_set.into_iter().collect();
        let eta_edges = edges
            .iter()
            .copied()
            .filter(|&(_, upper)| level[upper.0] == num_levels)
            .collect();

        Ok(NeurashedGraph {
            num_levels,
            level,
            threshold,
            deps,
            levels,
            class_nodes: doc.class_nodes.iter().map(|&c| NodeId(c)).collect(),
            class_index,
            edges,
            eta_edges,
        })
    }
}

/// Checks every structural invariant of a document and returns all
/// violations found. An empty result means the parser would accept it.
///
/// This is written independently from [`NeurashedGraph::from_document`] so the
/// two can be cross-checked.
pub fn validate_graph(doc: &GraphDocument) -> Vec<GraphError> {
    let mut out = Vec::new();
    let levels = doc.levels;
    if levels < 2 {
        out.push(GraphError::TooFewLevels(levels));
    }

    let mut level_of: BTreeMap<usize, usize> = BTreeMap::new();
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for node in &doc.nodes {
        *counts.entry(node.id).or_default() += 1;
        level_of.entry(node.id).or_insert(node.level);
    }
    for (&id, &c) in &counts {
        if c > 1 {
            out.push(GraphError::DuplicateNodeId(id));
        }
    }
    let n = doc.nodes.len();
    let distinct: HashSet<usize> = doc.nodes.iter().map(|m| m.id).collect();
    if distinct.len() == n {
        if let Some(missing) = (0..n).find(|i| !distinct.contains(i)) {
            out.push(GraphError::NonDenseIds { count: n, missing });
        }
    }
    for node in &doc.nodes {
        if !(1..=levels).contains(&node.level) {
            out.push(GraphError::LevelOutOfRange {
                node: node.id,
                level: node.level,
                levels,
            });
        }
    }
    if levels >= 2 {
        for l in 1..=levels {
            if !doc.nodes.iter().any(|m| m.level == l) {
                out.push(GraphError::MalformedDocument(format!("level {l} has no nodes")));
            }
        }
    }

    let mut indegree: BTreeMap<usize, usize> = BTreeMap::new();
    let mut seen_edges = HashSet::new();
    for &[lower, upper] in &doc.edges {
        let (Some(&ll), Some(&ul)) = (level_of.get(&lower), level_of.get(&upper)) else {
            for id in [lower, upper] {
                if !level_of.contains_key(&id) {
                    out.push(GraphError::UnknownNode(id));
                }
            }
            continue;
        };
        if ul != ll + 1 {
            out.push(GraphError::EdgeSkipsLevel {
                lower,
                upper,
                lower_level: ll,
                upper_level: ul,
            });
        }
        if !seen_edges.insert((lower, upper)) {
            out.push(GraphError::DuplicateEdge(lower, upper));
        } else {
            *indegree.entry(upper).or_default() += 1;
        }
    }

    if doc.class_nodes.len() < 2 {
        out.push(GraphError::NoClassNodes(doc.class_nodes.len()));
    }
    let listed: BTreeSet<usize> = doc.class_nodes.iter().copied().collect();
    if listed.len() != doc.class_nodes.len() {
        out.push(GraphError::ClassNodeMismatch("duplicate class node".into()));
    }
    for &c in &listed {
        match level_of.get(&c) {
            None => out.push(GraphError::UnknownNode(c)),
            Some(&l) if l != levels => out.push(GraphError::ClassNodeMismatch(format!(
                "class node {c} is not on the top level"
            ))),
            _ => {}
        }
    }
    for node in &doc.nodes {
        if node.level == levels && !listed.contains(&node.id) {
            out.push(GraphError::ClassNodeMismatch(format!(
                "top-level node {} is not a class node",
                node.id
            )));
        }
    }

    for node in &doc.nodes {
        let middle = node.level > 1 && node.level < levels;
        let deg = indegree.get(&node.id).copied().unwrap_or(0);
        let bad = if middle {
            node.threshold.is_none_or(|t| t == 0 || t as usize > deg)
        } else {
            node.threshold.is_some()
        };
        if bad {
            out.push(GraphError::ThresholdOutOfRange {
                node: node.id,
                threshold: node.threshold,
                indegree: deg,
            });
        }
    }
    out
}
