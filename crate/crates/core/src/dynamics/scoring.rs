use crate::graph::{compute_firing, FiringError, FiringState, InputPattern, NeurashedGraph};

use super::{DynamicsError, ModelState};

/// Scores for a given firing state, bottom-up.
///
/// Firing first-level nodes score `λ`; a firing middle node scores `λ` times
/// the sum of its dependents' scores; everything else (including the top
/// level) scores zero.
pub fn scores_for_firing(graph: &NeurashedGraph, state: &ModelState, firing: &FiringState) -> Vec<f64> {
    let mut scores = vec![0.0; graph.num_nodes()];
    for &id in graph.nodes_at(1) {
        if firing.contains(id) {
            scores[id.0] = state.lambda(id);
        }
    }
    for level in 2..graph.num_levels() {
        for &id in graph.nodes_at(level) {
            if firing.contains(id) {
                let incoming: f64 = graph.dependents(id).iter().map(|d| scores[d.0]).sum();
                scores[id.0] = state.lambda(id) * incoming;
            }
        }
    }
    scores
}

/// `Z_j = Σ η_{f,F_j} S_f` over the class edges into class node `F_j`.
pub fn logits_from_scores(graph: &NeurashedGraph, state: &ModelState, scores: &[f64]) -> Vec<f64> {
    let mut z = vec![0.0; graph.num_classes()];
    for (i, &(lower, class_node)) in graph.eta_edges().iter().enumerate() {
        let k = graph.class_of(class_node).expect("class edges end at class nodes");
        z[k] += state.eta(i) * scores[lower.0];
    }
    z
}

/// Per-node scores for an input (unsupervised firing).
pub fn node_scores(
    graph: &NeurashedGraph,
    state: &ModelState,
    input: &InputPattern,
) -> Result<Vec<f64>, FiringError> {
    let firing = compute_firing(graph, input, false)?;
    Ok(scores_for_firing(graph, state, &firing))
}

pub fn class_logits(
    graph: &NeurashedGraph,
    state: &ModelState,
    input: &InputPattern,
) -> Result<Vec<f64>, FiringError> {
    let scores = node_scores(graph, state, input)?;
    Ok(logits_from_scores(graph, state, &scores))
}

/// Max-shifted softmax.
pub fn predict_proba(logits: &[f64]) -> Result<Vec<f64>, DynamicsError> {
    if let Some(&bad) = logits.iter().find(|z| !z.is_finite()) {
        return Err(DynamicsError::NonFiniteLogit(bad));
    }
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    Ok(exps.into_iter().map(|e| e / total).collect())
}

pub fn argmax(values: &[f64]) -> usize {
    values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, &v)| if v > best.1 { (i, v) } else { best })
        .0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{GraphDocument, NodeDocument, NodeId};

    /// u1, u2 -> m (threshold 1) -> {C1, C2}
    fn tiny() -> NeurashedGraph {
        let doc = GraphDocument {
            levels: 3,
            nodes: vec![
                NodeDocument { id: 0, level: 1, threshold: None },
                NodeDocument { id: 1, level: 1, threshold: None },
                NodeDocument { id: 2, level: 2, threshold: Some(1) },
                NodeDocument { id: 3, level: 3, threshold: None },
                NodeDocument { id: 4, level: 3, threshold: None },
            ],
            edges: vec![[0, 2], [1, 2], [2, 3], [2, 4]],
            class_nodes: vec![3, 4],
        };
        NeurashedGraph::from_document(&doc).unwrap()
    }

    fn tiny_state(g: &NeurashedGraph) -> ModelState {
        let mut s = ModelState::zeros(g);
        s.set_lambda(NodeId(0), 0.5);
        s.set_lambda(NodeId(1), 1.5);
        s.set_lambda(NodeId(2), 2.0);
        s.set_eta(g.eta_index(NodeId(2), NodeId(3)).unwrap(), 1.0);
        s.set_eta(g.eta_index(NodeId(2), NodeId(4)).unwrap(), 0.5);
        s
    }

    #[test]
    fn hand_evaluated_scores_and_logits() {
        let g = tiny();
        let s = tiny_state(&g);
        let x = InputPattern::new([0, 1], 0).unwrap();
        let scores = node_scores(&g, &s, &x).unwrap();
        assert_eq!(scores[2], 4.0);
        assert_eq!(class_logits(&g, &s, &x).unwrap(), vec![4.0, 2.0]);
    }

    #[test]
    fn zero_state_scores_zero() {
        let g = tiny();
        let x = InputPattern::new([0, 1], 0).unwrap();
        let z = ModelState::zeros(&g);
        assert!(node_scores(&g, &z, &x).unwrap().iter().all(|&v| v == 0.0));
        assert_eq!(class_logits(&g, &z, &x).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn non_firing_node_scores_zero() {
        let g = tiny();
        let s = tiny_state(&g);
        let mut firing = FiringState::empty(g.num_nodes());
        firing.insert(NodeId(0));
        firing.insert(NodeId(1));
        let scores = scores_for_firing(&g, &s, &firing);
        assert_eq!(scores[2], 0.0);
        assert!(scores[0] > 0.0);
    }

    #[test]
    fn softmax_examples() {
        let p = predict_proba(&[0.0, 0.0, 0.0]).unwrap();
        assert!(p.iter().all(|&v| (v - 1.0 / 3.0).abs() < 1e-15));
        let p = predict_proba(&[4.0, 2.0]).unwrap();
        assert!((p[0] - 0.880797).abs() < 1e-6 && (p[1] - 0.119203).abs() < 1e-6);
        let p = predict_proba(&[1000.0, 0.0]).unwrap();
        assert!(p[0].is_finite() && (p[0] - 1.0).abs() < 1e-15 && p[1] >= 0.0);
        assert!(matches!(
            predict_proba(&[f64::INFINITY, 0.0]),
            Err(DynamicsError::NonFiniteLogit(_))
        ));
    }
}
