use crate::dynamics::{class_logits, train_step, ModelState, UpdateSchedule};
use crate::graph::{Dataset, InputPattern, NeurashedGraph};

use super::MetricsError;

fn logit_shift(
    graph: &NeurashedGraph,
    before: &ModelState,
    after: &ModelState,
    input: &InputPattern,
) -> Result<f64, MetricsError> {
    let z0 = class_logits(graph, before, input)?;
    let z1 = class_logits(graph, after, input)?;
    Ok(z0.iter().zip(&z1).map(|(a, b)| (b - a).powi(2)).sum::<f64>().sqrt())
}

/// How far one training step at `base` moves the logits of `test`, relative
/// to how far it moves the logits of `base` itself.
///
/// The step is applied to a copy; `state` is left untouched.
pub fn local_elasticity(
    graph: &NeurashedGraph,
    state: &ModelState,
    base: &InputPattern,
    test: &InputPattern,
    schedule: &UpdateSchedule,
    iteration: u64,
) -> Result<f64, MetricsError> {
    let updated = train_step(graph, state, &[base], schedule, iteration)?;
    let den = logit_shift(graph, state, &updated, base)?;
    let num = logit_shift(graph, state, &updated, test)?;
    if den == 0.0 {
        return Err(MetricsError::ZeroDenominator);
    }
    Ok(num / den)
}

/// Elasticity of one base pattern against every pattern of a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct ElasticityReport {
    pub base: usize,
    pub entries: Vec<(usize, Result<f64, MetricsError>)>,
}

pub fn elasticity_report(
    graph: &NeurashedGraph,
    state: &ModelState,
    dataset: &Dataset,
    base: usize,
    schedule: &UpdateSchedule,
    iteration: u64,
) -> Result<ElasticityReport, MetricsError> {
    let updated = train_step(graph, state, &[&dataset.patterns[base]], schedule, iteration)?;
    let den = logit_shift(graph, state, &updated, &dataset.patterns[base])?;
    let entries = dataset
        .patterns
        .iter()
        .enumerate()
        .map(|(i, test)| {
            let value = if den == 0.0 {
                Err(MetricsError::ZeroDenominator)
            } else {
                logit_shift(graph, state, &updated, test).map(|num| num / den)
            };
            (i, value)
        })
        .collect();
    Ok(ElasticityReport { base, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::UpdateRule;
    use crate::graph::{GraphDocument, NodeDocument};

    /// Two disjoint three-level pathways: 0 -> 2 -> class 4, 1 -> 3 -> class 5.
    fn split() -> NeurashedGraph {
        let n = |id, level, threshold| NodeDocument { id, level, threshold };
        let doc = GraphDocument {
            levels: 3,
            nodes: vec![n(0, 1, None), n(1, 1, None), n(2, 2, Some(1)), n(3, 2, Some(1)), n(4, 3, None), n(5, 3, None)],
            edges: vec![[0, 2], [1, 3], [2, 4], [3, 5]],
            class_nodes: vec![4, 5],
        };
        NeurashedGraph::from_document(&doc).unwrap()
    }

    #[test]
    fn self_elasticity_is_one() {
        let g = split();
        let s = ModelState::filled(&g, 0.5);
        let sched = UpdateSchedule::uniform(UpdateRule::multiply(1.1), UpdateRule::multiply(0.9));
        let x = InputPattern::new([0], 0).unwrap();
        assert_eq!(local_elasticity(&g, &s, &x, &x, &sched, 0).unwrap(), 1.0);
    }

    #[test]
    fn disjoint_pathways_with_identity_decay() {
        let g = split();
        let s = ModelState::filled(&g, 0.5);
        let sched = UpdateSchedule::uniform(UpdateRule::multiply(1.1), UpdateRule::identity());
        let a = InputPattern::new([0], 0).unwrap();
        let b = InputPattern::new([1], 1).unwrap();
        assert_eq!(local_elasticity(&g, &s, &a, &b, &sched, 0).unwrap(), 0.0);
    }

    #[test]
    fn zero_state_has_zero_denominator() {
        let g = split();
        let s = ModelState::zeros(&g);
        let sched = UpdateSchedule::uniform(UpdateRule::multiply(1.1), UpdateRule::multiply(0.9));
        let a = InputPattern::new([0], 0).unwrap();
        assert_eq!(
            local_elasticity(&g, &s, &a, &a, &sched, 0),
            Err(MetricsError::ZeroDenominator)
        );
    }

    #[test]
    fn state_is_not_mutated() {
        let g = split();
        let s = ModelState::filled(&g, 0.5);
        let copy = s.clone();
        let sched = UpdateSchedule::uniform(UpdateRule::multiply(1.1), UpdateRule::multiply(0.9));
        let a = InputPattern::new([0], 0).unwrap();
        let b = InputPattern::new([1], 1).unwrap();
        let le = local_elasticity(&g, &s, &a, &b, &sched, 0).unwrap();
        assert_eq!(s, copy);
        // test logits shrink by 0.9³, base logits grow by 1.1³
        let expected = (0.125 * (1.0 - 0.9f64.powi(3))) / (0.125 * (1.1f64.powi(3) - 1.0));
        assert!((le - expected).abs() < 1e-12);
    }
}
