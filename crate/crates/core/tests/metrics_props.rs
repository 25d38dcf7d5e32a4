use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use neurashed::dynamics::ModelState;
use neurashed::experiments::fig3_bottleneck;
use neurashed::graph::NodeId;
use neurashed::metrics::{estimate_mutual_information, level_activations, sparsity_profile, MetricsError, NodeGroup};

fn random_means(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..d).map(|_| rng.random_range(0.0..1.0)).collect()).collect()
}

#[test]
fn mi_is_invariant_to_coordinate_permutation_and_pattern_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let acts = random_means(&mut rng, 6, 4);
    let w = [1.0, 2.0, 1.0, 1.0, 3.0, 1.0];
    let labels = [0, 0, 1, 1, 2, 2];
    let base = estimate_mutual_information(&acts, &w, &labels, 0.1, 20_000, 3).unwrap();

    let perm = [2, 0, 3, 1];
    let permuted: Vec<Vec<f64>> = acts.iter().map(|a| perm.iter().map(|&j| a[j]).collect()).collect();
    let p = estimate_mutual_information(&permuted, &w, &labels, 0.1, 20_000, 3).unwrap();
    // the noise draws are reassigned to other coordinates, so compare within
    // the Monte Carlo error
    let tol = 4.0 * (base.mi_input_se + p.mi_input_se) + 1e-9;
    assert!((p.mi_input - base.mi_input).abs() < tol, "{} vs {}", p.mi_input, base.mi_input);

    // renaming the classes changes nothing at all
    let renamed = [5, 5, 0, 0, 9, 9];
    let r = estimate_mutual_information(&acts, &w, &renamed, 0.1, 20_000, 3).unwrap();
    assert_eq!(r.mi_input, base.mi_input);
    assert!((r.mi_label - base.mi_label).abs() < 1e-12);

    let mut order: Vec<usize> = (0..6).collect();
    order.shuffle(&mut rng);
    let acts2: Vec<Vec<f64>> = order.iter().map(|&i| acts[i].clone()).collect();
    let w2: Vec<f64> = order.iter().map(|&i| w[i]).collect();
    let l2: Vec<usize> = order.iter().map(|&i| labels[i]).collect();
    let o = estimate_mutual_information(&acts2, &w2, &l2, 0.1, 20_000, 3).unwrap();
    let tol = 4.0 * (base.mi_label_se + o.mi_label_se) + 1e-9;
    assert!((o.mi_label - base.mi_label).abs() < tol);
}

#[test]
fn doubling_the_budget_stays_within_three_standard_errors() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for case in 0..5 {
        let acts = random_means(&mut rng, 8, 3);
        let labels = [0, 1, 0, 1, 0, 1, 0, 1];
        let a = estimate_mutual_information(&acts, &[1.0; 8], &labels, 0.2, 5_000, case).unwrap();
        let b = estimate_mutual_information(&acts, &[1.0; 8], &labels, 0.2, 10_000, case + 100).unwrap();
        let se = (a.mi_input_se.powi(2) + b.mi_input_se.powi(2)).sqrt();
        assert!((a.mi_input - b.mi_input).abs() < 3.0 * se.max(1e-3), "case {case}");
    }
}

#[test]
fn merging_means_within_a_label_does_not_add_information() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for seed in 0..10 {
        let mut acts = random_means(&mut rng, 4, 3);
        let labels = [0, 0, 1, 1];
        let apart = estimate_mutual_information(&acts, &[1.0; 4], &labels, 0.1, 10_000, seed).unwrap();
        acts[1] = acts[0].clone();
        let merged = estimate_mutual_information(&acts, &[1.0; 4], &labels, 0.1, 10_000, seed).unwrap();
        let tol = 3.0 * (apart.mi_input_se + merged.mi_input_se);
        assert!(merged.mi_input <= apart.mi_input + tol, "seed {seed}");
    }
}

#[test]
fn bottleneck_level_two_activations() {
    let s = fig3_bottleneck();
    let state = ModelState::filled(&s.graph, 0.5);
    let v = level_activations(&s.graph, &state, &s.dataset.patterns[0], 2).unwrap();
    let nonzero: Vec<usize> = v.iter().enumerate().filter(|(_, &x)| x > 0.0).map(|(i, _)| i).collect();
    assert_eq!(nonzero, vec![0, 1]);
    assert_eq!(level_activations(&s.graph, &ModelState::zeros(&s.graph), &s.dataset.patterns[0], 2).unwrap(), vec![0.0; 6]);
    assert!(matches!(
        level_activations(&s.graph, &state, &s.dataset.patterns[0], 3),
        Err(MetricsError::LevelOutOfRange { level: 3, max: 2 })
    ));
}

#[test]
fn sparsity_profile_is_scale_invariant_per_group() {
    let s = fig3_bottleneck();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut state = ModelState::zeros(&s.graph);
    for id in 0..19 {
        state.set_lambda(NodeId(id), rng.random_range(0.0..2.0));
    }
    let groups = vec![NodeGroup::new("a", 0..13), NodeGroup::new("b", 13..19)];
    let before = sparsity_profile(&state, &groups).unwrap();
    for id in 13..19 {
        state.set_lambda(NodeId(id), state.lambda(NodeId(id)) * 37.5);
    }
    let after = sparsity_profile(&state, &groups).unwrap();
    assert_eq!(before[0], after[0]);
    assert!((before[1].1 - after[1].1).abs() < 1e-12);
    assert_eq!(
        sparsity_profile(&state, &[NodeGroup::new("empty", [])]),
        Err(MetricsError::EmptyGroup("empty".into()))
    );
}
