use serde::{Deserialize, Serialize};

use super::studies::{run_batch_comparison, run_convergence, run_elasticity_study, run_info_bottleneck};
use super::{BatchSize, ExperimentError, Scenario};

/// A machine-checkable claim about a scenario's outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Expectation {
    /// Every pattern's true-class probability reaches the bound, per seed.
    Convergence { seeds: Vec<u64>, min_true_class_probability: f64 },
    /// `level` MI with the input peaks at or above `min_peak_mi_input`, and
    /// both MI curves end within tolerance of the given values.
    InformationBottleneck {
        level: usize,
        seed: u64,
        eval_every: u64,
        sigma: f64,
        mc_samples: usize,
        min_peak_mi_input: f64,
        final_mi_input: f64,
        final_mi_input_tolerance: f64,
        final_mi_label: f64,
        final_mi_label_tolerance: f64,
    },
    /// Median LE from `base_group` is strictly decreasing along
    /// `test_groups`, for every seed, and LE(x, x) = 1 for every pattern.
    ElasticityOrder {
        seeds: Vec<u64>,
        base_group: String,
        test_groups: Vec<String>,
    },
    /// Each listed group has strictly lower entropy under `small_batch`
    /// than under `large_batch`, for every seed.
    SparserWithSmallBatch {
        seeds: Vec<u64>,
        small_batch: BatchSize,
        large_batch: BatchSize,
        groups: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Expectation {
    pub fn name(&self) -> &'static str {
        match self {
            Expectation::Convergence { .. } => "convergence",
            Expectation::InformationBottleneck { .. } => "information_bottleneck",
            Expectation::ElasticityOrder { .. } => "elasticity_order",
            Expectation::SparserWithSmallBatch { .. } => "sparser_with_small_batch",
        }
    }

    pub fn check(&self, scenario: &Scenario) -> Result<CheckOutcome, ExperimentError> {
        let (passed, detail) = match self {
            Expectation::Convergence {
                seeds,
                min_true_class_probability,
            } => {
                let runs = run_convergence(scenario, seeds)?;
                let mins: Vec<String> = runs.iter().map(|r| format!("seed {}: {:.6}", r.seed, r.min_probability())).collect();
                (
                    runs.iter().all(|r| r.min_probability() >= *min_true_class_probability),
                    format!("min p_label {} (need >= {min_true_class_probability})", mins.join(", ")),
                )
            }
            Expectation::InformationBottleneck {
                level,
                seed,
                eval_every,
                sigma,
                mc_samples,
                min_peak_mi_input,
                final_mi_input,
                final_mi_input_tolerance,
                final_mi_label,
                final_mi_label_tolerance,
            } => {
                let curve = run_info_bottleneck(scenario, *eval_every, *sigma, *mc_samples, *seed)?;
                let points: Vec<_> = curve.level(*level).collect();
                let peak = points.iter().map(|p| p.estimate.mi_input).fold(f64::NEG_INFINITY, f64::max);
                let last = points.last().ok_or_else(|| ExperimentError::InvalidStudy(format!("no MI points for level {level}")))?;
                let (xi, yi) = (last.estimate.mi_input, last.estimate.mi_label);
                (
                    peak >= *min_peak_mi_input
                        && (xi - final_mi_input).abs() <= *final_mi_input_tolerance
                        && (yi - final_mi_label).abs() <= *final_mi_label_tolerance,
                    format!("level {level}: peak I(X;T) {peak:.4}, final I(X;T) {xi:.4}, final I(T;Y) {yi:.4}"),
                )
            }
            Expectation::ElasticityOrder {
                seeds,
                base_group,
                test_groups,
            } => {
                let mut ok = true;
                let mut parts = Vec::new();
                for &seed in seeds {
                    let study = run_elasticity_study(scenario, scenario.config.iterations, seed)?;
                    let medians: Vec<Option<f64>> = test_groups.iter().map(|t| study.median(base_group, t)).collect();
                    let ordered = medians.windows(2).all(|w| matches!((w[0], w[1]), (Some(a), Some(b)) if a > b));
                    let unit = study.pairs.iter().filter(|p| p.base == p.test).all(|p| p.value == Ok(1.0));
                    ok &= ordered && unit;
                    let shown: Vec<String> = medians.iter().map(|m| m.map_or("-".into(), |v| format!("{v:.4}"))).collect();
                    parts.push(format!("seed {seed}: [{}]{}", shown.join(" > "), if unit { "" } else { " LE(x,x) != 1" }));
                }
                (ok, parts.join("; "))
            }
            Expectation::SparserWithSmallBatch {
                seeds,
                small_batch,
                large_batch,
                groups,
            } => {
                let cmp = run_batch_comparison(scenario, *small_batch, *large_batch, seeds)?;
                let mut ok = true;
                let mut parts = Vec::new();
                for &seed in seeds {
                    for g in groups {
                        let h = |b| {
                            cmp.run(b, seed)
                                .and_then(|r| r.entropies.iter().find(|(n, _)| n == g))
                                .map(|(_, h)| *h)
                                .ok_or_else(|| ExperimentError::InvalidStudy(format!("unknown node group {g:?}")))
                        };
                        let (s, l) = (h(*small_batch)?, h(*large_batch)?);
                        ok &= s < l;
                        parts.push(format!("seed {seed} {g}: {s:.4} vs {l:.4}"));
                    }
                }
                (ok, parts.join("; "))
            }
        };
        Ok(CheckOutcome {
            name: self.name(),
            passed,
            detail,
        })
    }
}
