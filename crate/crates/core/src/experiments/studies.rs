use crate::dynamics::{class_logits, predict_proba, run_training, ModelState, Trajectory};
use crate::graph::{Dataset, NeurashedGraph};
use crate::metrics::{
    elasticity_report, estimate_mutual_information, level_activations, sparsity_profile, MetricsError, MiEstimate,
};
use crate::report::{Cell, PlotStyle, Series, Table};

use super::{BatchSize, ExperimentError, Scenario};

fn train(scenario: &Scenario, seed: u64, f: impl FnOnce(&mut crate::dynamics::TrainConfig)) -> Result<Trajectory, ExperimentError> {
    let mut config = scenario.config.clone();
    config.seed = seed;
    f(&mut config);
    Ok(run_training(&scenario.graph, &scenario.dataset, &config, &scenario.schedule)?)
}

/// Predicted probability of the true class for every pattern.
pub fn true_class_probabilities(
    graph: &NeurashedGraph,
    state: &ModelState,
    dataset: &Dataset,
) -> Result<Vec<f64>, ExperimentError> {
    dataset
        .patterns
        .iter()
        .map(|p| {
            let z = class_logits(graph, state, p).map_err(MetricsError::from)?;
            Ok(predict_proba(&z)?[p.label])
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRun {
    pub seed: u64,
    pub probabilities: Vec<f64>,
}

impl ConvergenceRun {
    pub fn min_probability(&self) -> f64 {
        self.probabilities.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Trains once per seed with the scenario config and reports the final
/// true-class probabilities.
pub fn run_convergence(scenario: &Scenario, seeds: &[u64]) -> Result<Vec<ConvergenceRun>, ExperimentError> {
    seeds
        .iter()
        .map(|&seed| {
            let t = train(scenario, seed, |_| {})?;
            Ok(ConvergenceRun {
                seed,
                probabilities: true_class_probabilities(&scenario.graph, t.final_state(), &scenario.dataset)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MiPoint {
    pub iteration: u64,
    pub level: usize,
    pub estimate: MiEstimate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MiCurve {
    pub points: Vec<MiPoint>,
}

impl MiCurve {
    /// Points of one level in iteration order.
    pub fn level(&self, level: usize) -> impl Iterator<Item = &MiPoint> + '_ {
        self.points.iter().filter(move |p| p.level == level)
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(["iteration", "level", "mi_input_bits", "mi_label_bits"]);
        for p in &self.points {
            t.push(vec![
                Cell::Int(p.iteration as i64),
                Cell::Int(p.level as i64),
                Cell::Float(p.estimate.mi_input),
                Cell::Float(p.estimate.mi_label),
            ]);
        }
        t
    }

    pub fn series(&self) -> Vec<Series> {
        let mut levels: Vec<usize> = self.points.iter().map(|p| p.level).collect();
        levels.sort_unstable();
        levels.dedup();
        let mut out = Vec::new();
        for l in levels {
            let pts = |f: fn(&MiEstimate) -> f64| self.level(l).map(|p| (p.iteration as f64, f(&p.estimate))).collect();
            out.push(Series::new(format!("level {l}: I(X;T)"), pts(|e| e.mi_input)));
            out.push(Series::new(format!("level {l}: I(T;Y)"), pts(|e| e.mi_label)));
        }
        out
    }

    pub fn plot_style() -> PlotStyle {
        PlotStyle::line("Mutual information during training", "iteration", "bits")
    }
}

/// Trains the scenario with `seed` and estimates MI for every level below
/// the top at iteration 0 and every `eval_every` iterations (plus the last).
///
/// Every estimate uses the same Monte Carlo `seed`, so differences between
/// points reflect the state rather than sampling noise.
pub fn run_info_bottleneck(
    scenario: &Scenario,
    eval_every: u64,
    sigma: f64,
    mc_samples: usize,
    seed: u64,
) -> Result<MiCurve, ExperimentError> {
    if scenario.graph.num_classes() < 2 {
        return Err(ExperimentError::InvalidStudy("information bottleneck needs at least 2 classes".into()));
    }
    let t = train(scenario, seed, |c| c.snapshot_every = eval_every)?;
    let g = &scenario.graph;
    let patterns = &scenario.dataset.patterns;
    let weights: Vec<f64> = patterns.iter().map(|p| p.weight).collect();
    let labels: Vec<usize> = patterns.iter().map(|p| p.label).collect();
    let mut points = Vec::new();
    for snap in &t.snapshots {
        for level in 1..g.num_levels() {
            let acts = patterns
                .iter()
                .map(|p| level_activations(g, &snap.state, p, level))
                .collect::<Result<Vec<_>, _>>()?;
            let estimate = estimate_mutual_information(&acts, &weights, &labels, sigma, mc_samples, seed)?;
            points.push(MiPoint {
                iteration: snap.iteration,
                level,
                estimate,
            });
        }
    }
    Ok(MiCurve { points })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparsityRun {
    pub batch: BatchSize,
    pub seed: u64,
    /// Normalized entropy per declared group.
    pub entropies: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupGap {
    pub group: String,
    pub mean_small: f64,
    pub mean_large: f64,
    /// `mean_large − mean_small`; positive when small batches are sparser.
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchComparison {
    pub small: BatchSize,
    pub large: BatchSize,
    /// Small-batch runs in seed order, then large-batch runs.
    pub runs: Vec<SparsityRun>,
    pub gaps: Vec<GroupGap>,
}

impl BatchComparison {
    pub fn run(&self, batch: BatchSize, seed: u64) -> Option<&SparsityRun> {
        self.runs.iter().find(|r| r.batch == batch && r.seed == seed)
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(["batch", "seed", "group", "entropy"]);
        for r in &self.runs {
            for (g, h) in &r.entropies {
                t.push(vec![Cell::text(&r.batch.to_string()), Cell::Int(r.seed as i64), Cell::text(g), Cell::Float(*h)]);
            }
        }
        t
    }

    pub fn gap_table(&self) -> Table {
        let mut t = Table::new(["group", "mean_small", "mean_large", "gap"]);
        for g in &self.gaps {
            t.push(vec![Cell::text(&g.group), Cell::Float(g.mean_small), Cell::Float(g.mean_large), Cell::Float(g.gap)]);
        }
        t
    }

    /// Bars of mean entropy per group, one series per batch size.
    pub fn plot(&self) -> (Vec<Series>, PlotStyle) {
        let cats: Vec<String> = self.gaps.iter().map(|g| g.group.clone()).collect();
        let bars = |f: fn(&GroupGap) -> f64| self.gaps.iter().enumerate().map(|(i, g)| (i as f64, f(g))).collect();
        let series = vec![
            Series::new(format!("batch {}", self.small), bars(|g| g.mean_small)),
            Series::new(format!("batch {}", self.large), bars(|g| g.mean_large)),
        ];
        (series, PlotStyle::grouped_bars("Amplification entropy by group", "group", "normalized entropy", cats))
    }
}

/// One training run per `(batch size, seed)`, then the sparsity profile of
/// each final state over the scenario's node groups.
pub fn run_batch_comparison(
    scenario: &Scenario,
    small: BatchSize,
    large: BatchSize,
    seeds: &[u64],
) -> Result<BatchComparison, ExperimentError> {
    let n = scenario.dataset.len();
    if seeds.is_empty() {
        return Err(ExperimentError::InvalidStudy("at least one seed is required".into()));
    }
    for b in [small, large] {
        if b.effective(n) == 0 || b.effective(n) > n {
            return Err(ExperimentError::InvalidStudy(format!("batch size {b} is outside 1..={n}")));
        }
    }
    if small.effective(n) > large.effective(n) {
        return Err(ExperimentError::InvalidStudy(format!("small batch {small} exceeds large batch {large}")));
    }
    let mut runs = Vec::new();
    for batch in [small, large] {
        for &seed in seeds {
            let t = train(scenario, seed, |c| batch.apply(c))?;
            runs.push(SparsityRun {
                batch,
                seed,
                entropies: sparsity_profile(t.final_state(), &scenario.node_groups)?,
            });
        }
    }
    let k = seeds.len();
    let gaps = scenario
        .node_groups
        .iter()
        .enumerate()
        .map(|(gi, g)| {
            let mean = |rs: &[SparsityRun]| rs.iter().map(|r| r.entropies[gi].1).sum::<f64>() / k as f64;
            let mean_small = mean(&runs[..k]);
            let mean_large = mean(&runs[k..]);
            GroupGap {
                group: g.name.clone(),
                mean_small,
                mean_large,
                gap: mean_large - mean_small,
            }
        })
        .collect();
    Ok(BatchComparison {
        small,
        large,
        runs,
        gaps,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairElasticity {
    pub base: usize,
    pub test: usize,
    pub value: Result<f64, MetricsError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupMedian {
    pub base_group: String,
    pub test_group: String,
    /// `None` when no pair in the cell has a defined value.
    pub median: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElasticityStudy {
    pub seed: u64,
    pub iterations: u64,
    pub groups: Vec<String>,
    pub pairs: Vec<PairElasticity>,
    pub medians: Vec<GroupMedian>,
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { (v[m - 1] + v[m]) / 2.0 })
}

impl ElasticityStudy {
    pub fn median(&self, base_group: &str, test_group: &str) -> Option<f64> {
        self.medians
            .iter()
            .find(|m| m.base_group == base_group && m.test_group == test_group)
            .and_then(|m| m.median)
    }

    /// Errors are written by kind name (e.g. `ZeroDenominator`).
    pub fn table(&self) -> Table {
        let mut t = Table::new(["base_id", "test_id", "le_value"]);
        for p in &self.pairs {
            let v = match &p.value {
                Ok(v) => Cell::Float(*v),
                Err(MetricsError::ZeroDenominator) => Cell::text("ZeroDenominator"),
                Err(e) => Cell::text(&e.to_string()),
            };
            t.push(vec![Cell::Int(p.base as i64), Cell::Int(p.test as i64), v]);
        }
        t
    }

    pub fn median_table(&self) -> Table {
        let mut t = Table::new(["base_group", "test_group", "median_le"]);
        for m in &self.medians {
            let v = m.median.map(Cell::Float).unwrap_or_else(|| Cell::text(""));
            t.push(vec![Cell::text(&m.base_group), Cell::text(&m.test_group), v]);
        }
        t
    }

    /// One bar group per test group, one series per base group.
    pub fn plot(&self) -> (Vec<Series>, PlotStyle) {
        let series = self
            .groups
            .iter()
            .map(|b| {
                let pts = self
                    .groups
                    .iter()
                    .enumerate()
                    .map(|(i, t)| (i as f64, self.median(b, t).unwrap_or(0.0)))
                    .collect();
                Series::new(format!("base {b}"), pts)
            })
            .collect();
        let style = PlotStyle::grouped_bars("Median local elasticity", "test group", "LE", self.groups.clone());
        (series, style)
    }
}

/// Trains for `iterations` with `seed`, then measures LE for every ordered
/// pattern pair at the final state, using the rules of the next iteration.
pub fn run_elasticity_study(scenario: &Scenario, iterations: u64, seed: u64) -> Result<ElasticityStudy, ExperimentError> {
    let groups = scenario.dataset.group_names();
    if groups.len() < 3 {
        return Err(ExperimentError::InvalidStudy(format!(
            "elasticity study needs at least 3 pattern groups, found {}",
            groups.len()
        )));
    }
    let t = train(scenario, seed, |c| c.iterations = iterations)?;
    let mut study = elasticity_for_state(scenario, t.final_state(), iterations)?;
    study.seed = seed;
    Ok(study)
}

/// LE for every ordered pattern pair at a given state; `iteration` selects
/// the rules of the measuring step. The returned seed is 0.
pub fn elasticity_for_state(
    scenario: &Scenario,
    state: &ModelState,
    iterations: u64,
) -> Result<ElasticityStudy, ExperimentError> {
    let groups = scenario.dataset.group_names();
    let patterns = &scenario.dataset.patterns;
    let mut pairs = Vec::new();
    for base in 0..patterns.len() {
        let r = elasticity_report(&scenario.graph, state, &scenario.dataset, base, &scenario.schedule, iterations)?;
        pairs.extend(r.entries.into_iter().map(|(test, value)| PairElasticity { base, test, value }));
    }
    let mut medians = Vec::new();
    for b in &groups {
        for tg in &groups {
            let values = pairs
                .iter()
                .filter(|p| &patterns[p.base].group_name() == b && &patterns[p.test].group_name() == tg)
                .filter_map(|p| p.value.as_ref().ok().copied())
                .collect();
            medians.push(GroupMedian {
                base_group: b.clone(),
                test_group: tg.clone(),
                median: median(values),
            });
        }
    }
    Ok(ElasticityStudy {
        seed: 0,
        iterations,
        groups,
        pairs,
        medians,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{fig2_three_class, fig3_bottleneck, fig4_batch};

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(vec![4.0, 1.0]), Some(2.5));
        assert_eq!(median(vec![]), None);
    }

    #[test]
    fn zero_iteration_curve_has_one_eval_point() {
        let mut s = fig3_bottleneck();
        s.config.iterations = 0;
        let c = run_info_bottleneck(&s, 50, 0.05, 500, 1).unwrap();
        assert_eq!(c.level(2).count(), 1);
        assert_eq!(c.table().len(), 2);
    }

    #[test]
    fn equal_batches_have_zero_gap() {
        let mut s = fig4_batch();
        s.config.iterations = 50;
        let c = run_batch_comparison(&s, BatchSize::Size(1), BatchSize::Size(1), &[4, 5]).unwrap();
        assert!(c.gaps.iter().all(|g| g.gap == 0.0));
        assert!(run_batch_comparison(&s, BatchSize::Full, BatchSize::Size(1), &[1]).is_err());
        assert!(run_batch_comparison(&s, BatchSize::Size(1), BatchSize::Size(3), &[1]).is_err());
    }

    #[test]
    fn zero_state_elasticity_is_reported_per_pair() {
        let s = fig2_three_class();
        let study = elasticity_for_state(&s, &ModelState::zeros(&s.graph), 0).unwrap();
        assert_eq!(study.pairs.len(), 16);
        assert!(study.pairs.iter().all(|p| p.value == Err(MetricsError::ZeroDenominator)));
        assert!(study.medians.iter().all(|m| m.median.is_none()));
        let csv = crate::report::csv_string(&study.table());
        assert!(csv.lines().nth(1).unwrap().ends_with(",ZeroDenominator"));
    }
}
