//! Scenario definitions and the studies run on them.
//!
//! A scenario bundles a graph, a dataset, a training config with its rule
//! schedule, named node groups for sparsity, and machine-checkable
//! expectations. Built-ins are available by name; any scenario can be
//! written to and read from a bundle directory.

mod builtin;
mod expect;
mod studies;

pub use builtin::{describe, fig2_three_class, fig3_bottleneck, fig4_batch, BUILTIN_NAMES};
pub use expect::{CheckOutcome, Expectation};
pub use studies::{
    elasticity_for_state, run_batch_comparison, run_convergence, run_elasticity_study, run_info_bottleneck, true_class_probabilities,
    BatchComparison, ConvergenceRun, ElasticityStudy, GroupGap, GroupMedian, MiCurve, MiPoint, PairElasticity,
    SparsityRun,
};

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{
    check_schedule_for, config_to_json, parse_config, DynamicsError, Sampling, TrainConfig, UpdateSchedule,
};
use crate::graph::{parse_dataset, parse_graph_spec, Dataset, DatasetError, GraphError, NeurashedGraph};
use crate::metrics::{MetricsError, NodeGroup};
use crate::report::ReportError;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("UnknownScenario: {0:?} (built-ins: fig2-three-class, fig3-bottleneck, fig4-batch, or custom:<dir>)")]
    UnknownScenario(String),
    #[error("{0}")]
    Graph(#[from] GraphError),
    #[error("{0}")]
    Dataset(#[from] DatasetError),
    #[error("{0}")]
    Dynamics(#[from] DynamicsError),
    #[error("{0}")]
    Metrics(#[from] MetricsError),
    #[error("{0}")]
    Report(#[from] ReportError),
    #[error("InvalidBundle: {path}: {message}")]
    InvalidBundle { path: String, message: String },
    #[error("InvalidStudy: {0}")]
    InvalidStudy(String),
}

/// Mini-batch size for a run: a number of draws with replacement, or the
/// whole dataset every iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BatchSize {
    Size(usize),
    Full,
}

impl BatchSize {
    /// Samples per iteration for a dataset of `n` patterns.
    pub fn effective(self, n: usize) -> usize {
        match self {
            BatchSize::Size(k) => k,
            BatchSize::Full => n,
        }
    }

    /// Applies this batch size to a config.
    pub fn apply(self, config: &mut TrainConfig) {
        match self {
            BatchSize::Size(k) => {
                config.batch_size = k;
                config.sampling = Sampling::WithReplacement;
            }
            BatchSize::Full => config.sampling = Sampling::FullBatch,
        }
    }
}

impl fmt::Display for BatchSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BatchSize::Size(k) => write!(f, "{k}"),
            BatchSize::Full => f.write_str("full"),
        }
    }
}

impl FromStr for BatchSize {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("full") {
            return Ok(BatchSize::Full);
        }
        match s.parse::<usize>() {
            Ok(k) if k > 0 => Ok(BatchSize::Size(k)),
            _ => Err(format!("batch size must be a positive integer or \"full\", got {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub graph: NeurashedGraph,
    pub dataset: Dataset,
    pub config: TrainConfig,
    pub schedule: UpdateSchedule,
    pub node_groups: Vec<NodeGroup>,
    pub expectations: Vec<Expectation>,
}

/// Contents of `expectations.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectationsDocument {
    #[serde(default)]
    pub node_groups: Vec<NodeGroup>,
    #[serde(default)]
    pub assertions: Vec<Expectation>,
}

pub const BUNDLE_FILES: [&str; 4] = ["graph.json", "dataset.json", "config.json", "expectations.json"];

/// Looks up a built-in scenario, or loads `custom:<dir>`.
pub fn build_scenario(name: &str) -> Result<Scenario, ExperimentError> {
    if let Some(dir) = name.strip_prefix("custom:") {
        return Scenario::load_dir(Path::new(dir));
    }
    builtin::builtin(name).ok_or_else(|| ExperimentError::UnknownScenario(name.to_string()))
}

impl Scenario {
    /// Assembles a scenario from separately loaded parts, checking that they
    /// fit together.
    pub fn from_parts(
        name: impl Into<String>,
        graph: NeurashedGraph,
        dataset: Dataset,
        config: TrainConfig,
        schedule: UpdateSchedule,
        node_groups: Vec<NodeGroup>,
        expectations: Vec<Expectation>,
    ) -> Result<Self, ExperimentError> {
        let s = Scenario {
            name: name.into(),
            graph,
            dataset,
            config,
            schedule,
            node_groups,
            expectations,
        };
        s.check()?;
        Ok(s)
    }

    /// Checks the dataset, config and node groups against the graph.
    pub fn check(&self) -> Result<(), ExperimentError> {
        self.dataset.validate_for(&self.graph)?;
        self.config.check_with(&self.schedule)?;
        check_schedule_for(&self.schedule, &self.graph)?;
        for g in &self.node_groups {
            if g.nodes.is_empty() {
                return Err(MetricsError::EmptyGroup(g.name.clone()).into());
            }
            if let Some(&bad) = g.nodes.iter().find(|&&id| !self.graph.contains(id) || self.graph.is_top(id)) {
                return Err(MetricsError::UnknownNode(bad).into());
            }
        }
        Ok(())
    }

    /// One group per non-top level; used when no groups are declared.
    pub fn level_groups(graph: &NeurashedGraph) -> Vec<NodeGroup> {
        (1..graph.num_levels())
            .map(|l| NodeGroup {
                name: format!("level{l}"),
                nodes: graph.nodes_at(l).to_vec(),
            })
            .collect()
    }

    pub fn group(&self, name: &str) -> Option<&NodeGroup> {
        self.node_groups.iter().find(|g| g.name == name)
    }

    pub fn expectations_document(&self) -> ExpectationsDocument {
        ExpectationsDocument {
            node_groups: self.node_groups.clone(),
            assertions: self.expectations.clone(),
        }
    }

    /// The four bundle files as `(file name, contents)`.
    pub fn bundle_files(&self) -> Vec<(&'static str, String)> {
        let expectations =
            serde_json::to_string_pretty(&self.expectations_document()).expect("expectations serialize");
        vec![
            ("graph.json", self.graph.to_json()),
            ("dataset.json", self.dataset.to_json()),
            ("config.json", config_to_json(&self.config, &self.schedule)),
            ("expectations.json", expectations),
        ]
        .into_iter()
        .map(|(n, t)| (n, t + "\n"))
        .collect()
    }

    pub fn write_dir(&self, dir: &Path) -> Result<(), ExperimentError> {
        std::fs::create_dir_all(dir).map_err(|e| ReportError::io(dir, e))?;
        for (name, text) in self.bundle_files() {
            let path = dir.join(name);
            std::fs::write(&path, text).map_err(|e| ReportError::io(&path, e))?;
        }
        Ok(())
    }

    /// Reads a bundle directory. `expectations.json` is optional; without
    /// it the node groups default to one group per level.
    pub fn load_dir(dir: &Path) -> Result<Self, ExperimentError> {
        let read = |name: &str| {
            let path = dir.join(name);
            std::fs::read_to_string(&path).map_err(|e| ExperimentError::from(ReportError::io(&path, e)))
        };
        let graph = parse_graph_spec(&read("graph.json")?)?;
        let dataset = parse_dataset(&read("dataset.json")?)?;
        let (config, schedule) = parse_config(&read("config.json")?)?;
        let expectations = if dir.join("expectations.json").exists() {
            serde_json::from_str::<ExpectationsDocument>(&read("expectations.json")?).map_err(|e| {
                ExperimentError::InvalidBundle {
                    path: dir.join("expectations.json").display().to_string(),
                    message: e.to_string(),
                }
            })?
        } else {
            ExpectationsDocument {
                node_groups: Vec::new(),
                assertions: Vec::new(),
            }
        };
        let node_groups = if expectations.node_groups.is_empty() {
            Scenario::level_groups(&graph)
        } else {
            expectations.node_groups
        };
        let name = dir
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "custom".into());
        Scenario::from_parts(name, graph, dataset, config, schedule, node_groups, expectations.assertions)
    }

    /// Runs every declared expectation.
    pub fn check_expectations(&self) -> Result<Vec<CheckOutcome>, ExperimentError> {
        self.expectations.iter().map(|e| e.check(self)).collect()
    }
}
