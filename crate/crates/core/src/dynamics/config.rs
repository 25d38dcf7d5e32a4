use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::graph::{NeurashedGraph, NodeId};

use super::rules::{RuleOverride, RuleTable, SchedulePhase, UpdateRule, UpdateSchedule};
use super::DynamicsError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Init {
    Zeros,
    Constant { value: f64 },
    /// Independent draws on the open interval `(lo, hi)`.
    Uniform { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    /// `batch_size` draws with replacement, weighted by pattern weight.
    #[default]
    WithReplacement,
    /// Every pattern in every iteration; `batch_size` is ignored.
    FullBatch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub iterations: u64,
    pub seed: u64,
    pub init: Init,
    pub snapshot_every: u64,
    pub sampling: Sampling,
}

impl TrainConfig {
    pub fn check(&self) -> Result<(), DynamicsError> {
        let fail = |m: String| Err(DynamicsError::InvalidConfig(m));
        if self.batch_size == 0 {
            return fail("batch_size must be positive".into());
        }
        if self.snapshot_every == 0 {
            return fail("snapshot_every must be positive".into());
        }
        match self.init {
            Init::Zeros => {}
            Init::Constant { value } if !(value >= 0.0 && value.is_finite()) => {
                return fail(format!("constant init {value} must be a finite value >= 0"));
            }
            Init::Uniform { lo, hi } if !(lo >= 0.0 && lo < hi && hi.is_finite()) => {
                return fail(format!("uniform init needs 0 <= lo < hi, got ({lo}, {hi})"));
            }
            _ => {}
        }
        Ok(())
    }

    /// Whether every initial value is strictly positive.
    pub fn init_is_positive(&self) -> bool {
        match self.init {
            Init::Zeros => false,
            Init::Constant { value } => value > 0.0,
            Init::Uniform { .. } => true,
        }
    }

    /// Full validation of a config and schedule pair.
    ///
    /// A multiplicative growth rule fixes zero in place, so it is only
    /// accepted together with a strictly positive initialisation.
    pub fn check_with(&self, schedule: &UpdateSchedule) -> Result<(), DynamicsError> {
        self.check()?;
        schedule.check()?;
        if schedule.uses_multiplicative_growth() && !self.init_is_positive() {
            return Err(DynamicsError::InvalidConfig(
                "multiplicative growth rules need a strictly positive init".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    pub batch_size: usize,
    pub iterations: u64,
    pub seed: u64,
    pub init: Init,
    pub snapshot_every: u64,
    #[serde(default)]
    pub sampling: Sampling,
    pub rules: RulesDocument,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RulesDocument {
    pub default_up: UpdateRule,
    pub default_down: UpdateRule,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub node_overrides: BTreeMap<String, RuleOverride>,
    /// Keys are `"lower->upper"`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub edge_overrides: BTreeMap<String, RuleOverride>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub phases: Vec<PhaseDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseDocument {
    pub start: u64,
    pub end: u64,
    pub default_up: UpdateRule,
    pub default_down: UpdateRule,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub node_overrides: BTreeMap<String, RuleOverride>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub edge_overrides: BTreeMap<String, RuleOverride>,
}

fn parse_node_key(k: &str) -> Result<NodeId, DynamicsError> {
    k.trim()
        .parse()
        .map(NodeId)
        .map_err(|_| DynamicsError::InvalidConfig(format!("bad node key {k:?}")))
}

fn parse_edge_key(k: &str) -> Result<(NodeId, NodeId), DynamicsError> {
    let (a, b) = k
        .split_once("->")
        .ok_or_else(|| DynamicsError::InvalidConfig(format!("bad edge key {k:?}")))?;
    Ok((parse_node_key(a)?, parse_node_key(b)?))
}

fn build_table(
    up: UpdateRule,
    down: UpdateRule,
    nodes: &BTreeMap<String, RuleOverride>,
    edges: &BTreeMap<String, RuleOverride>,
) -> Result<RuleTable, DynamicsError> {
    let mut t = RuleTable::new(up, down);
    for (k, v) in nodes {
        t.node_overrides.insert(parse_node_key(k)?, *v);
    }
    for (k, v) in edges {
        t.edge_overrides.insert(parse_edge_key(k)?, *v);
    }
    Ok(t)
}

fn table_maps(t: &RuleTable) -> (BTreeMap<String, RuleOverride>, BTreeMap<String, RuleOverride>) {
    (
        t.node_overrides.iter().map(|(k, v)| (k.0.to_string(), *v)).collect(),
        t.edge_overrides
            .iter()
            .map(|((a, b), v)| (format!("{a}->{b}"), *v))
            .collect(),
    )
}

impl ConfigDocument {
    pub fn into_parts(&self) -> Result<(TrainConfig, UpdateSchedule), DynamicsError> {
        let config = TrainConfig {
            batch_size: self.batch_size,
            iterations: self.iterations,
            seed: self.seed,
            init: self.init,
            snapshot_every: self.snapshot_every,
            sampling: self.sampling,
        };
        let r = &self.rules;
        let base = build_table(r.default_up, r.default_down, &r.node_overrides, &r.edge_overrides)?;
        let phases = r
            .phases
            .iter()
            .map(|p| {
                Ok(SchedulePhase {
                    start: p.start,
                    end: p.end,
                    rules: build_table(p.default_up, p.default_down, &p.node_overrides, &p.edge_overrides)?,
                })
            })
            .collect::<Result<Vec<_>, DynamicsError>>()?;
        let schedule = UpdateSchedule { base, phases };
        config.check_with(&schedule)?;
        Ok((config, schedule))
    }

    pub fn from_parts(config: &TrainConfig, schedule: &UpdateSchedule) -> Self {
        let (node_overrides, edge_overrides) = table_maps(&schedule.base);
        ConfigDocument {
            batch_size: config.batch_size,
            iterations: config.iterations,
            seed: config.seed,
            init: config.init,
            snapshot_every: config.snapshot_every,
            sampling: config.sampling,
            rules: RulesDocument {
                default_up: schedule.base.default_up,
                default_down: schedule.base.default_down,
                node_overrides,
                edge_overrides,
                phases: schedule
                    .phases
                    .iter()
                    .map(|p| {
                        let (node_overrides, edge_overrides) = table_maps(&p.rules);
                        PhaseDocument {
                            start: p.start,
                            end: p.end,
                            default_up: p.rules.default_up,
                            default_down: p.rules.default_down,
                            node_overrides,
                            edge_overrides,
                        }
                    })
                    .collect(),
            },
        }
    }
}

/// Parses a training config file into a validated config and schedule.
pub fn parse_config(text: &str) -> Result<(TrainConfig, UpdateSchedule), DynamicsError> {
    let doc: ConfigDocument =
        serde_json::from_str(text).map_err(|e| DynamicsError::MalformedDocument(e.to_string()))?;
    doc.into_parts()
}

pub fn config_to_json(config: &TrainConfig, schedule: &UpdateSchedule) -> String {
    serde_json::to_string_pretty(&ConfigDocument::from_parts(config, schedule))
        .expect("config serializes")
}

/// Checks that every override key names something the graph has.
pub fn check_schedule_for(schedule: &UpdateSchedule, graph: &NeurashedGraph) -> Result<(), DynamicsError> {
    let tables = std::iter::once(&schedule.base).chain(schedule.phases.iter().map(|p| &p.rules));
    for t in tables {
        for &id in t.node_overrides.keys() {
            if !graph.contains(id) || graph.is_top(id) {
                return Err(DynamicsError::InvalidConfig(format!(
                    "override for node {id}, which has no amplification factor"
                )));
            }
        }
        for &(a, b) in t.edge_overrides.keys() {
            if graph.eta_index(a, b).is_none() {
                return Err(DynamicsError::InvalidConfig(format!(
                    "override for edge {a}->{b}, which is not a class edge"
                )));
            }
        }
    }
    Ok(())
}
