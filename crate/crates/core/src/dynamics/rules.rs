//! Growth (`g⁺`) and decay (`g⁻`) maps and their per-node, per-iteration
//! resolution.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::graph::NodeId;

use super::DynamicsError;

/// A scalar update map.
///
/// `Multiplicative { factor }` is `x ↦ factor·x`; `Additive { offset }` is
/// `x ↦ max(x + offset, 0)`. Whether a rule is a growth or a decay rule is
/// decided by the slot it occupies, and [`UpdateRule::check`] enforces the
/// matching constraints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum UpdateRule {
    Multiplicative { factor: f64 },
    Additive { offset: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Up,
    Down,
}

impl UpdateRule {
    pub fn multiply(factor: f64) -> Self {
        UpdateRule::Multiplicative { factor }
    }

    pub fn add(offset: f64) -> Self {
        UpdateRule::Additive { offset }
    }

    /// The identity decay map, `g⁻(x) = x`.
    pub fn identity() -> Self {
        UpdateRule::Multiplicative { factor: 1.0 }
    }

    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        match *self {
            UpdateRule::Multiplicative { factor } => factor * x,
            UpdateRule::Additive { offset } => (x + offset).max(0.0),
        }
    }

    pub fn is_multiplicative(&self) -> bool {
        matches!(self, UpdateRule::Multiplicative { .. })
    }

    /// Up-rules must satisfy `g⁺(x) > x` (for `x > 0` when multiplicative);
    /// down-rules must satisfy `0 ≤ g⁻(x) ≤ x` and be monotone.
    pub fn check(&self, direction: Direction) -> Result<(), DynamicsError> {
        let ok = match (*self, direction) {
            (UpdateRule::Multiplicative { factor }, Direction::Up) => factor.is_finite() && factor > 1.0,
            (UpdateRule::Multiplicative { factor }, Direction::Down) => factor > 0.0 && factor <= 1.0,
            (UpdateRule::Additive { offset }, Direction::Up) => offset.is_finite() && offset > 0.0,
            (UpdateRule::Additive { offset }, Direction::Down) => offset.is_finite() && offset <= 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(DynamicsError::InvalidRule(format!(
                "{self:?} is not a valid {} rule",
                match direction {
                    Direction::Up => "growth",
                    Direction::Down => "decay",
                }
            )))
        }
    }
}

/// Partial override of a rule pair; missing sides fall back to the table
/// defaults.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleOverride {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub up: Option<UpdateRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub down: Option<UpdateRule>,
}

/// Defaults plus per-node (for `λ`) and per-edge (for `η`) overrides.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleTable {
    pub default_up: UpdateRule,
    pub default_down: UpdateRule,
    pub node_overrides: BTreeMap<NodeId, RuleOverride>,
    pub edge_overrides: BTreeMap<(NodeId, NodeId), RuleOverride>,
}

impl RuleTable {
    pub fn new(default_up: UpdateRule, default_down: UpdateRule) -> Self {
        RuleTable {
            default_up,
            default_down,
            node_overrides: BTreeMap::new(),
            edge_overrides: BTreeMap::new(),
        }
    }

    pub fn with_node_override(mut self, node: NodeId, o: RuleOverride) -> Self {
        self.node_overrides.insert(node, o);
        self
    }

    fn pick(&self, o: Option<&RuleOverride>) -> (UpdateRule, UpdateRule) {
        let o = o.copied().unwrap_or_default();
        (o.up.unwrap_or(self.default_up), o.down.unwrap_or(self.default_down))
    }

    pub fn for_node(&self, node: NodeId) -> (UpdateRule, UpdateRule) {
        self.pick(self.node_overrides.get(&node))
    }

    pub fn for_edge(&self, lower: NodeId, upper: NodeId) -> (UpdateRule, UpdateRule) {
        self.pick(self.edge_overrides.get(&(lower, upper)))
    }

    /// Every rule that can be resolved from this table.
    pub fn all_pairs(&self) -> impl Iterator<Item = (UpdateRule, UpdateRule)> + '_ {
        std::iter::once((self.default_up, self.default_down)).chain(
            self.node_overrides
                .values()
                .chain(self.edge_overrides.values())
                .map(|o| self.pick(Some(o))),
        )
    }

    pub fn check(&self) -> Result<(), DynamicsError> {
        for (up, down) in self.all_pairs() {
            up.check(Direction::Up)?;
            down.check(Direction::Down)?;
        }
        Ok(())
    }
}

/// A rule table that replaces the base table for iterations in
/// `start..end`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchedulePhase {
    pub start: u64,
    pub end: u64,
    pub rules: RuleTable,
}

/// Resolves the rule pair used for each value at each iteration.
///
/// The first phase covering an iteration wins; otherwise the base table
/// applies.
#[derive(Debug, Clone, PartialEq)]
pub struct UpdateSchedule {
    pub base: RuleTable,
    pub phases: Vec<SchedulePhase>,
}

impl UpdateSchedule {
    pub fn uniform(up: UpdateRule, down: UpdateRule) -> Self {
        UpdateSchedule {
            base: RuleTable::new(up, down),
            phases: Vec::new(),
        }
    }

    pub fn from_table(base: RuleTable) -> Self {
        UpdateSchedule {
            base,
            phases: Vec::new(),
        }
    }

    pub fn table_at(&self, iteration: u64) -> &RuleTable {
        self.phases
            .iter()
            .find(|p| p.start <= iteration && iteration < p.end)
            .map_or(&self.base, |p| &p.rules)
    }

    pub fn check(&self) -> Result<(), DynamicsError> {
        self.base.check()?;
        for p in &self.phases {
            if p.start >= p.end {
                return Err(DynamicsError::InvalidRule(format!(
                    "phase {}..{} is empty",
                    p.start, p.end
                )));
            }
            p.rules.check()?;
        }
        Ok(())
    }

    pub fn uses_multiplicative_growth(&self) -> bool {
        std::iter::once(&self.base)
            .chain(self.phases.iter().map(|p| &p.rules))
            .any(|t| t.all_pairs().any(|(up, _)| up.is_multiplicative()))
    }
}
