//! Learnable state, prediction, and the growth/decay training loop.

mod config;
mod rules;
mod scoring;
mod state;
mod train;

pub use config::{
    check_schedule_for, config_to_json, parse_config, ConfigDocument, Init, PhaseDocument, RulesDocument,
    Sampling, TrainConfig,
};
pub use rules::{Direction, RuleOverride, RuleTable, SchedulePhase, UpdateRule, UpdateSchedule};
pub use scoring::{argmax, class_logits, logits_from_scores, node_scores, predict_proba, scores_for_firing};
pub use state::{init_state, ModelState, INIT_STREAM, SAMPLING_STREAM};
pub use train::{apply_updates, run_training, train_step, Snapshot, Trajectory};

use thiserror::Error;

use crate::graph::{DatasetError, FiringError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("MalformedDocument: {0}")]
    MalformedDocument(String),
    #[error("InvalidConfig: {0}")]
    InvalidConfig(String),
    #[error("InvalidRule: {0}")]
    InvalidRule(String),
    #[error("EmptyDataset: no patterns to train on")]
    EmptyDataset,
    #[error("LabelOutOfRange: pattern {index} has label {label} but the graph has {classes} classes")]
    LabelOutOfRange { index: usize, label: usize, classes: usize },
    #[error("NonFiniteLogit: {0}")]
    NonFiniteLogit(f64),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Firing(#[from] FiringError),
}
