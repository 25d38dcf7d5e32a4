//! Simulator for leveled feature-pathway graphs trained by growth/decay
//! dynamics, with instruments for information-bottleneck, implicit
//! regularization and local-elasticity studies.
//!
//! The crate is organized bottom-up:
//!
//! * [`graph`]: graph structure, JSON descriptions, firing rules and pathways
//! * [`dynamics`]: learnable state, logits, and the training loop
//! * [`metrics`]: mutual information, local elasticity, sparsity
//! * [`experiments`]: built-in scenarios and the three studies
//! * [`report`]: CSV/SVG output and run manifests
//! * [`cli`]: the `neurashed` command line

pub mod cli;
pub mod dynamics;
pub mod experiments;
pub mod graph;
pub mod metrics;
pub mod report;
