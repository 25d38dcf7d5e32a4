use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{union_firing, Dataset, DatasetError, FiringError, FiringState, InputPattern, NeurashedGraph};
use crate::report::{Cell, Table};

use super::config::{check_schedule_for, Sampling, TrainConfig};
use super::rules::UpdateSchedule;
use super::state::{init_state, SAMPLING_STREAM};
use super::{DynamicsError, ModelState};

/// Applies one round of growth/decay given an already computed firing state.
///
/// All values are read from `state` and written to a fresh copy, so the
/// update order does not matter.
pub fn apply_updates(
    graph: &NeurashedGraph,
    state: &ModelState,
    firing: &FiringState,
    schedule: &UpdateSchedule,
    iteration: u64,
) -> ModelState {
    let table = schedule.table_at(iteration);
    let lambda = graph
        .node_ids()
        .map(|id| {
            if graph.is_top(id) {
                return 0.0;
            }
            let (up, down) = table.for_node(id);
            let v = state.lambda(id);
            if firing.contains(id) {
                up.apply(v)
            } else {
                down.apply(v)
            }
        })
        .collect();
    let eta = graph
        .eta_edges()
        .iter()
        .enumerate()
        .map(|(i, &(lower, class_node))| {
            let (up, down) = table.for_edge(lower, class_node);
            let v = state.eta(i);
            if firing.contains(lower) && firing.contains(class_node) {
                up.apply(v)
            } else {
                down.apply(v)
            }
        })
        .collect();
    ModelState::from_parts(lambda, eta)
}

/// One training iteration on a mini-batch.
///
/// Nodes on the union of the batch's pathways grow, all others decay. A class
/// edge grows when both of its endpoints are in that union.
pub fn train_step(
    graph: &NeurashedGraph,
    state: &ModelState,
    batch: &[&InputPattern],
    schedule: &UpdateSchedule,
    iteration: u64,
) -> Result<ModelState, FiringError> {
    let firing = union_firing(graph, batch)?;
    Ok(apply_updates(graph, state, &firing, schedule, iteration))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub iteration: u64,
    pub state: ModelState,
}

/// Recorded run: state snapshots plus the pattern indices of every batch.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub snapshots: Vec<Snapshot>,
    pub batches: Vec<Vec<usize>>,
}

impl Trajectory {
    pub fn final_state(&self) -> &ModelState {
        &self.snapshots.last().expect("a trajectory starts with the initial state").state
    }

    /// Long-format table: `iteration, kind, id, value`.
    pub fn snapshot_table(&self, graph: &NeurashedGraph) -> Table {
        let mut table = Table::new(["iteration", "kind", "id", "value"]);
        for snap in &self.snapshots {
            for id in graph.amplified_nodes() {
                table.push(vec![
                    Cell::Int(snap.iteration as i64),
                    Cell::text("lambda"),
                    Cell::Text(id.to_string()),
                    Cell::Float(snap.state.lambda(id)),
                ]);
            }
            for (i, &(a, b)) in graph.eta_edges().iter().enumerate() {
                table.push(vec![
                    Cell::Int(snap.iteration as i64),
                    Cell::text("eta"),
                    Cell::Text(format!("{a}->{b}")),
                    Cell::Float(snap.state.eta(i)),
                ]);
            }
        }
        table
    }
}

fn dataset_error(e: DatasetError) -> DynamicsError {
    match e {
        DatasetError::EmptyDataset => DynamicsError::EmptyDataset,
        DatasetError::Pattern {
            index,
            source: FiringError::LabelOutOfRange { label, classes },
        } => DynamicsError::LabelOutOfRange { index, label, classes },
        other => DynamicsError::Dataset(other),
    }
}

/// Runs `config.iterations` training steps.
///
/// Snapshots are taken at iteration 0, at every multiple of
/// `snapshot_every`, and at the last iteration. Batches are drawn from
/// ChaCha8 seeded with `config.seed` on stream [`SAMPLING_STREAM`].
pub fn run_training(
    graph: &NeurashedGraph,
    dataset: &Dataset,
    config: &TrainConfig,
    schedule: &UpdateSchedule,
) -> Result<Trajectory, DynamicsError> {
    dataset.validate_for(graph).map_err(dataset_error)?;
    config.check_with(schedule)?;
    check_schedule_for(schedule, graph)?;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(SAMPLING_STREAM);
    let weights = WeightedIndex::new(dataset.patterns.iter().map(|p| p.weight))
        .map_err(|e| DynamicsError::InvalidConfig(format!("pattern weights: {e}")))?;

    let mut state = init_state(graph, config);
    let mut snapshots = vec![Snapshot {
        iteration: 0,
        state: state.clone(),
    }];
    let mut batches = Vec::with_capacity(config.iterations as usize);
    let all: Vec<usize> = (0..dataset.len()).collect();

    for it in 0..config.iterations {
        let indices: Vec<usize> = match config.sampling {
            Sampling::WithReplacement => (0..config.batch_size).map(|_| weights.sample(&mut rng)).collect(),
            Sampling::FullBatch => all.clone(),
        };
        let batch: Vec<&InputPattern> = indices.iter().map(|&i| &dataset.patterns[i]).collect();
        state = train_step(graph, &state, &batch, schedule, it)?;
        batches.push(indices);

        let done = it + 1;
        if done % config.snapshot_every == 0 || done == config.iterations {
            snapshots.push(Snapshot {
                iteration: done,
                state: state.clone(),
            });
        }
    }
    Ok(Trajectory { snapshots, batches })
}
