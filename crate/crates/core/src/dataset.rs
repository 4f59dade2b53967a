//! Labelled training data for the learned cost estimator.
//!
//! States are drawn by applying random perturbation chains to a base world;
//! each state is labelled with its exact expected task cost under the
//! distribution. States from which some task is unsolvable are skipped and
//! reported, not fatal.

use crate::anticipate::{anticipatory_cost_exact, TaskDistribution};
use crate::error::{EstimatorError, TrainError};
use crate::nn::TrainingExample;
use crate::planner::SearchBudget;
use crate::scene::{convert_to_graph, FeatureSpec, SceneGraph};
use crate::world::WorldState;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const DATASET_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrainingDatum {
    pub graph: SceneGraph,
    /// Expected cost of a task drawn from the distribution, solved exactly.
    pub label: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Dataset {
    pub version: u32,
    pub spec: FeatureSpec,
    pub data: Vec<TrainingDatum>,
}

impl Dataset {
    pub fn examples(&self) -> Vec<TrainingExample> {
        self.data
            .iter()
            .map(|d| TrainingExample {
                graph: d.graph.clone(),
                label: d.label,
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct DatasetConfig {
    /// Number of states to sample (before skips).
    pub n_states: usize,
    /// Perturbation chain length cycles through 0..=this per state.
    pub max_chain_length: usize,
    pub budget: SearchBudget,
    pub rng_seed: u64,
}

impl Default for DatasetConfig {
    fn default() -> DatasetConfig {
        DatasetConfig {
            n_states: 100,
            max_chain_length: 6,
            budget: SearchBudget::default(),
            rng_seed: 0,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct DatasetReport {
    pub generated: usize,
    /// One entry per skipped state: which sample and why.
    pub skipped: Vec<String>,
}

fn chain_seed(base: u64, state_index: usize, step: usize) -> u64 {
    base.wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add((state_index as u64) << 20)
        .wrapping_add(step as u64)
}

/// The i-th sampled state: a perturbation chain of length `i mod (max+1)`.
pub fn sample_state(
    base: &WorldState,
    cfg: &DatasetConfig,
    index: usize,
) -> WorldState {
    let len = index % (cfg.max_chain_length + 1);
    let mut state = base.clone();
    for step in 0..len {
        match state.perturb(chain_seed(cfg.rng_seed, index, step)) {
            Ok(next) => state = next,
            Err(_) => break,
        }
    }
    state
}

/// Generates the labelled dataset; deterministic per config, parallel
/// across states.
pub fn generate_dataset(
    base: &WorldState,
    dist: &TaskDistribution,
    cfg: &DatasetConfig,
) -> Result<(Dataset, DatasetReport), TrainError> {
    let spec = FeatureSpec::from_state(base);
    let results: Vec<Result<TrainingDatum, String>> = (0..cfg.n_states)
        .into_par_iter()
        .map(|i| {
            let state = sample_state(base, cfg, i);
            let label = anticipatory_cost_exact(&state, dist, &cfg.budget)
                .map_err(|e| format!("state {i}: {e}"))?;
            let graph = convert_to_graph(&state, &spec)
                .map_err(|e: EstimatorError| format!("state {i}: {e}"))?;
            Ok(TrainingDatum { graph, label })
        })
        .collect();
    let mut data = Vec::new();
    let mut report = DatasetReport::default();
    for r in results {
        match r {
            Ok(d) => data.push(d),
            Err(log) => report.skipped.push(log),
        }
    }
    report.generated = data.len();
    if data.is_empty() {
        return Err(TrainError::EmptyDataset);
    }
    Ok((
        Dataset {
            version: DATASET_FORMAT_VERSION,
            spec,
            data,
        },
        report,
    ))
}

pub fn save_dataset(dataset: &Dataset, path: &Path) -> Result<(), std::io::Error> {
    std::fs::write(path, serde_json::to_string(dataset).expect("serializable"))
}

pub fn load_dataset(path: &Path) -> Result<Dataset, TrainError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| TrainError::Estimator(EstimatorError::ShapeMismatch(e.to_string())))?;
    let dataset: Dataset = serde_json::from_str(&text)
        .map_err(|e| TrainError::Estimator(EstimatorError::ShapeMismatch(e.to_string())))?;
    if dataset.version != DATASET_FORMAT_VERSION {
        return Err(TrainError::Estimator(EstimatorError::ShapeMismatch(
            format!("unsupported dataset format version {}", dataset.version),
        )));
    }
    Ok(dataset)
}
