//! Error types shared across the crate.

use crate::grid::Cell;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WorldError {
    #[error("cell {0} is out of bounds")]
    CellOutOfBounds(Cell),
    #[error("cell {0} is blocked")]
    CellBlocked(Cell),
    #[error("grid: {0}")]
    Grid(String),
    #[error("unknown entity `{0}`")]
    UnknownEntity(String),
    #[error("world description invalid: {0}")]
    Invalid(String),
    #[error("action {0} is not applicable in this state")]
    InapplicableAction(String),
    #[error("state admits no legal perturbation")]
    NoLegalPerturbation,
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse: {0}")]
    Parse(String),
}

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("goal is unreachable (search space exhausted)")]
    Unsolvable,
    #[error("search budget exhausted with no incumbent plan")]
    BudgetExhausted,
    #[error("world: {0}")]
    World(#[from] WorldError),
}

#[derive(Debug, Error)]
pub enum EstimatorError {
    #[error("distribution task `{0}` unsolvable from the queried state")]
    UnsolvableTask(String),
    #[error("feature shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("entity name `{0}` is outside the feature vocabulary")]
    UnknownName(String),
    #[error("plan: {0}")]
    Plan(#[from] PlanError),
    #[error("world: {0}")]
    World(#[from] WorldError),
}

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("loss became non-finite at step {step} (lr {lr})")]
    NonFiniteLoss { step: usize, lr: f64 },
    #[error("estimator: {0}")]
    Estimator(#[from] EstimatorError),
}

#[derive(Debug, Error)]
pub enum GenError {
    #[error("infeasible generator config: {0}")]
    InfeasibleConfig(String),
    #[error("no feasible tasks could be instantiated")]
    NoFeasibleTasks,
    #[error("world: {0}")]
    World(#[from] WorldError),
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("task {index} (`{label}`) unsolvable: {source}")]
    UnsolvableTask {
        index: usize,
        label: String,
        source: PlanError,
    },
    #[error("aggregate inputs have mixed sequence lengths")]
    MixedLengthInputs,
    #[error("estimator: {0}")]
    Estimator(#[from] EstimatorError),
    #[error("world: {0}")]
    World(#[from] WorldError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Other(String),
}
