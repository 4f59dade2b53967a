//! Anticipatory planning: immediate plan cost plus expected future task cost.
//!
//! The planner first solves the task myopically, then samples augmented
//! tasks (the task's goal conjoined with extra predicates drawn from
//! entities near the myopic motion path), filters out augmentations whose
//! imposed goal state does not improve the estimated future cost, plans the
//! survivors, and returns the candidate minimizing immediate cost plus
//! estimated anticipatory cost. The myopic candidate is always kept as the
//! floor, so the returned total never exceeds it.

use crate::cost::Cost;
use crate::error::EstimatorError;
use crate::grid::Cell;
use crate::planner::{task_plan, Plan, SearchBudget};
use crate::world::{
    ActionKind, CleanState, EntityId, FillState, Predicate, StateKey, TaskSpec,
    WorldState,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::sync::RwLock;

/// Weighted list of tasks; weights are positive and sum to 1.
#[derive(Clone, Debug)]
pub struct TaskDistribution {
    entries: Vec<(TaskSpec, f64)>,
}

impl TaskDistribution {
    pub fn new(entries: Vec<(TaskSpec, f64)>) -> Result<TaskDistribution, EstimatorError> {
        if entries.is_empty() {
            return Err(EstimatorError::ShapeMismatch(
                "task distribution is empty".into(),
            ));
        }
        if entries.iter().any(|(_, w)| *w <= 0.0 || !w.is_finite()) {
            return Err(EstimatorError::ShapeMismatch(
                "task weights must be positive and finite".into(),
            ));
        }
        let sum: f64 = entries.iter().map(|(_, w)| w).sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(EstimatorError::ShapeMismatch(format!(
                "task weights sum to {sum}, expected 1"
            )));
        }
        Ok(TaskDistribution { entries })
    }

    /// Normalizes arbitrary positive weights to sum 1.
    pub fn normalized(entries: Vec<(TaskSpec, f64)>) -> Result<TaskDistribution, EstimatorError> {
        let sum: f64 = entries.iter().map(|(_, w)| w).sum();
        if sum <= 0.0 {
            return Err(EstimatorError::ShapeMismatch(
                "task weights must have positive sum".into(),
            ));
        }
        TaskDistribution::new(
            entries
                .into_iter()
                .map(|(t, w)| (t, w / sum))
                .collect::<Vec<_>>(),
        )
    }

    pub fn uniform(tasks: Vec<TaskSpec>) -> Result<TaskDistribution, EstimatorError> {
        let n = tasks.len() as f64;
        TaskDistribution::new(tasks.into_iter().map(|t| (t, 1.0 / n)).collect())
    }

    pub fn entries(&self) -> &[(TaskSpec, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Draws one task index per the weights; deterministic per rng state.
    pub fn sample_index(&self, rng: &mut ChaCha8Rng) -> usize {
        use rand::Rng;
        let x: f64 = rng.gen();
        let mut acc = 0.0;
        for (i, (_, w)) in self.entries.iter().enumerate() {
            acc += w;
            if x < acc {
                return i;
            }
        }
        self.entries.len() - 1
    }
}

/// Predicts the expected cost of one future task from a state.
///
/// Two implementations exist: the exact oracle (solves every distribution
/// task with the planner) and the learned scene-graph regressor.
pub trait CostEstimator: Sync {
    fn estimate(&self, state: &WorldState) -> Result<f64, EstimatorError>;
}

/// Expected cost of completing one task drawn from `dist`, computed exactly
/// by solving every entry with the optimal planner. This is the ground-truth
/// oracle used for training labels and small-instance verification.
pub fn anticipatory_cost_exact(
    state: &WorldState,
    dist: &TaskDistribution,
    budget: &SearchBudget,
) -> Result<f64, EstimatorError> {
    let mut total = 0.0;
    for (task, weight) in dist.entries() {
        let plan = task_plan(state, task, budget)
            .map_err(|_| EstimatorError::UnsolvableTask(task.label.clone()))?;
        total += weight * plan.total_cost.as_f64();
    }
    Ok(total)
}

/// [`CostEstimator`] backed by [`anticipatory_cost_exact`], memoized per
/// state key.
pub struct OracleEstimator {
    pub dist: TaskDistribution,
    pub budget: SearchBudget,
    memo: RwLock<HashMap<StateKey, f64>>,
}

impl OracleEstimator {
    pub fn new(dist: TaskDistribution, budget: SearchBudget) -> OracleEstimator {
        OracleEstimator {
            dist,
            budget,
            memo: RwLock::new(HashMap::new()),
        }
    }
}

impl CostEstimator for OracleEstimator {
    fn estimate(&self, state: &WorldState) -> Result<f64, EstimatorError> {
        let key = state.key();
        if let Some(&v) = self.memo.read().unwrap().get(&key) {
            return Ok(v);
        }
        let v = anticipatory_cost_exact(state, &self.dist, &self.budget)?;
        self.memo.write().unwrap().insert(key, v);
        Ok(v)
    }
}

/// Constant-zero estimator; with it, anticipatory planning degenerates to
/// myopic planning.
pub struct ZeroEstimator;

impl CostEstimator for ZeroEstimator {
    fn estimate(&self, _state: &WorldState) -> Result<f64, EstimatorError> {
        Ok(0.0)
    }
}

/// A task augmented with extra predicates to steer plan sampling.
#[derive(Clone, Debug, PartialEq)]
pub struct AugmentedTask {
    pub base: TaskSpec,
    pub added: Vec<Predicate>,
    pub combined: TaskSpec,
}

impl AugmentedTask {
    pub fn new(base: &TaskSpec, added: Vec<Predicate>) -> AugmentedTask {
        let mut goal = base.goal.clone();
        goal.extend(added.iter().copied());
        AugmentedTask {
            combined: TaskSpec::new(format!("{}+aug", base.label), goal),
            base: base.clone(),
            added,
        }
    }
}

/// Knobs of the anticipatory planning loop.
#[derive(Clone, Copy, Debug)]
pub struct AnticipationConfig {
    /// Number of augmented tasks sampled per query (Alg. 1's N).
    pub n_samples: usize,
    /// Bounded-region radius, in cells, around myopic path waypoints.
    pub radius: u32,
    /// Added predicates per augmented task (1 or 2).
    pub added_per_task: usize,
    pub rng_seed: u64,
}

impl Default for AnticipationConfig {
    fn default() -> AnticipationConfig {
        AnticipationConfig {
            n_samples: 20,
            radius: 3,
            added_per_task: 1,
            rng_seed: 0,
        }
    }
}

/// Cells the robot traverses while executing a plan, including the start.
fn plan_waypoints(s0: &WorldState, plan: &Plan) -> Vec<Cell> {
    let m = &s0.model;
    let mut cells = vec![s0.robot_cell];
    let mut cur = s0.robot_cell;
    for a in &plan.actions {
        if let ActionKind::Move { to } = a.kind {
            let dest = m.cell_of(to).unwrap();
            if let Ok(Some(path)) = m.motion.path(cur, dest) {
                cells.extend(path);
            }
            cur = dest;
        }
    }
    cells.sort();
    cells.dedup();
    cells
}

/// The candidate predicate pool for augmentation: single predicates touching
/// only entities whose container lies within `radius` of the myopic motion
/// path. Canonically ordered.
pub fn augmentation_pool(s0: &WorldState, task: &TaskSpec, myopic_plan: &Plan, radius: u32) -> Vec<Predicate> {
    let m = &s0.model;
    let waypoints = plan_waypoints(s0, myopic_plan);
    let in_region = |c: EntityId| -> bool {
        m.cell_of(c)
            .is_some_and(|cell| waypoints.iter().any(|w| w.chebyshev(cell) <= radius))
    };
    let region_containers: Vec<EntityId> = m
        .containers
        .iter()
        .copied()
        .filter(|&c| in_region(c))
        .collect();
    let mut pool = Vec::new();
    for &c in &region_containers {
        for o in s0.contents(c) {
            if s0.clean_of(o) == CleanState::Dirty {
                pool.push(Predicate::Clean(o));
            }
            if s0.fill_of(o) == FillState::Empty {
                if let Some(w) = m.water {
                    pool.push(Predicate::FilledWith(o, w));
                }
                if let Some(cf) = m.coffee {
                    pool.push(Predicate::FilledWith(o, cf));
                }
            }
            for &dest in &region_containers {
                if dest != c {
                    pool.push(Predicate::In(o, dest));
                }
            }
        }
        if s0.content_count(c) > 0 {
            pool.push(Predicate::Empty(c));
        }
    }
    pool.retain(|p| !task.goal.contains(p));
    pool.sort();
    pool.dedup();
    pool
}

/// Samples up to `k` augmented tasks from the bounded-region predicate pool;
/// deterministic per seed. May return fewer than `k` (including zero) when
/// the region is degenerate.
pub fn sample_augmented_tasks(
    s0: &WorldState,
    task: &TaskSpec,
    myopic_plan: &Plan,
    cfg: &AnticipationConfig,
) -> Vec<AugmentedTask> {
    let pool = augmentation_pool(s0, task, myopic_plan, cfg.radius);
    if pool.is_empty() {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut out = Vec::new();
    let mut seen: Vec<Vec<Predicate>> = Vec::new();
    // sample distinct predicate sets
    let mut attempts = 0;
    while out.len() < cfg.n_samples && attempts < cfg.n_samples * 8 {
        attempts += 1;
        let take = cfg.added_per_task.clamp(1, 2).min(pool.len());
        let mut added: Vec<Predicate> = pool
            .choose_multiple(&mut rng, take)
            .copied()
            .collect();
        added.sort();
        if seen.contains(&added) {
            continue;
        }
        seen.push(added.clone());
        out.push(AugmentedTask::new(task, added));
    }
    out
}

/// Keeps only candidates whose added predicates, imposed directly on the
/// myopic goal state, strictly improve the estimated future cost over
/// `baseline`. Candidates that cannot be imposed or scored are dropped.
pub fn filter_augmented_tasks(
    cands: &[AugmentedTask],
    goal_state: &WorldState,
    estimator: &dyn CostEstimator,
    baseline: f64,
) -> Result<Vec<AugmentedTask>, EstimatorError> {
    let mut kept = Vec::new();
    for cand in cands {
        let imposed = match goal_state.impose(&cand.added) {
            Ok(s) => s,
            Err(_) => continue,
        };
        if imposed.key() == goal_state.key() {
            continue; // no change, no strict improvement
        }
        if let Ok(v) = estimator.estimate(&imposed) {
            if v < baseline {
                kept.push(cand.clone());
            }
        }
    }
    Ok(kept)
}

/// One scored plan: immediate cost plus estimated anticipatory cost.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub plan: Plan,
    pub immediate: Cost,
    pub anticipatory: f64,
}

impl Candidate {
    pub fn total(&self) -> f64 {
        self.immediate.as_f64() + self.anticipatory
    }
}

fn score(
    s0: &WorldState,
    task: &TaskSpec,
    estimator: &dyn CostEstimator,
    budget: &SearchBudget,
) -> Result<Candidate, EstimatorError> {
    let plan = task_plan(s0, task, budget)?;
    let anticipatory = estimator.estimate(plan.tail())?;
    Ok(Candidate {
        immediate: plan.total_cost,
        plan,
        anticipatory,
    })
}

/// Core selection loop over an explicit augmentation pool. The myopic
/// candidate is scored first and kept as the floor; augmented tasks that
/// fail to plan are skipped.
pub fn anticipatory_plan_with_pool(
    s0: &WorldState,
    task: &TaskSpec,
    pool: &[AugmentedTask],
    estimator: &dyn CostEstimator,
    budget: &SearchBudget,
) -> Result<Candidate, EstimatorError> {
    let mut best = score(s0, task, estimator, budget)?;
    for aug in pool {
        let cand = match score(s0, &aug.combined, estimator, budget) {
            Ok(c) => c,
            Err(_) => continue,
        };
        if cand.total() < best.total() {
            best = cand;
        }
    }
    Ok(best)
}

/// Full anticipatory planning: myopic plan, focused sampling, filtering,
/// then candidate selection. Deterministic per seed.
pub fn anticipatory_plan(
    s0: &WorldState,
    task: &TaskSpec,
    estimator: &dyn CostEstimator,
    cfg: &AnticipationConfig,
    budget: &SearchBudget,
) -> Result<Candidate, EstimatorError> {
    let myopic = score(s0, task, estimator, budget)?;
    if cfg.n_samples == 0 {
        return Ok(myopic);
    }
    let sampled = sample_augmented_tasks(s0, task, &myopic.plan, cfg);
    let filtered =
        filter_augmented_tasks(&sampled, myopic.plan.tail(), estimator, myopic.anticipatory)?;
    let mut best = myopic;
    for aug in &filtered {
        // augmented candidates that cannot be planned or scored are skipped;
        // the myopic floor keeps the result well defined
        let cand = match score(s0, &aug.combined, estimator, budget) {
            Ok(c) => c,
            Err(_) => continue,
        };
        if cand.total() < best.total() {
            best = cand;
        }
    }
    Ok(best)
}
