//! Task-free preparation: annealing over environment states to minimize the
//! estimated expected future cost.

use crate::anticipate::CostEstimator;
use crate::cost::Cost;
use crate::error::{EstimatorError, PlanError};
use crate::planner::{task_plan, Plan, SearchBudget};
use crate::world::{CleanState, FillState, Loc, Predicate, TaskSpec, WorldState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Geometric annealing schedule.
#[derive(Clone, Copy, Debug)]
pub struct AnnealSchedule {
    pub iterations: usize,
    /// Initial temperature in cost units; `None` defaults to 10% of the
    /// starting state's estimated cost.
    pub t0: Option<f64>,
    /// Multiplicative temperature decay per iteration, in (0, 1).
    pub decay: f64,
    pub rng_seed: u64,
}

impl Default for AnnealSchedule {
    fn default() -> AnnealSchedule {
        AnnealSchedule {
            iterations: 2000,
            t0: None,
            decay: 0.999,
            rng_seed: 0,
        }
    }
}

impl AnnealSchedule {
    pub fn validate(&self) -> Result<(), EstimatorError> {
        if self.iterations == 0 {
            return Err(EstimatorError::ShapeMismatch("iterations must be >= 1".into()));
        }
        if let Some(t0) = self.t0 {
            if t0 <= 0.0 {
                return Err(EstimatorError::ShapeMismatch("t0 must be > 0".into()));
            }
        }
        if !(0.0 < self.decay && self.decay < 1.0) {
            return Err(EstimatorError::ShapeMismatch("decay must be in (0,1)".into()));
        }
        Ok(())
    }
}

/// One accepted step of the annealing trace, for reporting.
#[derive(Clone, Copy, Debug)]
pub struct PrepareStats {
    pub initial_estimate: f64,
    pub final_estimate: f64,
    pub accepted: usize,
    pub proposed: usize,
}

/// Simulated-annealing search for a low-expected-cost state.
///
/// Proposes single atomic perturbations; accepts improvements always and
/// worsenings with Metropolis probability `exp(-delta/T)`. Returns the best
/// state seen, so the output estimate never exceeds the input estimate.
pub fn prepare(
    s0: &WorldState,
    estimator: &dyn CostEstimator,
    sched: &AnnealSchedule,
) -> Result<(WorldState, PrepareStats), EstimatorError> {
    sched.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(sched.rng_seed);
    let initial = estimator.estimate(s0)?;
    let mut temperature = sched.t0.unwrap_or_else(|| (initial * 0.1).max(1e-6));
    let mut current = s0.clone();
    let mut current_v = initial;
    let mut best = s0.clone();
    let mut best_v = initial;
    let mut accepted = 0;
    let mut proposed = 0;
    for _ in 0..sched.iterations {
        let proposal = match current.perturb(rng.gen()) {
            Ok(p) => p,
            Err(_) => break, // degenerate world: nothing to perturb
        };
        proposed += 1;
        let v = estimator.estimate(&proposal)?;
        let delta = v - current_v;
        let accept = delta < 0.0 || {
            let p = (-delta / temperature.max(1e-300)).exp();
            rng.gen::<f64>() < p
        };
        if accept {
            current = proposal;
            current_v = v;
            accepted += 1;
            if v < best_v {
                best = current.clone();
                best_v = v;
            }
        }
        temperature *= sched.decay;
    }
    Ok((
        best,
        PrepareStats {
            initial_estimate: initial,
            final_estimate: best_v,
            accepted,
            proposed,
        },
    ))
}

/// Runs several independent annealing chains (seeds `base_seed..+chains`)
/// and returns the best result.
pub fn prepare_chains(
    s0: &WorldState,
    estimator: &dyn CostEstimator,
    sched: &AnnealSchedule,
    chains: usize,
) -> Result<(WorldState, PrepareStats), EstimatorError> {
    assert!(chains >= 1);
    let mut best: Option<(WorldState, PrepareStats)> = None;
    for i in 0..chains as u64 {
        let chain_sched = AnnealSchedule {
            rng_seed: sched.rng_seed.wrapping_add(i),
            ..*sched
        };
        let (state, stats) = prepare(s0, estimator, &chain_sched)?;
        if best
            .as_ref()
            .is_none_or(|(_, b)| stats.final_estimate < b.final_estimate)
        {
            best = Some((state, stats));
        }
    }
    Ok(best.unwrap())
}

/// Goal predicates describing how `target` differs from `s0` in object
/// placement, cleanliness, and fill state.
pub fn diff_predicates(s0: &WorldState, target: &WorldState) -> Vec<Predicate> {
    let m = &s0.model;
    let mut goal = Vec::new();
    for &o in &m.movables {
        if s0.loc_of(o) != target.loc_of(o) {
            if let Loc::In(c) = target.loc_of(o) {
                goal.push(Predicate::In(o, c));
            }
        }
        if s0.clean_of(o) != target.clean_of(o) {
            match target.clean_of(o) {
                CleanState::Clean => goal.push(Predicate::Clean(o)),
                CleanState::Dirty => goal.push(Predicate::Dirty(o)),
                CleanState::NA => {}
            }
        }
        if s0.fill_of(o) != target.fill_of(o) {
            match target.fill_of(o) {
                FillState::Filled(l) => goal.push(Predicate::FilledWith(o, l)),
                FillState::Empty => goal.push(Predicate::Empty(o)),
                FillState::NA => {}
            }
        }
    }
    goal.sort();
    goal
}

/// Plan cost of physically realizing the prepared state from `s0`, solved as
/// a task over the diff predicates. Zero when the states already agree.
pub fn preparation_cost(
    s0: &WorldState,
    prepared: &WorldState,
    budget: &SearchBudget,
) -> Result<(Cost, Plan), PlanError> {
    let goal = diff_predicates(s0, prepared);
    if goal.is_empty() {
        return Ok((
            Cost::ZERO,
            Plan {
                actions: Vec::new(),
                total_cost: Cost::ZERO,
                terminal: s0.clone(),
                expansions: 0,
                optimal: true,
            },
        ));
    }
    let task = TaskSpec::new("preparation", goal);
    let plan = task_plan(s0, &task, budget)?;
    Ok((plan.total_cost, plan))
}
