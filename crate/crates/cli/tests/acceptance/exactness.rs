//! Criterion 1: with the exact oracle and an exhaustive augmentation pool,
//! the anticipatory objective equals a brute-force minimum over every
//! reachable goal-satisfying terminal state.

use crate::support::{self, reachable, StateGraph};
use antiplan::anticipate::{
    anticipatory_plan_with_pool, AugmentedTask, OracleEstimator, TaskDistribution,
};
use antiplan::planner::SearchBudget;
use rand::Rng;
use std::time::{Duration, Instant};

const INSTANCES: usize = 50;
const MAX_STATES: usize = 2_000;
const TOLERANCE: f64 = 1e-9;

#[test]
fn criterion_1_oracle_exactness() {
    let start = Instant::now();
    let mut rng = support::rng(0xAC01);
    let budget = SearchBudget::new(2_000_000, Duration::from_secs(3600));
    let mut checked = 0usize;
    while checked < INSTANCES {
        let world = support::tiny_world(&mut rng);
        let Some(graph) = StateGraph::explore(&world, MAX_STATES) else {
            continue;
        };

        // distribution of up to 4 tasks, each solvable from every reachable
        // state so the oracle is total
        let mut entries = Vec::new();
        let mut value_maps = Vec::new();
        for task in support::tiny_tasks(&world, &mut rng, 4) {
            let values = graph.cost_to_goal(&task);
            if values.iter().all(|&v| reachable(v)) {
                entries.push((task, rng.gen_range(0.5..2.0)));
                value_maps.push(values);
            }
        }
        if entries.is_empty() {
            continue;
        }
        let dist = TaskDistribution::normalized(entries).unwrap();

        let Some(base) = support::tiny_tasks(&world, &mut rng, 1).pop() else {
            continue;
        };
        let goal_nodes = graph.goal_nodes(&base);
        if goal_nodes.is_empty() {
            continue; // unsolvable base task
        }

        // brute force: optimal reach cost plus expected next-task cost, over
        // every goal-satisfying terminal
        let mut brute = f64::INFINITY;
        for &t in &goal_nodes {
            let mut total = graph.fwd[t].as_f64();
            for ((_, w), values) in dist.entries().iter().zip(&value_maps) {
                total += w * values[t].as_f64();
            }
            brute = brute.min(total);
        }

        // exhaustive pool: each goal terminal's fact set pins that exact
        // state, so the candidate space covers every terminal above
        let pool: Vec<AugmentedTask> = goal_nodes
            .iter()
            .map(|&t| {
                let added = graph.states[t]
                    .facts()
                    .into_iter()
                    .filter(|p| !base.goal.contains(p))
                    .collect();
                AugmentedTask::new(&base, added)
            })
            .collect();

        let est = OracleEstimator::new(dist, budget.clone());
        let cand = anticipatory_plan_with_pool(&world, &base, &pool, &est, &budget).unwrap();
        assert!(
            (cand.total() - brute).abs() < TOLERANCE,
            "instance {checked} ({}): anticipatory {} vs brute force {} ({} terminals)",
            base.label,
            cand.total(),
            brute,
            goal_nodes.len()
        );
        checked += 1;
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(300), "runtime {elapsed:?} exceeds 5 min");
    println!(
        "[criterion 1] oracle exactness: PASS ({INSTANCES}/{INSTANCES} instances equal within {TOLERANCE:.0e}, {:.1}s)",
        elapsed.as_secs_f64()
    );
}
