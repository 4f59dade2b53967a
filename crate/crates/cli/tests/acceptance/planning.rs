//! Criterion 2: planner optimality against uniform-cost search, and
//! heuristic admissibility on sampled states.

use crate::support;
use antiplan::planner::{heuristic, task_plan, SearchBudget};
use rand::seq::SliceRandom;
use rand::Rng;

const ORACLE_CAP: usize = 2_000_000;

#[test]
fn criterion_2_planner_optimality() {
    let mut rng = support::rng(0xAC02);
    let budget = SearchBudget::default();

    let mut instances = 0usize;
    while instances < 50 {
        let world = support::tiny_world(&mut rng);
        for task in support::tiny_tasks(&world, &mut rng, 3) {
            let Some(oracle) = support::ucs_cost(&world, &task, ORACLE_CAP) else {
                continue;
            };
            let plan = task_plan(&world, &task, &budget).unwrap();
            assert!(plan.optimal, "instance {instances}: budget tripped on a tiny world");
            assert_eq!(
                plan.total_cost, oracle,
                "instance {instances} ({}): planner {} vs uniform-cost search {}",
                task.label, plan.total_cost, oracle
            );
            instances += 1;
        }
    }

    let mut pairs = 0usize;
    while pairs < 1000 {
        let world = support::tiny_world(&mut rng);
        let tasks = support::tiny_tasks(&world, &mut rng, 2);
        let mut s = world.clone();
        for _ in 0..rng.gen_range(0..8) {
            let acts = s.applicable_actions();
            let Some(a) = acts.choose(&mut rng) else { break };
            s = s.apply(a).unwrap();
        }
        for task in &tasks {
            let Some(h) = heuristic(&s, task) else {
                // a None heuristic claims unsolvability; the oracle must agree
                assert!(
                    support::ucs_cost(&s, task, ORACLE_CAP).is_none(),
                    "heuristic rejected a solvable instance ({})",
                    task.label
                );
                continue;
            };
            let Some(exact) = support::ucs_cost(&s, task, ORACLE_CAP) else {
                continue;
            };
            assert!(
                h <= exact,
                "pair {pairs} ({}): heuristic {} exceeds optimal remaining {}",
                task.label,
                h,
                exact
            );
            pairs += 1;
        }
    }
    println!(
        "[criterion 2] planner optimality: PASS (50/50 instances exact, 1000/1000 admissible pairs)"
    );
}
