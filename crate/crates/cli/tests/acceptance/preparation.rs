//! Criterion 5: preparation never worsens the estimate, and on tiny worlds
//! annealing lands within 5% of the exhaustive arrangement minimum.

use crate::support;
use antiplan::anticipate::{CostEstimator, OracleEstimator, TaskDistribution};
use antiplan::planner::SearchBudget;
use antiplan::prepare::{prepare_chains, AnnealSchedule};
use antiplan::world::{CleanState, FillState, Predicate};
use antiplan::WorldState;
use rand::Rng;
use std::time::Duration;

/// Minimum estimator value over the whole perturbation closure: every
/// object placement crossed with every reachable clean and fill flag.
fn exhaustive_min(s0: &WorldState, est: &OracleEstimator) -> f64 {
    let m = &s0.model;
    let mut option_sets: Vec<Vec<Vec<Predicate>>> = Vec::new();
    for &o in &m.movables {
        let mut opts: Vec<Vec<Predicate>> = vec![Vec::new()];
        let mut cross = |alts: Vec<Predicate>, opts: &mut Vec<Vec<Predicate>>| {
            let prev = std::mem::take(opts);
            for p in prev {
                for &a in &alts {
                    let mut v = p.clone();
                    v.push(a);
                    opts.push(v);
                }
            }
        };
        cross(m.containers.iter().map(|&c| Predicate::In(o, c)).collect(), &mut opts);
        if s0.clean_of(o) != CleanState::NA {
            cross(vec![Predicate::Clean(o), Predicate::Dirty(o)], &mut opts);
        }
        if s0.fill_of(o) != FillState::NA {
            // water can always be drawn and liquids dumped; other liquids
            // only persist from the start state, which begins water-or-empty
            let water = m.water.unwrap();
            cross(vec![Predicate::Empty(o), Predicate::FilledWith(o, water)], &mut opts);
        }
        option_sets.push(opts);
    }
    let mut best = f64::INFINITY;
    let mut stack: Vec<Predicate> = Vec::new();
    fn recurse(
        s0: &WorldState,
        est: &OracleEstimator,
        sets: &[Vec<Vec<Predicate>>],
        stack: &mut Vec<Predicate>,
        best: &mut f64,
    ) {
        match sets.split_first() {
            None => {
                let state = s0.impose(stack).unwrap();
                let v = est.estimate(&state).unwrap();
                if v < *best {
                    *best = v;
                }
            }
            Some((opts, rest)) => {
                for opt in opts {
                    let len = stack.len();
                    stack.extend(opt.iter().copied());
                    recurse(s0, est, rest, stack, best);
                    stack.truncate(len);
                }
            }
        }
    }
    recurse(s0, est, &option_sets, &mut stack, &mut best);
    best
}

#[test]
fn criterion_5_preparation_effectiveness() {
    let mut rng = support::rng(0xAC05);
    let budget = SearchBudget::new(2_000_000, Duration::from_secs(3600));
    let mut within = 0usize;
    for seed in 0..20u64 {
        let world = support::tiny_world(&mut rng);
        let entries: Vec<_> = support::tiny_tasks(&world, &mut rng, 3)
            .into_iter()
            .map(|t| (t, rng.gen_range(0.5..2.0)))
            .collect();
        let dist = TaskDistribution::normalized(entries).unwrap();
        let est = OracleEstimator::new(dist, budget.clone());
        let before = est.estimate(&world).unwrap();

        let sched = AnnealSchedule {
            iterations: 300,
            t0: None,
            decay: 0.98,
            rng_seed: seed,
        };
        let (out, stats) = prepare_chains(&world, &est, &sched, 2).unwrap();
        let after = est.estimate(&out).unwrap();
        assert!(
            after <= before + 1e-12,
            "seed {seed}: preparation worsened the estimate ({before} -> {after})"
        );
        assert!((after - stats.final_estimate).abs() < 1e-12);

        let floor = exhaustive_min(&world, &est);
        assert!(after >= floor - 1e-9, "seed {seed}: anneal beat the exhaustive minimum?");
        if after <= floor * 1.05 + 1e-9 {
            within += 1;
        }
    }
    assert!(within >= 16, "only {within}/20 seeds within 5% of the exhaustive minimum");
    println!(
        "[criterion 5] preparation: PASS (20/20 never worsened, {within}/20 within 5% of exhaustive minimum)"
    );
}
