//! Criteria 4 and 7: anticipatory planning must beat the myopic baseline
//! across a benchmark suite, with the exact oracle and with a trained
//! regressor substituted for it.

use antiplan::dataset::{generate_dataset, DatasetConfig};
use antiplan::generator::{generate_distribution, generate_world};
use antiplan::harness::{run_suite, EstimatorSpec, Regime, RegimeSummary, SuiteConfig, Summary};
use antiplan::nn::{train, Regressor, TrainConfig};
use antiplan::planner::SearchBudget;
use std::time::Instant;

fn regime(s: &Summary, r: Regime) -> &RegimeSummary {
    s.regimes
        .iter()
        .find(|g| g.regime == r)
        .unwrap_or_else(|| panic!("missing regime {r}"))
}

fn assert_ordering(s: &Summary) {
    let myo = regime(s, Regime::Myopic);
    let ant = regime(s, Regime::Anticipatory);
    let pm = regime(s, Regime::PrepMyopic);
    let pa = regime(s, Regime::PrepAnticipatory);
    assert!(
        ant.mean_cost_per_task < myo.mean_cost_per_task,
        "anticipatory {} !< myopic {}",
        ant.mean_cost_per_task,
        myo.mean_cost_per_task
    );
    assert!(
        pa.mean_cost_per_task <= pm.mean_cost_per_task + 1e-9,
        "prep+anticipatory {} !<= prep+myopic {}",
        pa.mean_cost_per_task,
        pm.mean_cost_per_task
    );
    assert!(
        pm.mean_cost_per_task < myo.mean_cost_per_task,
        "prep+myopic {} !< myopic {}",
        pm.mean_cost_per_task,
        myo.mean_cost_per_task
    );
}

#[test]
fn criterion_4_anticipation_reduces_cost() {
    let start = Instant::now();
    let cfg = SuiteConfig::desk_scale_restaurant();
    let outcome = run_suite(&cfg, None).expect("suite run");
    let s = &outcome.summary;
    assert_ordering(s);
    let ant = regime(s, Regime::Anticipatory);
    let p = ant.p_vs_myopic.expect("paired p-value");
    let red = ant.percent_reduction_vs_myopic.expect("reduction");
    assert!(p < 0.05, "anticipatory vs myopic p = {p}");
    assert!(red >= 0.05, "anticipatory reduction {red} < 5%");
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs() < 1800,
        "suite took {elapsed:?}, budget is 30 minutes"
    );
    println!(
        "[criterion 4] directional benefit: PASS ({} envs, anticipatory {:.1}% below myopic, p = {:.4}, prep+anticipatory <= prep+myopic < myopic, {:.0?})",
        cfg.environments,
        red * 100.0,
        p,
        elapsed
    );
}

/// Trains a cost regressor on worlds drawn from generator seeds disjoint
/// from the benchmark suite's, so criterion 7 measures generalization.
fn train_cross_world(cfg: &SuiteConfig) -> Regressor {
    let budget = SearchBudget {
        max_expansions: cfg.max_expansions,
        max_time: std::time::Duration::from_secs(3600),
    };
    let mut examples = Vec::new();
    let mut spec = None;
    for seed in 1000..1020u64 {
        let gen = cfg.generator(seed).expect("generator config");
        let world = generate_world(&gen).expect("world");
        let dist = generate_distribution(&world, &gen, seed).expect("distribution");
        let dcfg = DatasetConfig {
            n_states: 25,
            max_chain_length: 6,
            budget: budget.clone(),
            rng_seed: seed,
        };
        let (ds, _) = generate_dataset(&world, &dist, &dcfg).expect("dataset");
        spec.get_or_insert(ds.spec.clone());
        examples.extend(ds.examples());
    }
    let tcfg = TrainConfig {
        hidden_dim: 32,
        n_layers: 3,
        learning_rate: 0.02,
        epochs: 30,
        batch_size: 8,
        seed: 7,
        ..TrainConfig::default()
    };
    let (model, _) = train(&examples, &spec.expect("feature spec"), &tcfg).expect("train");
    model
}

#[test]
fn criterion_7_learned_estimator_preserves_benefit() {
    let mut cfg = SuiteConfig::desk_scale_restaurant();
    let model = train_cross_world(&cfg);
    cfg.estimator = EstimatorSpec::Learned {
        params: "in-memory".into(),
    };
    let outcome = run_suite(&cfg, Some(&model)).expect("suite run");
    let s = &outcome.summary;
    let myo = regime(s, Regime::Myopic);
    let ant = regime(s, Regime::Anticipatory);
    assert!(
        ant.mean_cost_per_task < myo.mean_cost_per_task,
        "learned anticipatory {} !< myopic {}",
        ant.mean_cost_per_task,
        myo.mean_cost_per_task
    );
    let p = ant.p_vs_myopic.expect("paired p-value");
    assert!(p < 0.05, "learned anticipatory vs myopic p = {p}");
    println!(
        "[criterion 7] learned estimator benefit: PASS (anticipatory {:.1}% below myopic with trained regressor, p = {:.4})",
        ant.percent_reduction_vs_myopic.unwrap_or(0.0) * 100.0,
        p
    );
}
