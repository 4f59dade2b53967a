use antiplan::anticipate::*;
use antiplan::generator::*;
use antiplan::harness::SuiteConfig;
use antiplan::planner::*;

fn main() {
    let mut suite = SuiteConfig::desk_scale_restaurant();
    suite.grid = [22, 12];
    suite.containers = 5;
    suite.objects = 5;
    suite.samples = 5;
    suite.max_tasks = 10;
    suite.weight_ratio = 0.65;
    let budget = SearchBudget {
        max_expansions: 250_000,
        max_time: std::time::Duration::from_secs(3600),
    };
    for seed in [0u64, 1, 3, 4, 5] {
        let gen_cfg = suite.generator(seed).unwrap();
        let world = generate_world(&gen_cfg).unwrap();
        let dist = generate_distribution(&world, &gen_cfg, seed).unwrap();
        println!("== seed {seed}: {} tasks ==", dist.len());
        let est = OracleEstimator::new(dist.clone(), budget.clone());
        for (task, w) in dist.entries() {
            let myopic = task_plan(&world, task, &budget).unwrap();
            let base_est = est.estimate(myopic.tail()).unwrap();
            let my_total = myopic.total_cost.as_f64() + base_est;
            let cfg = AnticipationConfig {
                n_samples: suite.samples,
                radius: suite.radius,
                rng_seed: seed,
                ..Default::default()
            };
            let pool = augmentation_pool(&world, task, &myopic, cfg.radius);
            let sampled = sample_augmented_tasks(&world, task, &myopic, &cfg);
            let kept =
                filter_augmented_tasks(&sampled, myopic.tail(), &est, base_est).unwrap();
            let cand = anticipatory_plan(&world, task, &est, &cfg, &budget).unwrap();
            println!(
                "task {} (w {:.3}): pool {} sampled {} kept {} | myopic {:.3} ant {:.3} gain {:.3}",
                task.label, w, pool.len(), sampled.len(), kept.len(),
                my_total, cand.total(), my_total - cand.total()
            );
            for k in &kept {
                match task_plan(&world, &k.combined, &budget) {
                    Ok(p) => {
                        let t = est.estimate(p.tail()).unwrap();
                        println!(
                            "    kept {:?}: imm {:.3} (myo imm {:.3}) est {:.3} (base {:.3}) total {:.3}",
                            k.added, p.total_cost.as_f64(), myopic.total_cost.as_f64(), t, base_est,
                            p.total_cost.as_f64() + t
                        );
                    }
                    Err(e) => println!("    kept {:?}: plan failed {e:?}", k.added),
                }
            }
        }
    }
}
