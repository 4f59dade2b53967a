//! Benchmark harness: persistent task sequences under four planning
//! regimes, with CSV/summary/plot emission.
//!
//! A trial draws an i.i.d. task sequence from the distribution and executes
//! it against one evolving world: the terminal state of each executed plan
//! is the initial state of the next task. Preparation regimes rearrange the
//! world once up front; the rearrangement effort is reported separately and
//! excluded from per-task averages.
//!
//! Output files never contain wall-clock values, so fixed seeds reproduce
//! them byte for byte; timing lives only in the in-memory rows and console
//! reporting.

use crate::anticipate::{
    anticipatory_plan, AnticipationConfig, CostEstimator, OracleEstimator, TaskDistribution,
};
use crate::cost::Cost;
use crate::error::HarnessError;
use crate::generator::{generate_distribution, generate_world, GeneratorConfig};
use crate::planner::{task_plan, SearchBudget};
use crate::prepare::{prepare, preparation_cost, AnnealSchedule, PrepareStats};
use crate::stats::wilcoxon_one_sided_less;
use crate::world::WorldState;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::time::Instant;

pub const RESULT_CSV_VERSION: u32 = 1;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Myopic,
    Anticipatory,
    PrepMyopic,
    PrepAnticipatory,
}

impl Regime {
    pub const ALL: [Regime; 4] = [
        Regime::Myopic,
        Regime::Anticipatory,
        Regime::PrepMyopic,
        Regime::PrepAnticipatory,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Regime::Myopic => "myopic",
            Regime::Anticipatory => "anticipatory",
            Regime::PrepMyopic => "prep+myopic",
            Regime::PrepAnticipatory => "prep+anticipatory",
        }
    }

    pub fn parse(s: &str) -> Option<Regime> {
        match s {
            "myopic" => Some(Regime::Myopic),
            "anticipatory" => Some(Regime::Anticipatory),
            "prep+myopic" | "prep-myopic" => Some(Regime::PrepMyopic),
            "prep+anticipatory" | "prep-anticipatory" => Some(Regime::PrepAnticipatory),
            _ => None,
        }
    }

    pub fn prepares(self) -> bool {
        matches!(self, Regime::PrepMyopic | Regime::PrepAnticipatory)
    }

    pub fn anticipates(self) -> bool {
        matches!(self, Regime::Anticipatory | Regime::PrepAnticipatory)
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug)]
pub struct TrialConfig {
    pub regime: Regime,
    pub sequence_length: usize,
    /// Seed of the i.i.d. task draw.
    pub task_seed: u64,
    pub budget: SearchBudget,
    pub anticipation: AnticipationConfig,
    pub anneal: AnnealSchedule,
}

#[derive(Clone, Debug)]
pub struct TaskRow {
    pub index: usize,
    pub label: String,
    pub immediate: Cost,
    /// Estimated expected future cost at the chosen terminal state.
    pub anticipatory_estimate: f64,
    pub wall_ms: f64,
    pub expansions: usize,
}

#[derive(Clone, Debug)]
pub struct TrialResult {
    pub regime: Regime,
    pub rows: Vec<TaskRow>,
    pub total_immediate: Cost,
    /// Cost of physically realizing the preparation, when it is realizable
    /// by robot actions from the initial state.
    pub prep_cost: Option<Cost>,
    pub prep_stats: Option<PrepareStats>,
}

impl TrialResult {
    pub fn mean_cost_per_task(&self) -> f64 {
        if self.rows.is_empty() {
            0.0
        } else {
            self.total_immediate.as_f64() / self.rows.len() as f64
        }
    }
}

/// Executes one task sequence under the configured regime.
pub fn run_sequence(
    s0: &WorldState,
    dist: &TaskDistribution,
    estimator: &dyn CostEstimator,
    cfg: &TrialConfig,
) -> Result<TrialResult, HarnessError> {
    let mut state = s0.clone();
    let mut prep_cost = None;
    let mut prep_stats = None;
    if cfg.regime.prepares() {
        let (prepared, stats) = prepare(&state, estimator, &cfg.anneal)?;
        // rearrangement effort, when the prepared state is reachable by
        // plain robot actions (flag changes such as dirtying are not)
        prep_cost = preparation_cost(&state, &prepared, &cfg.budget)
            .ok()
            .map(|(c, _)| c);
        prep_stats = Some(stats);
        state = prepared;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.task_seed);
    let mut rows = Vec::with_capacity(cfg.sequence_length);
    let mut total = Cost::ZERO;
    for index in 0..cfg.sequence_length {
        let (task, _) = &dist.entries()[dist.sample_index(&mut rng)];
        let begun = Instant::now();
        let (plan, estimate) = if cfg.regime.anticipates() {
            let anticipation = AnticipationConfig {
                rng_seed: cfg.anticipation.rng_seed.wrapping_add(index as u64),
                ..cfg.anticipation
            };
            let cand = anticipatory_plan(&state, task, estimator, &anticipation, &cfg.budget)
                .map_err(|e| match e {
                    crate::error::EstimatorError::Plan(source) => HarnessError::UnsolvableTask {
                        index,
                        label: task.label.clone(),
                        source,
                    },
                    other => HarnessError::Estimator(other),
                })?;
            (cand.plan, cand.anticipatory)
        } else {
            let plan = task_plan(&state, task, &cfg.budget).map_err(|source| {
                HarnessError::UnsolvableTask {
                    index,
                    label: task.label.clone(),
                    source,
                }
            })?;
            let estimate = estimator.estimate(&plan.terminal)?;
            (plan, estimate)
        };
        total += plan.total_cost;
        rows.push(TaskRow {
            index,
            label: task.label.clone(),
            immediate: plan.total_cost,
            anticipatory_estimate: estimate,
            wall_ms: begun.elapsed().as_secs_f64() * 1e3,
            expansions: plan.expansions,
        });
        state = plan.terminal;
    }
    Ok(TrialResult {
        regime: cfg.regime,
        rows,
        total_immediate: total,
        prep_cost,
        prep_stats,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RegimeSummary {
    pub regime: Regime,
    pub trials: usize,
    pub mean_cost_per_task: f64,
    /// Mean immediate cost at each sequence index (the cost-curve shape).
    pub per_index_mean: Vec<f64>,
    /// (myopic - this) / myopic, when a myopic baseline is present.
    pub percent_reduction_vs_myopic: Option<f64>,
    /// One-sided p-value that this regime's per-trial means are below the
    /// myopic baseline's, paired by trial order.
    pub p_vs_myopic: Option<f64>,
    pub mean_prep_cost: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub sequence_length: usize,
    pub regimes: Vec<RegimeSummary>,
}

/// Aggregates trials into per-regime means, cost curves, and baselined
/// reductions. All trials must share one sequence length.
pub fn aggregate(results: &[TrialResult]) -> Result<Summary, HarnessError> {
    let Some(first) = results.first() else {
        return Err(HarnessError::Other("no trial results to aggregate".into()));
    };
    let len = first.rows.len();
    if results.iter().any(|r| r.rows.len() != len) {
        return Err(HarnessError::MixedLengthInputs);
    }
    let per_trial_mean = |r: &TrialResult| r.mean_cost_per_task();
    let myopic_means: Vec<f64> = results
        .iter()
        .filter(|r| r.regime == Regime::Myopic)
        .map(per_trial_mean)
        .collect();
    let myopic_mean = if myopic_means.is_empty() {
        None
    } else {
        Some(myopic_means.iter().sum::<f64>() / myopic_means.len() as f64)
    };
    let mut regimes = Vec::new();
    for regime in Regime::ALL {
        let group: Vec<&TrialResult> =
            results.iter().filter(|r| r.regime == regime).collect();
        if group.is_empty() {
            continue;
        }
        let means: Vec<f64> = group.iter().map(|r| per_trial_mean(r)).collect();
        let mean = means.iter().sum::<f64>() / means.len() as f64;
        let mut per_index_mean = vec![0.0; len];
        for r in &group {
            for row in &r.rows {
                per_index_mean[row.index] += row.immediate.as_f64();
            }
        }
        for v in per_index_mean.iter_mut() {
            *v /= group.len() as f64;
        }
        let prep: Vec<f64> = group
            .iter()
            .filter_map(|r| r.prep_cost.map(|c| c.as_f64()))
            .collect();
        let (reduction, p) = match (regime, myopic_mean) {
            (Regime::Myopic, _) | (_, None) => (None, None),
            (_, Some(base)) => {
                let p = if means.len() == myopic_means.len() {
                    Some(wilcoxon_one_sided_less(&means, &myopic_means))
                } else {
                    None
                };
                (Some((base - mean) / base), p)
            }
        };
        regimes.push(RegimeSummary {
            regime,
            trials: group.len(),
            mean_cost_per_task: mean,
            per_index_mean,
            percent_reduction_vs_myopic: reduction,
            p_vs_myopic: p,
            mean_prep_cost: if prep.is_empty() {
                None
            } else {
                Some(prep.iter().sum::<f64>() / prep.len() as f64)
            },
        });
    }
    Ok(Summary {
        sequence_length: len,
        regimes,
    })
}

/// Per-task rows of one trial as CSV. Schema (version 1):
/// `seed,regime,index,label,immediate,anticipatory_estimate,expansions`.
pub fn rows_to_csv(seed: u64, results: &[TrialResult]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "seed",
        "regime",
        "index",
        "label",
        "immediate",
        "anticipatory_estimate",
        "expansions",
    ])
    .unwrap();
    for r in results {
        for row in &r.rows {
            w.write_record([
                seed.to_string(),
                r.regime.name().to_string(),
                row.index.to_string(),
                row.label.clone(),
                format!("{}", row.immediate),
                format!("{:.3}", row.anticipatory_estimate),
                row.expansions.to_string(),
            ])
            .unwrap();
        }
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

/// Summary CSV: one row per regime.
pub fn summary_to_csv(summary: &Summary) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "regime",
        "trials",
        "mean_cost_per_task",
        "percent_reduction_vs_myopic",
        "p_vs_myopic",
        "mean_prep_cost",
    ])
    .unwrap();
    let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.6}"));
    for r in &summary.regimes {
        w.write_record([
            r.regime.name().to_string(),
            r.trials.to_string(),
            format!("{:.3}", r.mean_cost_per_task),
            opt(r.percent_reduction_vs_myopic),
            opt(r.p_vs_myopic),
            opt(r.mean_prep_cost),
        ])
        .unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

/// Renders the per-index mean-cost curves as a small standalone SVG.
pub fn summary_to_svg(summary: &Summary) -> String {
    let (w, h, ml, mb) = (640.0_f64, 400.0_f64, 60.0_f64, 40.0_f64);
    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
    let max_y = summary
        .regimes
        .iter()
        .flat_map(|r| r.per_index_mean.iter())
        .fold(1e-9_f64, |a, &b| a.max(b));
    let n = summary.sequence_length.max(2);
    let x_of = |i: usize| ml + (w - ml - 20.0) * i as f64 / (n - 1) as f64;
    let y_of = |v: f64| (h - mb) - (h - mb - 20.0) * v / max_y;
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
         viewBox=\"0 0 {w} {h}\">\n<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n"
    ));
    svg.push_str(&format!(
        "<line x1=\"{ml}\" y1=\"20\" x2=\"{ml}\" y2=\"{y0}\" stroke=\"black\"/>\n\
         <line x1=\"{ml}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>\n",
        y0 = h - mb,
        x1 = w - 20.0
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"12\">task index</text>\n\
         <text x=\"12\" y=\"16\" font-size=\"12\">mean cost per task</text>\n",
        w / 2.0 - 30.0,
        h - 10.0
    ));
    for (k, r) in summary.regimes.iter().enumerate() {
        let color = colors[k % colors.len()];
        let points: Vec<String> = r
            .per_index_mean
            .iter()
            .enumerate()
            .map(|(i, &v)| format!("{:.1},{:.1}", x_of(i), y_of(v)))
            .collect();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" \
             points=\"{}\"/>\n",
            points.join(" ")
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"{color}\">{}</text>\n",
            w - 180.0,
            30.0 + 16.0 * k as f64,
            r.regime.name()
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorSpec {
    Oracle,
    Learned { params: String },
}

/// A benchmark suite: one generated environment per seed, every listed
/// regime run on the same drawn task sequence.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub version: u32,
    pub profile: String,
    pub environments: usize,
    pub base_seed: u64,
    pub sequence_length: usize,
    pub regimes: Vec<Regime>,
    pub estimator: EstimatorSpec,
    pub grid: [u32; 2],
    pub containers: usize,
    pub objects: usize,
    pub samples: usize,
    /// Bounded-region radius for augmentation sampling, in cells.
    pub radius: u32,
    /// Cap on distribution size; every oracle estimate solves each entry.
    pub max_tasks: usize,
    /// Geometric task-weight ratio; 1.0 is uniform.
    pub weight_ratio: f64,
    pub anneal_iterations: usize,
    pub max_expansions: usize,
    pub probe_expansions: usize,
}

impl SuiteConfig {
    pub fn desk_scale_restaurant() -> SuiteConfig {
        SuiteConfig {
            version: 1,
            profile: "restaurant".into(),
            environments: 50,
            base_seed: 0,
            sequence_length: 10,
            regimes: Regime::ALL.to_vec(),
            estimator: EstimatorSpec::Oracle,
            grid: [24, 14],
            containers: 5,
            objects: 5,
            samples: 8,
            radius: 3,
            max_tasks: 12,
            weight_ratio: 0.65,
            anneal_iterations: 60,
            max_expansions: 400_000,
            probe_expansions: 30_000,
        }
    }

    pub fn generator(&self, seed: u64) -> Result<GeneratorConfig, HarnessError> {
        let base = match self.profile.as_str() {
            "restaurant" => GeneratorConfig::restaurant(seed),
            "home" => GeneratorConfig::home(seed),
            other => {
                return Err(HarnessError::Other(format!("unknown profile `{other}`")))
            }
        };
        Ok(GeneratorConfig {
            width: self.grid[0],
            height: self.grid[1],
            container_count: self.containers,
            object_count: self.objects,
            task_count_min: self.max_tasks.min(base.task_count_min),
            task_count_max: self.max_tasks,
            weight_ratio: self.weight_ratio,
            probe_expansions: self.probe_expansions,
            ..base
        })
    }
}

pub struct SuiteOutcome {
    /// (environment seed, per-regime results for that environment).
    pub per_seed: Vec<(u64, Vec<TrialResult>)>,
    pub summary: Summary,
}

/// Runs the whole suite, parallel across environments.
pub fn run_suite(
    cfg: &SuiteConfig,
    learned: Option<&crate::nn::Regressor>,
) -> Result<SuiteOutcome, HarnessError> {
    if matches!(cfg.estimator, EstimatorSpec::Learned { .. }) && learned.is_none() {
        return Err(HarnessError::Other(
            "suite requests a learned estimator but none was supplied".into(),
        ));
    }
    let budget = SearchBudget {
        max_expansions: cfg.max_expansions,
        max_time: std::time::Duration::from_secs(3600),
    };
    let seeds: Vec<u64> = (0..cfg.environments as u64)
        .map(|i| cfg.base_seed.wrapping_add(i))
        .collect();
    let per_seed: Vec<Result<(u64, Vec<TrialResult>), HarnessError>> = seeds
        .par_iter()
        .map(|&seed| {
            let gen_cfg = cfg.generator(seed)?;
            let world = generate_world(&gen_cfg)
                .map_err(|e| HarnessError::Other(format!("seed {seed}: {e}")))?;
            let dist = generate_distribution(&world, &gen_cfg, seed)
                .map_err(|e| HarnessError::Other(format!("seed {seed}: {e}")))?;
            let oracle;
            let learned_est;
            let estimator: &dyn CostEstimator = match (&cfg.estimator, learned) {
                (EstimatorSpec::Oracle, _) => {
                    oracle = OracleEstimator::new(dist.clone(), budget.clone());
                    &oracle
                }
                (EstimatorSpec::Learned { .. }, Some(model)) => {
                    learned_est = crate::nn::LearnedEstimator::new(model.clone());
                    &learned_est
                }
                (EstimatorSpec::Learned { .. }, None) => unreachable!(),
            };
            let mut results = Vec::new();
            for &regime in &cfg.regimes {
                let trial = TrialConfig {
                    regime,
                    sequence_length: cfg.sequence_length,
                    task_seed: seed ^ 0x5eed_0000,
                    budget: budget.clone(),
                    anticipation: AnticipationConfig {
                        n_samples: cfg.samples,
                        radius: cfg.radius,
                        rng_seed: seed,
                        ..AnticipationConfig::default()
                    },
                    anneal: AnnealSchedule {
                        iterations: cfg.anneal_iterations,
                        rng_seed: seed,
                        ..AnnealSchedule::default()
                    },
                };
                results.push(run_sequence(&world, &dist, estimator, &trial)?);
            }
            Ok((seed, results))
        })
        .collect();
    let per_seed = per_seed.into_iter().collect::<Result<Vec<_>, _>>()?;
    let all: Vec<TrialResult> = per_seed
        .iter()
        .flat_map(|(_, rs)| rs.iter().cloned())
        .collect();
    let summary = aggregate(&all)?;
    Ok(SuiteOutcome { per_seed, summary })
}
