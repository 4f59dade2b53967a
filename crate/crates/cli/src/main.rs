//! Command-line frontend: world generation, planning, preparation,
//! estimator training, and the benchmark harness.

use antiplan::anticipate::{
    anticipatory_plan, AnticipationConfig, CostEstimator, OracleEstimator, TaskDistribution,
};
use antiplan::dataset::{generate_dataset, load_dataset, save_dataset, DatasetConfig};
use antiplan::generator::{generate_distribution, generate_world, GeneratorConfig};
use antiplan::harness::{
    aggregate, rows_to_csv, run_suite, summary_to_csv, summary_to_svg, EstimatorSpec, Regime,
    SuiteConfig, TrialResult,
};
use antiplan::io::{
    load_distribution, load_regressor, load_world, save_distribution, save_regressor,
    save_world,
};
use antiplan::nn::{train, LearnedEstimator, TrainConfig};
use antiplan::pddl::{export_domain, export_problem};
use antiplan::planner::{task_plan, SearchBudget};
use antiplan::prepare::{prepare_chains, preparation_cost, AnnealSchedule};
use antiplan::stats::spearman;
use antiplan::world::{TaskSpec, WorldState};
use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "antiplan", about = "Anticipatory task planning toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a world and its task distribution.
    Gen(GenArgs),
    /// Plan one task, myopically or anticipatorily.
    Plan(PlanArgs),
    /// Rearrange a world to lower its expected task cost.
    Prepare(PrepareArgs),
    /// Sample and label training data for the estimator.
    Datagen(DatagenArgs),
    /// Fit the cost regressor on a dataset.
    Train(TrainArgs),
    /// Score a trained regressor against oracle labels.
    EvalEstimator(EvalArgs),
    /// Run or report benchmark suites.
    #[command(subcommand)]
    Bench(BenchCommand),
    /// Export a task instance as planning-domain text documents.
    Export(ExportArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value = "restaurant")]
    profile: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Grid size as WIDTHxHEIGHT.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    containers: Option<usize>,
    #[arg(long)]
    objects: Option<usize>,
    /// Cap on the number of distribution entries.
    #[arg(long)]
    max_tasks: Option<usize>,
    /// Successive task weights scale by this ratio; 1 means uniform.
    #[arg(long)]
    weight_ratio: Option<f64>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct EstimatorArgs {
    /// `oracle` or `learned`.
    #[arg(long, default_value = "oracle")]
    estimator: String,
    /// Trained parameter file, required with `--estimator learned`.
    #[arg(long)]
    params: Option<PathBuf>,
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long)]
    world: PathBuf,
    #[arg(long)]
    dist: PathBuf,
    /// Task label from the distribution file.
    #[arg(long)]
    task: String,
    /// `myopic` or `anticipatory`.
    #[arg(long, default_value = "myopic")]
    mode: String,
    #[command(flatten)]
    estimator: EstimatorArgs,
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[arg(long, default_value_t = 3)]
    radius: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the executed plan's terminal world here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PrepareArgs {
    #[arg(long)]
    world: PathBuf,
    #[arg(long)]
    dist: PathBuf,
    #[command(flatten)]
    estimator: EstimatorArgs,
    #[arg(long, default_value_t = 2000)]
    iterations: usize,
    #[arg(long)]
    t0: Option<f64>,
    #[arg(long, default_value_t = 0.999)]
    decay: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    chains: usize,
    /// Where to write the prepared world.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DatagenArgs {
    #[arg(long)]
    world: PathBuf,
    #[arg(long)]
    dist: PathBuf,
    #[arg(long, default_value_t = 100)]
    states: usize,
    #[arg(long, default_value_t = 6)]
    chain_max: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Per-epoch loss trace CSV.
    #[arg(long)]
    loss_csv: Option<PathBuf>,
    #[arg(long, default_value_t = 64)]
    hidden: usize,
    #[arg(long, default_value_t = 4)]
    layers: usize,
    #[arg(long, default_value_t = 10)]
    epochs: usize,
    #[arg(long, default_value_t = 0.01)]
    lr: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    params: PathBuf,
    /// Report CSV (MAE and Spearman rank correlation).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum BenchCommand {
    /// Write a default desk-scale suite file.
    Init {
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every trial in a suite file.
    Run {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        /// Trained parameter file for suites with a learned estimator.
        #[arg(long)]
        params: Option<PathBuf>,
    },
    /// Summarize previously written trial rows.
    Report {
        #[arg(long, name = "in")]
        in_dir: PathBuf,
        /// Also render the cost curves as SVG.
        #[arg(long)]
        plot: bool,
    },
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    world: PathBuf,
    #[arg(long)]
    dist: PathBuf,
    #[arg(long)]
    task: String,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Gen(a) => cmd_gen(a),
        Command::Plan(a) => cmd_plan(a),
        Command::Prepare(a) => cmd_prepare(a),
        Command::Datagen(a) => cmd_datagen(a),
        Command::Train(a) => cmd_train(a),
        Command::EvalEstimator(a) => cmd_eval(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Export(a) => cmd_export(a),
    }
}

fn parse_grid(s: &str) -> Result<(u32, u32)> {
    let (w, h) = s
        .split_once('x')
        .ok_or_else(|| anyhow!("grid must look like 20x12"))?;
    Ok((w.parse()?, h.parse()?))
}

fn load_pair(world: &Path, dist: &Path) -> Result<(WorldState, TaskDistribution)> {
    let state = load_world(world).with_context(|| format!("loading {}", world.display()))?;
    let dist =
        load_distribution(dist, &state.model).with_context(|| format!("loading {}", dist.display()))?;
    Ok((state, dist))
}

fn make_estimator(
    args: &EstimatorArgs,
    dist: &TaskDistribution,
) -> Result<Box<dyn CostEstimator>> {
    match args.estimator.as_str() {
        "oracle" => Ok(Box::new(OracleEstimator::new(
            dist.clone(),
            SearchBudget::default(),
        ))),
        "learned" => {
            let path = args
                .params
                .as_ref()
                .ok_or_else(|| anyhow!("--estimator learned requires --params"))?;
            Ok(Box::new(LearnedEstimator::new(load_regressor(path)?)))
        }
        other => bail!("unknown estimator `{other}` (expected oracle or learned)"),
    }
}

fn find_task(dist: &TaskDistribution, label: &str) -> Result<TaskSpec> {
    dist.entries()
        .iter()
        .find(|(t, _)| t.label == label)
        .map(|(t, _)| t.clone())
        .ok_or_else(|| anyhow!("no task labelled `{label}` in the distribution"))
}

fn cmd_gen(a: GenArgs) -> Result<()> {
    let mut cfg = match a.profile.as_str() {
        "restaurant" => GeneratorConfig::restaurant(a.seed),
        "home" => GeneratorConfig::home(a.seed),
        other => bail!("unknown profile `{other}`"),
    };
    if let Some(grid) = &a.grid {
        let (w, h) = parse_grid(grid)?;
        cfg.width = w;
        cfg.height = h;
    }
    if let Some(c) = a.containers {
        cfg.container_count = c;
    }
    if let Some(o) = a.objects {
        cfg.object_count = o;
    }
    if let Some(n) = a.max_tasks {
        cfg.task_count_min = cfg.task_count_min.min(n);
        cfg.task_count_max = n;
    }
    if let Some(r) = a.weight_ratio {
        cfg.weight_ratio = r;
    }
    let world = generate_world(&cfg)?;
    let dist = generate_distribution(&world, &cfg, a.seed)?;
    std::fs::create_dir_all(&a.out_dir)?;
    let world_path = a.out_dir.join("world.json");
    let dist_path = a.out_dir.join("distribution.json");
    save_world(&world, &world_path)?;
    save_distribution(&dist, &world.model, &dist_path)?;
    println!(
        "wrote {} ({} entities) and {} ({} tasks)",
        world_path.display(),
        world.model.entities.len(),
        dist_path.display(),
        dist.len()
    );
    Ok(())
}

fn cmd_plan(a: PlanArgs) -> Result<()> {
    let (state, dist) = load_pair(&a.world, &a.dist)?;
    let task = find_task(&dist, &a.task)?;
    let budget = SearchBudget::default();
    let plan = match a.mode.as_str() {
        "myopic" => task_plan(&state, &task, &budget)?,
        "anticipatory" => {
            let estimator = make_estimator(&a.estimator, &dist)?;
            let cfg = AnticipationConfig {
                n_samples: a.samples,
                radius: a.radius,
                rng_seed: a.seed,
                ..Default::default()
            };
            let cand = anticipatory_plan(&state, &task, estimator.as_ref(), &cfg, &budget)?;
            println!(
                "objective: immediate {} + anticipatory {:.3} = {:.3}",
                cand.immediate,
                cand.anticipatory,
                cand.total()
            );
            cand.plan
        }
        other => bail!("unknown mode `{other}` (expected myopic or anticipatory)"),
    };
    for (i, action) in plan.actions.iter().enumerate() {
        println!("{i:3}  {action}");
    }
    println!(
        "total cost {} ({} actions, optimal: {}, {} expansions)",
        plan.total_cost,
        plan.actions.len(),
        plan.optimal,
        plan.expansions
    );
    if let Some(out) = &a.out {
        save_world(&plan.terminal, out)?;
        println!("terminal world written to {}", out.display());
    }
    Ok(())
}

fn cmd_prepare(a: PrepareArgs) -> Result<()> {
    let (state, dist) = load_pair(&a.world, &a.dist)?;
    let estimator = make_estimator(&a.estimator, &dist)?;
    let sched = AnnealSchedule {
        iterations: a.iterations,
        t0: a.t0,
        decay: a.decay,
        rng_seed: a.seed,
    };
    let (prepared, stats) = prepare_chains(&state, estimator.as_ref(), &sched, a.chains)?;
    save_world(&prepared, &a.out)?;
    println!(
        "expected task cost {:.3} -> {:.3} ({} proposals, {} accepted)",
        stats.initial_estimate, stats.final_estimate, stats.proposed, stats.accepted
    );
    match preparation_cost(&state, &prepared, &SearchBudget::default()) {
        Ok((cost, _)) => println!("preparation realizable by the robot at cost {cost}"),
        Err(_) => println!("preparation changes flags the robot cannot set; cost not reported"),
    }
    println!("prepared world written to {}", a.out.display());
    Ok(())
}

fn cmd_datagen(a: DatagenArgs) -> Result<()> {
    let (state, dist) = load_pair(&a.world, &a.dist)?;
    let cfg = DatasetConfig {
        n_states: a.states,
        max_chain_length: a.chain_max,
        rng_seed: a.seed,
        ..Default::default()
    };
    let (dataset, report) = generate_dataset(&state, &dist, &cfg)?;
    save_dataset(&dataset, &a.out)?;
    for line in &report.skipped {
        eprintln!("skipped: {line}");
    }
    println!(
        "wrote {} ({} data, {} skipped)",
        a.out.display(),
        report.generated,
        report.skipped.len()
    );
    Ok(())
}

fn cmd_train(a: TrainArgs) -> Result<()> {
    let dataset = load_dataset(&a.dataset)?;
    let cfg = TrainConfig {
        hidden_dim: a.hidden,
        n_layers: a.layers,
        epochs: a.epochs,
        learning_rate: a.lr,
        seed: a.seed,
        ..Default::default()
    };
    let (model, report) = train(&dataset.examples(), &dataset.spec, &cfg)?;
    save_regressor(&model, &a.out)?;
    if let Some(path) = &a.loss_csv {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["epoch", "mae"])?;
        for (i, loss) in report.epoch_losses.iter().enumerate() {
            w.write_record([i.to_string(), format!("{loss:.6}")])?;
        }
        std::fs::write(path, w.into_inner()?)?;
    }
    println!(
        "trained {} epochs ({} steps), final epoch MAE {:.3}; params written to {}",
        report.epoch_losses.len(),
        report.steps,
        report.epoch_losses.last().copied().unwrap_or(f64::NAN),
        a.out.display()
    );
    Ok(())
}

fn cmd_eval(a: EvalArgs) -> Result<()> {
    let dataset = load_dataset(&a.dataset)?;
    let model = load_regressor(&a.params)?;
    let mut preds = Vec::new();
    let mut labels = Vec::new();
    for d in &dataset.data {
        preds.push(model.predict(&d.graph)?);
        labels.push(d.label);
    }
    let mae = preds
        .iter()
        .zip(labels.iter())
        .map(|(p, l)| (p - l).abs())
        .sum::<f64>()
        / preds.len() as f64;
    let rho = spearman(&preds, &labels);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["metric", "value"])?;
    w.write_record(["n", &dataset.data.len().to_string()])?;
    w.write_record(["mae", &format!("{mae:.6}")])?;
    w.write_record(["spearman", &format!("{rho:.6}")])?;
    std::fs::write(&a.out, w.into_inner()?)?;
    println!("n={} mae={mae:.3} spearman={rho:.3}", dataset.data.len());
    Ok(())
}

fn cmd_bench(cmd: BenchCommand) -> Result<()> {
    match cmd {
        BenchCommand::Init { out } => {
            let cfg = SuiteConfig::desk_scale_restaurant();
            std::fs::write(&out, serde_json::to_string_pretty(&cfg)?)?;
            println!("suite template written to {}", out.display());
            Ok(())
        }
        BenchCommand::Run {
            suite,
            out_dir,
            params,
        } => {
            let cfg: SuiteConfig = serde_json::from_str(&std::fs::read_to_string(&suite)?)?;
            let learned = match (&cfg.estimator, &params) {
                (EstimatorSpec::Learned { params: p }, None) => Some(load_regressor(Path::new(p))?),
                (_, Some(p)) => Some(load_regressor(p)?),
                (EstimatorSpec::Oracle, None) => None,
            };
            let outcome = run_suite(&cfg, learned.as_ref())?;
            std::fs::create_dir_all(&out_dir)?;
            let mut rows = String::new();
            for (i, (seed, results)) in outcome.per_seed.iter().enumerate() {
                let csv = rows_to_csv(*seed, results);
                // keep one header line for the whole file
                if i == 0 {
                    rows.push_str(&csv);
                } else {
                    rows.push_str(csv.split_once('\n').map(|x| x.1).unwrap_or(""));
                }
            }
            std::fs::write(out_dir.join("rows.csv"), rows)?;
            let summary = summary_to_csv(&outcome.summary);
            std::fs::write(out_dir.join("summary.csv"), &summary)?;
            print!("{summary}");
            Ok(())
        }
        BenchCommand::Report { in_dir, plot } => {
            let results = read_rows(&in_dir.join("rows.csv"))?;
            let summary = aggregate(&results)?;
            let csv = summary_to_csv(&summary);
            std::fs::write(in_dir.join("summary.csv"), &csv)?;
            if plot {
                std::fs::write(in_dir.join("curves.svg"), summary_to_svg(&summary))?;
            }
            print!("{csv}");
            Ok(())
        }
    }
}

/// Rebuilds per-trial results from a rows CSV (prep costs are not part of
/// the row schema and are absent from re-aggregated summaries).
fn read_rows(path: &Path) -> Result<Vec<TrialResult>> {
    use antiplan::cost::Cost;
    use antiplan::harness::TaskRow;
    let mut reader = csv::Reader::from_path(path)?;
    let mut groups: Vec<((String, String), Vec<TaskRow>)> = Vec::new();
    for record in reader.records() {
        let r = record?;
        let key = (r[0].to_string(), r[1].to_string());
        let row = TaskRow {
            index: r[2].parse()?,
            label: r[3].to_string(),
            immediate: Cost::from_units(r[4].parse()?),
            anticipatory_estimate: r[5].parse()?,
            wall_ms: 0.0,
            expansions: r[6].parse()?,
        };
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, rows)) => rows.push(row),
            None => groups.push((key, vec![row])),
        }
    }
    groups
        .into_iter()
        .map(|((_, regime), rows)| {
            let regime = Regime::parse(&regime)
                .ok_or_else(|| anyhow!("unknown regime `{regime}` in rows file"))?;
            let total = rows.iter().map(|r| r.immediate).sum();
            Ok(TrialResult {
                regime,
                rows,
                total_immediate: total,
                prep_cost: None,
                prep_stats: None,
            })
        })
        .collect()
}

fn cmd_export(a: ExportArgs) -> Result<()> {
    let (state, dist) = load_pair(&a.world, &a.dist)?;
    let task = find_task(&dist, &a.task)?;
    std::fs::create_dir_all(&a.out_dir)?;
    let domain = a.out_dir.join("domain.pddl");
    let problem = a.out_dir.join("problem.pddl");
    std::fs::write(&domain, export_domain(&state))?;
    std::fs::write(&problem, export_problem(&state, &task))?;
    println!("wrote {} and {}", domain.display(), problem.display());
    Ok(())
}
