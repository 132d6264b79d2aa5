use clap::{Args, Parser, Subcommand};
use embedded_hunter::bench::{
    plot::emit_plot, run_experiment, write_outcome, AlgorithmName, ExperimentConfig, Family,
};
use embedded_hunter::functions::{estimate_lipschitz, make_function, regret, FunctionName};
use embedded_hunter::optimizers::{
    default_h_max, embedded_hunter, random_search, resoo, sresoo, OptimizerConfig,
};
use embedded_hunter::spaces::LowPoint;
use embedded_hunter::theorychecks::{jl_check, matrix_norm_check, theorem1_check, BoundReport};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "ehunt", about = "Tree-search optimizers over random embeddings", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one optimizer on one test function and print the outcome.
    Run(RunArgs),
    /// Run a sweep family and write per-cell and aggregate CSVs.
    Experiment(ExperimentArgs),
    /// Monte-Carlo checks of the embedding's analytical bounds.
    TheoryCheck(TheoryArgs),
    /// Render SVG regret curves from an experiment CSV.
    Plot(PlotArgs),
}

#[derive(Args)]
struct RunArgs {
    /// ellipsoid | fletcherpowell | rosenbrock | ackley
    #[arg(long, default_value = "ellipsoid")]
    function: FunctionName,
    /// embedded_hunter | resoo | sresoo | random_search
    #[arg(long, default_value = "embedded_hunter")]
    algorithm: AlgorithmName,
    /// Explicit (high) dimension n.
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    /// Effective dimension of the function.
    #[arg(long, default_value_t = 10)]
    d_eff: usize,
    /// Search (low) dimension d.
    #[arg(long, default_value_t = 10)]
    d: usize,
    /// Evaluation budget v.
    #[arg(long, default_value_t = 10_000)]
    budget: u64,
    /// Embedding count / evaluation-cap factor M.
    #[arg(long, default_value_t = 5)]
    m: u64,
    #[arg(long, default_value_t = 0.3)]
    eta: f64,
    /// Partition factor K (odd, >= 3).
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Seed for the function instance (optimum placement).
    #[arg(long, default_value_t = 0)]
    function_seed: u64,
}

#[derive(Args)]
struct ExperimentArgs {
    /// TOML config file mirroring the experiment schema.
    #[arg(long)]
    config: Option<PathBuf>,
    /// convergence | scalability | embedding_number | effective_dimension |
    /// dimension_mismatch (required unless given in the config file)
    #[arg(long)]
    family: Option<Family>,
    /// Output CSV path; `<stem>_agg.csv` and `<stem>_skipped.csv` are
    /// written next to it.
    #[arg(long, default_value = "results.csv")]
    out: PathBuf,
    /// Use the reduced desk-scale profile (n=1000, v=2000, d=5, 10 reps).
    #[arg(long)]
    desk: bool,
    /// Override the swept values.
    #[arg(long, value_delimiter = ',')]
    swept: Option<Vec<u64>>,
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    m: Option<u64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    repetitions: Option<u64>,
    /// Comma-separated function names.
    #[arg(long, value_delimiter = ',')]
    functions: Option<Vec<FunctionName>>,
    /// Comma-separated algorithm names.
    #[arg(long, value_delimiter = ',')]
    algorithms: Option<Vec<AlgorithmName>>,
    #[arg(long)]
    seed: Option<u64>,
    /// Record real wall times (breaks byte-identical reruns).
    #[arg(long)]
    measure_time: bool,
}

#[derive(Args)]
struct TheoryArgs {
    /// mean-diff | matrix-norm | jl
    #[arg(long, default_value = "mean-diff")]
    check: String,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 50)]
    n: usize,
    #[arg(long, default_value_t = 5)]
    d: usize,
    /// Function for the mean-difference check.
    #[arg(long, default_value = "ackley")]
    function: FunctionName,
    #[arg(long, default_value_t = 2)]
    d_eff: usize,
    /// Norm of the probe point y (spread evenly over coordinates).
    #[arg(long, default_value_t = 1.0)]
    norm: f64,
    /// Distortion for the jl check.
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    /// Number of random probe points for the jl check.
    #[arg(long, default_value_t = 5)]
    points: usize,
    /// Optional CSV output path for the report.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    /// Per-cell CSV written by `experiment`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "plots")]
    out_dir: PathBuf,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), Box<dyn std::error::Error>> {
    match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Experiment(args) => cmd_experiment(args),
        Command::TheoryCheck(args) => cmd_theory(args),
        Command::Plot(args) => {
            let written = emit_plot(&args.input, &args.out_dir)?;
            for p in &written {
                println!("wrote {}", p.display());
            }
            Ok(())
        }
    }
}

fn cmd_run(args: RunArgs) -> Result<(), Box<dyn std::error::Error>> {
    let f = make_function(args.function, args.d_eff, args.n, args.function_seed)?;
    let cfg = OptimizerConfig {
        budget: args.budget,
        k: args.k,
        h_max: default_h_max(args.budget),
        m: args.m,
        eta: args.eta,
        d: args.d,
        seed: args.seed,
    };
    let result = match args.algorithm {
        AlgorithmName::EmbeddedHunter => embedded_hunter(&f, &cfg)?,
        AlgorithmName::Resoo => resoo(&f, &cfg)?,
        AlgorithmName::Sresoo => sresoo(&f, &cfg)?,
        AlgorithmName::RandomSearch => random_search(&f, &cfg)?,
    };
    println!("function:         {} (n={}, d_eff={})", args.function, args.n, args.d_eff);
    println!("algorithm:        {}", args.algorithm);
    println!("best value:       {}", result.best_value);
    println!("final regret:     {}", regret(&f, result.best_value)?);
    println!("evaluations used: {}", result.evaluations_used);
    println!("iterations:       {}", result.iterations);
    println!("stopped early:    {}", result.stopped_early);
    Ok(())
}

fn cmd_experiment(args: ExperimentArgs) -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg: ExperimentConfig = match (&args.config, args.family) {
        (Some(path), _) => toml::from_str(&std::fs::read_to_string(path)?)?,
        (None, Some(family)) if args.desk => ExperimentConfig::desk(family, 0),
        (None, Some(family)) => ExperimentConfig::new(family, 0),
        (None, None) => return Err("either --config or --family is required".into()),
    };
    if args.config.is_some() && args.desk {
        let seed = cfg.seed;
        cfg = ExperimentConfig {
            family: cfg.family,
            functions: cfg.functions.clone(),
            algorithms: cfg.algorithms.clone(),
            measure_time: cfg.measure_time,
            ..ExperimentConfig::desk(cfg.family, seed)
        };
    }
    if let Some(family) = args.family {
        cfg.family = family;
    }
    if let Some(v) = args.swept {
        cfg.swept = Some(v);
    }
    if let Some(v) = args.budget {
        cfg.budget = v;
    }
    if let Some(v) = args.n {
        cfg.n = v;
    }
    if let Some(v) = args.d {
        cfg.d = v;
    }
    if let Some(v) = args.m {
        cfg.m = v;
    }
    if let Some(v) = args.eta {
        cfg.eta = v;
    }
    if let Some(v) = args.k {
        cfg.k = v;
    }
    if let Some(v) = args.repetitions {
        cfg.repetitions = v;
    }
    if let Some(v) = args.functions {
        cfg.functions = v;
    }
    if let Some(v) = args.algorithms {
        cfg.algorithms = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if args.measure_time {
        cfg.measure_time = true;
    }

    let outcome = run_experiment(&cfg)?;
    write_outcome(&outcome, &args.out)?;
    println!(
        "wrote {} rows to {} ({} cells skipped)",
        outcome.rows.len(),
        args.out.display(),
        outcome.skipped.len()
    );
    Ok(())
}

fn print_report(name: &str, r: &BoundReport, caveat: Option<&str>) {
    println!("check:          {name}");
    println!("trials:         {}", r.trials);
    println!("empirical mean: {}", r.empirical_mean);
    println!("standard error: {}", r.std_error);
    println!("bound:          {}", r.bound);
    println!("pass (3 s.e.):  {}", r.pass);
    if let Some(c) = caveat {
        println!("note:           {c}");
    }
}

fn report_csv(name: &str, r: &BoundReport) -> String {
    format!(
        "check,trials,empirical_mean,std_error,bound,pass\n{name},{},{},{},{},{}\n",
        r.trials, r.empirical_mean, r.std_error, r.bound, r.pass
    )
}

fn cmd_theory(args: TheoryArgs) -> Result<(), Box<dyn std::error::Error>> {
    match args.check.as_str() {
        "mean-diff" => {
            let f = make_function(args.function, args.d_eff, args.n, args.seed)?;
            let (l, caveat) = match f.lipschitz_hint() {
                Some(l) => (l, None),
                None => (
                    estimate_lipschitz(&f, 100_000, args.seed),
                    Some(
                        "Lipschitz constant was estimated from sampled pairs; the estimate \
                         lower-bounds the true constant, so a pass is conservative evidence",
                    ),
                ),
            };
            let y = probe_point(args.d, args.norm);
            let r = theorem1_check(&f, l, &LowPoint(y), args.trials, args.seed);
            print_report("mean-diff", &r, caveat);
            write_report_csv(&args.out, &report_csv("mean-diff", &r))?;
        }
        "matrix-norm" => {
            let r = matrix_norm_check(args.n, args.d, args.trials, args.seed)?;
            print_report("matrix-norm", &r, None);
            write_report_csv(&args.out, &report_csv("matrix-norm", &r))?;
        }
        "jl" => {
            let points = probe_cloud(args.points, args.d, args.seed);
            let r = jl_check(&points, args.n, args.eps, args.trials, args.seed);
            println!("check:            jl");
            println!("trials:           {}", r.trials);
            println!("success fraction: {}", r.success_fraction);
            if !r.n_meets_condition {
                println!(
                    "warning:          n = {} is below the dimension condition (need n > {:.1})",
                    args.n, r.min_n
                );
            }
            write_report_csv(
                &args.out,
                &format!(
                    "check,trials,success_fraction,min_n,n_meets_condition\njl,{},{},{},{}\n",
                    r.trials, r.success_fraction, r.min_n, r.n_meets_condition
                ),
            )?;
        }
        other => return Err(format!("unknown check '{other}' (mean-diff | matrix-norm | jl)").into()),
    }
    Ok(())
}

/// A d-vector with the requested Euclidean norm, spread evenly.
fn probe_point(d: usize, norm: f64) -> Vec<f64> {
    vec![norm / (d as f64).sqrt(); d]
}

/// Deterministic set of probe points in [-1,1]^d for the jl check.
fn probe_cloud(m: usize, d: usize, seed: u64) -> Vec<LowPoint> {
    use rand::Rng;
    let mut rng = embedded_hunter::spaces::RngStream::new(seed, 0xC1).rng();
    (0..m)
        .map(|_| LowPoint((0..d).map(|_| rng.gen_range(-1.0..=1.0)).collect()))
        .collect()
}

fn write_report_csv(
    path: &Option<PathBuf>,
    content: &str,
) -> Result<(), Box<dyn std::error::Error>> {
    if let Some(p) = path {
        std::fs::write(p, content)?;
        println!("wrote {}", p.display());
    }
    Ok(())
}
