//! Command-line entry point: data ingestion, configuration, benchmark
//! orchestration, and report emission. All functionality lives in the
//! library; this binary only parses arguments and routes.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use finq::bench::{
    run_benchmark, run_crash_scenario, write_crash_report, write_report, BenchmarkConfig,
    PortfolioConfig,
};
use finq::crash::io::NetworkPaths;
use finq::error::{FinqError, Result};
use finq::portfolio::{
    estimate_moments, generate_instance, ingest_prices, sharpe_ratio, PortfolioProblem, SizeLabel,
    TransactionCost,
};
use finq::reduction::{cluster_assets, coarse_solve_then_refine, fragment_and_recombine};
use finq::solvers::solve;

#[derive(Parser)]
#[command(name = "finq", version, about = "Quantum-inspired optimization for financial networks and integer portfolios")]
struct Cli {
    /// Print the fully resolved configuration (defaults plus overrides) and exit.
    #[arg(long, global = true)]
    show_config: bool,

    /// Configuration file (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override one configuration key, e.g. --set sa.sweeps=500 (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one portfolio instance and write a report.
    Portfolio(PortfolioArgs),
    /// Run a financial-network crash scenario.
    Crash(CrashArgs),
    /// Run the full benchmark grid from the configuration.
    Benchmark(BenchmarkArgs),
    /// Generate a synthetic instance and write its prices CSV.
    GenInstance(GenInstanceArgs),
}

#[derive(Args)]
struct PortfolioArgs {
    /// Solver backend: exhaustive, sa, sqa, mps, or vqe.
    #[arg(long, default_value = "sa")]
    solver: String,
    /// Instance size label (XS..XXL) when generating data; falls back to the
    /// [portfolio] config section.
    #[arg(long)]
    size: Option<String>,
    /// Prices CSV; when given, the problem is built from this data using the
    /// [portfolio] config section instead of the size label.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Report output directory.
    #[arg(long, default_value = "portfolio-out")]
    report: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Reduce dimensionality by clustering assets into this many indices
    /// before solving.
    #[arg(long)]
    clusters: Option<usize>,
    /// Solve per-period subproblems and recombine the M best candidates.
    #[arg(long, value_name = "M")]
    fragment_candidates: Option<usize>,
}

#[derive(Args)]
struct CrashArgs {
    /// Directory with institutions.csv, ownership.csv, dependency.csv, prices.csv.
    #[arg(long)]
    network: PathBuf,
    /// Perturbation CSV (asset,delta); omitted means a zero shock.
    #[arg(long)]
    perturbation: Option<PathBuf>,
    #[arg(long, default_value = "sa")]
    solver: String,
    /// Bits per institution value.
    #[arg(long, default_value_t = 2)]
    bits: usize,
    /// Value-grid scale; default max(A·D·p)/(2^bits − 1).
    #[arg(long)]
    scale: Option<f64>,
    /// Fixed-point tolerance for the reference iteration printed alongside.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value = "crash-out")]
    report: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct BenchmarkArgs {
    /// Comma-separated size labels, overriding the config.
    #[arg(long, value_delimiter = ',')]
    sizes: Vec<String>,
    /// Comma-separated solver names, overriding the config.
    #[arg(long, value_delimiter = ',')]
    solvers: Vec<String>,
    /// Comma-separated seeds, overriding the config.
    #[arg(long, value_delimiter = ',')]
    seeds: Vec<u64>,
    /// Output directory, overriding the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for benchmark cells.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct GenInstanceArgs {
    #[arg(long, default_value = "XS")]
    size: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "instance-out")]
    out: PathBuf,
}

/// Seed resolution: flag, then FINQ_SEED, then 0.
fn resolve_seed(flag: Option<u64>) -> u64 {
    flag.or_else(|| {
        std::env::var("FINQ_SEED")
            .ok()
            .and_then(|value| value.parse().ok())
    })
    .unwrap_or(0)
}

fn load_config(cli: &Cli) -> Result<BenchmarkConfig> {
    let mut text = match &cli.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| FinqError::Data(format!("cannot read {}: {e}", path.display())))?,
        None => String::new(),
    };
    let mut value: toml::Value = if text.is_empty() {
        toml::Value::Table(Default::default())
    } else {
        text.parse()
            .map_err(|e| FinqError::Config(format!("invalid config: {e}")))?
    };
    for entry in &cli.overrides {
        apply_override(&mut value, entry)?;
    }
    text = toml::to_string(&value).map_err(|e| FinqError::Config(e.to_string()))?;
    BenchmarkConfig::from_toml(&text)
}

/// Apply one `a.b=value` override to a TOML tree.
fn apply_override(root: &mut toml::Value, entry: &str) -> Result<()> {
    let (key_path, raw_value) = entry.split_once('=').ok_or_else(|| {
        FinqError::Parameter(format!("override {entry:?} is not of the form key=value"))
    })?;
    let parsed: toml::Value = match raw_value.parse::<i64>() {
        Ok(i) => toml::Value::Integer(i),
        Err(_) => match raw_value.parse::<f64>() {
            Ok(f) => toml::Value::Float(f),
            Err(_) => match raw_value {
                "true" => toml::Value::Boolean(true),
                "false" => toml::Value::Boolean(false),
                other => toml::Value::String(other.to_string()),
            },
        },
    };
    let mut node = root;
    let segments: Vec<&str> = key_path.split('.').collect();
    for (depth, segment) in segments.iter().enumerate() {
        let table = node.as_table_mut().ok_or_else(|| {
            FinqError::Parameter(format!("override {entry:?} traverses a non-table"))
        })?;
        if depth + 1 == segments.len() {
            table.insert(segment.to_string(), parsed);
            return Ok(());
        }
        node = table
            .entry(segment.to_string())
            .or_insert_with(|| toml::Value::Table(Default::default()));
    }
    Ok(())
}

fn portfolio_problem_from_data(
    data: &finq::portfolio::MarketData,
    config: &PortfolioConfig,
) -> Result<PortfolioProblem> {
    let moments = estimate_moments(data, config.window)?;
    let mut problem = PortfolioProblem::new(
        moments.mu,
        moments.sigma,
        config.gamma,
        TransactionCost::Scalar(config.lambda),
        config.budget,
        config.bits_per_asset,
    )?;
    if config.max_per_asset > 0 {
        problem = problem.with_cap(config.max_per_asset)?;
    }
    if config.rho > 0.0 {
        problem = problem.with_rho(config.rho)?;
    }
    Ok(problem)
}

fn cmd_portfolio(cli: &Cli, args: &PortfolioArgs) -> Result<()> {
    let config = load_config(cli)?;
    let seed = resolve_seed(args.seed.or(config.portfolio.seed));
    let handle = config.handle_for(&args.solver, seed)?;
    let size = args.size.clone().unwrap_or_else(|| config.portfolio.size.clone());

    let (data, problem) = match &args.data {
        Some(path) => {
            let data = ingest_prices(path)?;
            let problem = portfolio_problem_from_data(&data, &config.portfolio)?;
            (data, problem)
        }
        None => generate_instance(SizeLabel::parse(&size)?, seed)?,
    };
    std::fs::create_dir_all(&args.report)?;

    let started = std::time::Instant::now();
    let trajectory = if let Some(m) = args.fragment_candidates {
        let (traj, plan) = fragment_and_recombine(&problem, &handle, m)?;
        for warning in &plan.warnings {
            eprintln!("warning: {warning}");
        }
        let mut diag = format!("candidate pool sizes: {:?}\n", plan.pool_sizes());
        for (t, pool) in plan.pools.iter().enumerate() {
            for candidate in pool {
                diag.push_str(&format!(
                    "period {t}: units {:?} score {:.6e}\n",
                    candidate.units, candidate.score
                ));
            }
        }
        std::fs::write(args.report.join("candidate_pools.txt"), diag)?;
        traj
    } else if let Some(clusters) = args.clusters {
        let clustering = cluster_assets(&data, clusters)?;
        std::fs::write(args.report.join("dendrogram.txt"), clustering.dendrogram_text())?;
        coarse_solve_then_refine(&problem, &clustering, &handle)?
    } else {
        let qubo = problem.build_qubo()?;
        let result = solve(&qubo, &handle)?;
        problem.decode(&result.best_bits)?
    };
    let wall_ms = started.elapsed().as_secs_f64() * 1e3;

    let cost = problem.cost_full(&trajectory)?;
    let sharpe = sharpe_ratio(&trajectory, &data)?;
    let sharpe_text = if sharpe.degenerate {
        "degenerate".to_string()
    } else {
        format!("{:.6}", sharpe.sharpe)
    };

    let mut csv = String::from("solver,size,seed,cost,sharpe\n");
    csv.push_str(&format!("{},{size},{seed},{cost:.12e},{sharpe_text}\n", args.solver));
    std::fs::write(args.report.join("report.csv"), csv)?;

    let mut text = format!(
        "solver {}  size {size}  seed {seed}\ncost {cost:.12e}\nsharpe {sharpe_text} (annualized x sqrt(12), risk-free 0)\nwall_ms {wall_ms:.1}\n",
        args.solver
    );
    text.push_str("holdings (one row per step):\n");
    let holdings = trajectory.holdings();
    let mut traj_csv = String::from("step");
    for asset in 0..holdings.ncols() {
        traj_csv.push_str(&format!(",{}", data.asset_names()[asset]));
    }
    traj_csv.push('\n');
    for step in 0..holdings.nrows() {
        traj_csv.push_str(&step.to_string());
        for asset in 0..holdings.ncols() {
            text.push_str(&format!(" {}", holdings[(step, asset)]));
            traj_csv.push_str(&format!(",{}", holdings[(step, asset)]));
        }
        text.push('\n');
        traj_csv.push('\n');
    }
    std::fs::write(args.report.join("report.txt"), text)?;
    std::fs::create_dir_all(args.report.join("trajectories"))?;
    std::fs::write(args.report.join("trajectories").join("best.csv"), traj_csv)?;

    println!(
        "{} on {size}: cost {cost:.6e}, sharpe {sharpe_text} ({} steps, {wall_ms:.1} ms)",
        args.solver,
        problem.num_steps(),
    );
    println!("holdings:\n{}", trajectory.holdings());
    Ok(())
}

fn cmd_crash(cli: &Cli, args: &CrashArgs) -> Result<()> {
    let config = load_config(cli)?;
    let seed = resolve_seed(args.seed);
    let handle = config.handle_for(&args.solver, seed)?;
    let paths = NetworkPaths::in_dir(&args.network);
    let report = run_crash_scenario(
        &paths,
        args.perturbation.as_deref(),
        args.bits,
        args.scale,
        args.tol,
        &handle,
    )?;
    write_crash_report(&report, &args.report)?;
    if report.newly_failed.is_empty() {
        println!("no new failures");
    } else {
        println!("newly failed: {}", report.newly_failed.join(", "));
    }
    println!(
        "residual before {:.3e}, after {:.3e} (report in {})",
        report.residual_before,
        report.residual_after,
        args.report.display()
    );
    Ok(())
}

fn cmd_benchmark(cli: &Cli, args: &BenchmarkArgs) -> Result<()> {
    let mut config = load_config(cli)?;
    if !args.sizes.is_empty() {
        config.sizes = args.sizes.clone();
    }
    if !args.solvers.is_empty() {
        config.solvers = args.solvers.clone();
    }
    if !args.seeds.is_empty() {
        config.seeds = args.seeds.clone();
    }
    if let Some(out) = &args.out {
        config.out_dir = out.display().to_string();
    }
    if let Some(jobs) = args.jobs {
        config.jobs = jobs;
    }
    let report = run_benchmark(&config)?;
    write_report(&report, &config.out_dir)?;
    println!(
        "{} cells -> {}/report.csv (config hash {})",
        report.cells.len(),
        config.out_dir,
        &report.metadata.config_hash[..12],
    );
    Ok(())
}

fn cmd_gen_instance(args: &GenInstanceArgs) -> Result<()> {
    let label = SizeLabel::parse(&args.size)?;
    let seed = resolve_seed(args.seed);
    let (data, problem) = generate_instance(label, seed)?;
    std::fs::create_dir_all(&args.out)?;
    data.save_csv(args.out.join("prices.csv"))?;
    let meta = format!(
        "size = \"{}\"\nseed = {seed}\nassets = {}\nsteps = {}\nbits_per_asset = {}\nbudget = {}\nmax_per_asset = {}\nqubits = {}\n",
        label.name(),
        problem.num_assets(),
        problem.num_steps(),
        problem.bits_per_asset,
        problem.budget,
        problem.max_per_asset,
        problem.num_qubits(),
    );
    std::fs::write(args.out.join("instance.toml"), meta)?;
    println!(
        "{}: {} qubits, prices in {}/prices.csv",
        label.name(),
        problem.num_qubits(),
        args.out.display()
    );
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    if cli.show_config {
        let config = load_config(cli)?;
        print!("{}", config.to_toml());
        return Ok(());
    }
    match &cli.command {
        Some(Command::Portfolio(args)) => cmd_portfolio(cli, args),
        Some(Command::Crash(args)) => cmd_crash(cli, args),
        Some(Command::Benchmark(args)) => cmd_benchmark(cli, args),
        Some(Command::GenInstance(args)) => cmd_gen_instance(args),
        None => Err(FinqError::Parameter(
            "no subcommand given; try `finq --help`".into(),
        )),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
