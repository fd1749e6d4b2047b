//! Benchmark orchestration and scenario reports.
//!
//! One benchmark cell = (size, solver, seed): generate the instance, build
//! its QUBO, solve (or refuse on capacity), re-validate the stored cost
//! against the trajectory, and score the realized Sharpe ratio. Cells run in
//! a worker pool; all rows are assembled and written in configuration order,
//! so repeated runs produce byte-identical CSV output regardless of the job
//! count. Wall-clock timings appear only in the text report and diagnostics,
//! never in the CSV.

mod config;
mod report;

use std::time::Instant;

use rayon::prelude::*;

use crate::crash::io::{load_network, load_price_delta, NetworkPaths};
use crate::error::{FinqError, Result};
use crate::portfolio::{generate_instance, sharpe_ratio, SizeLabel, Trajectory};
use crate::qubo::IntegerEncoding;
use crate::solvers::{Diagnostics, SolverHandle};

pub use config::{
    BenchmarkConfig, ExhaustiveConfig, MpsConfig, PortfolioConfig, SaConfig, SqaConfig, VqeConfig,
    VALID_SOLVERS,
};
pub use report::{write_crash_report, write_report};

/// One completed benchmark cell.
#[derive(Debug, Clone)]
pub struct BenchmarkRow {
    pub solver: String,
    pub size: String,
    pub seed: u64,
    /// Solver objective value (equals cost_full of the trajectory).
    pub cost: f64,
    pub sharpe: f64,
    pub sharpe_degenerate: bool,
    pub wall_ms: f64,
    pub trajectory: Trajectory,
    pub diagnostics: Diagnostics,
}

/// A cell the solver refused for capacity reasons; rendered as "-".
#[derive(Debug, Clone)]
pub struct SkippedCell {
    pub solver: String,
    pub size: String,
    pub seed: u64,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub enum CellOutcome {
    Done(Box<BenchmarkRow>),
    Skipped(SkippedCell),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportMetadata {
    pub config_hash: String,
    pub version: String,
}

#[derive(Debug, Clone)]
pub struct BenchmarkReport {
    pub cells: Vec<CellOutcome>,
    pub metadata: ReportMetadata,
}

impl BenchmarkReport {
    pub fn rows(&self) -> impl Iterator<Item = &BenchmarkRow> {
        self.cells.iter().filter_map(|cell| match cell {
            CellOutcome::Done(row) => Some(row.as_ref()),
            CellOutcome::Skipped(_) => None,
        })
    }
}

fn run_cell(config: &BenchmarkConfig, size: &str, solver: &str, seed: u64) -> Result<CellOutcome> {
    let label = SizeLabel::parse(size)?;
    let (data, problem) = generate_instance(label, seed)?;
    let qubo = problem.build_qubo()?;
    let handle = config.handle_for(solver, seed)?;

    let started = Instant::now();
    let solved = match crate::solvers::solve(&qubo, &handle) {
        Ok(result) => result,
        Err(FinqError::Capacity(reason)) => {
            return Ok(CellOutcome::Skipped(SkippedCell {
                solver: solver.into(),
                size: size.into(),
                seed,
                reason,
            }))
        }
        Err(other) => return Err(other),
    };
    let wall_ms = started.elapsed().as_secs_f64() * 1e3;

    let trajectory = problem.decode(&solved.best_bits)?;
    let revalidated = problem.cost_full(&trajectory)?;
    if (revalidated - solved.best_cost).abs() > 1e-9 * (1.0 + revalidated.abs()) {
        return Err(FinqError::Data(format!(
            "cell {size}/{solver}/{seed}: stored cost {} disagrees with trajectory cost {revalidated}",
            solved.best_cost
        )));
    }
    let sharpe = sharpe_ratio(&trajectory, &data)?;
    Ok(CellOutcome::Done(Box::new(BenchmarkRow {
        solver: solver.into(),
        size: size.into(),
        seed,
        cost: solved.best_cost,
        sharpe: sharpe.sharpe,
        sharpe_degenerate: sharpe.degenerate,
        wall_ms,
        trajectory,
        diagnostics: solved.diagnostics,
    })))
}

/// Run every (size, solver, seed) cell of the configuration. Capacity
/// refusals become "-" cells rather than errors.
pub fn run_benchmark(config: &BenchmarkConfig) -> Result<BenchmarkReport> {
    config.validate()?;
    let cells: Vec<(String, String, u64)> = config
        .sizes
        .iter()
        .flat_map(|size| {
            config.solvers.iter().flat_map(move |solver| {
                config
                    .seeds
                    .iter()
                    .map(move |&seed| (size.clone(), solver.clone(), seed))
            })
        })
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs.max(1))
        .build()
        .map_err(|e| FinqError::Config(format!("cannot build worker pool: {e}")))?;
    let outcomes: Vec<Result<CellOutcome>> = pool.install(|| {
        cells
            .par_iter()
            .map(|(size, solver, seed)| run_cell(config, size, solver, *seed))
            .collect()
    });

    let mut done = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        done.push(outcome?);
    }
    Ok(BenchmarkReport {
        cells: done,
        metadata: ReportMetadata {
            config_hash: config.hash(),
            version: env!("CARGO_PKG_VERSION").into(),
        },
    })
}

/// Pre/post-shock equilibria with institution names resolved, plus the
/// fixed-point iteration run at the requested tolerance as a reference.
#[derive(Debug, Clone)]
pub struct CrashScenarioReport {
    pub institutions: Vec<String>,
    pub before_values: Vec<f64>,
    pub after_values: Vec<f64>,
    pub before_failed: Vec<bool>,
    pub after_failed: Vec<bool>,
    pub newly_failed: Vec<String>,
    pub residual_before: f64,
    pub residual_after: f64,
    /// Residuals of the fixed-point reference at (before, after) prices.
    pub fixed_point_residuals: (f64, f64),
    pub fixed_point_tol: f64,
    pub wall_ms: f64,
}

/// Load a network and a perturbation, solve both equilibria with the given
/// solver, and report newly failed institutions. `tol` drives the
/// fixed-point reference iteration included in the report.
pub fn run_crash_scenario(
    paths: &NetworkPaths,
    perturbation: Option<&std::path::Path>,
    bits: usize,
    scale: Option<f64>,
    tol: f64,
    handle: &SolverHandle,
) -> Result<CrashScenarioReport> {
    let (network, labels) = load_network(paths)?;
    let delta = match perturbation {
        Some(path) => load_price_delta(path, &labels.assets)?,
        None => vec![0.0; network.n_assets()],
    };
    let scale = match scale {
        Some(s) => s,
        None => network.default_scale(bits)?,
    };
    let enc = IntegerEncoding::new(bits, scale)?;
    let started = Instant::now();
    let shock = network.shock_and_detect(&delta, &enc, handle)?;
    let wall_ms = started.elapsed().as_secs_f64() * 1e3;

    let reference_before = network
        .fixed_point_equilibrium(network.base_value().as_slice(), tol, 1000)?
        .residual;
    let shocked_prices = nalgebra::DVector::from_iterator(
        network.n_assets(),
        network.prices().iter().zip(&delta).map(|(p, d)| p + d),
    );
    let shocked = network.with_prices(shocked_prices)?;
    let reference_after = shocked
        .fixed_point_equilibrium(shocked.base_value().as_slice(), tol, 1000)?
        .residual;

    Ok(CrashScenarioReport {
        newly_failed: shock
            .newly_failed
            .iter()
            .map(|&i| labels.institutions[i].clone())
            .collect(),
        institutions: labels.institutions,
        before_values: shock.before.values,
        after_values: shock.after.values,
        before_failed: shock.before.failed,
        after_failed: shock.after.failed,
        residual_before: shock.before.residual,
        residual_after: shock.after.residual,
        fixed_point_residuals: (reference_before, reference_after),
        fixed_point_tol: tol,
        wall_ms,
    })
}
