//! Run a small benchmark grid through the library API and print where the
//! reports land.
//!
//! ```bash
//! cargo run --release -p finq --example benchmark_run
//! ```

use finq::bench::{run_benchmark, write_report, BenchmarkConfig, SaConfig};

fn main() -> finq::Result<()> {
    let config = BenchmarkConfig {
        sizes: vec!["XS".into(), "S".into()],
        solvers: vec!["exhaustive".into(), "sa".into(), "mps".into()],
        seeds: vec![11, 12],
        out_dir: std::env::temp_dir()
            .join("finq-benchmark-example")
            .display()
            .to_string(),
        jobs: 2,
        sa: SaConfig { sweeps: 400, restarts: 6, ..SaConfig::default() },
        ..BenchmarkConfig::default()
    };

    let report = run_benchmark(&config)?;
    for row in report.rows() {
        println!(
            "{:>10}  {:>3}  seed {:>2}  cost {:>14.6e}  sharpe {:>9.4}  {:>7.1} ms",
            row.solver, row.size, row.seed, row.cost, row.sharpe, row.wall_ms
        );
    }
    write_report(&report, &config.out_dir)?;
    println!("reports written to {}", config.out_dir);
    println!("config hash {}", report.metadata.config_hash);
    Ok(())
}
