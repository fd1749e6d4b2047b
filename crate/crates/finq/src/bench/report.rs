//! Report emission: deterministic CSV, aligned text table, per-cell
//! trajectory CSVs, and structured diagnostics.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{FinqError, Result};

use super::{BenchmarkReport, CellOutcome, CrashScenarioReport};

fn fmt_cost(value: f64) -> String {
    format!("{value:.12e}")
}

fn fmt_sharpe(value: f64, degenerate: bool) -> String {
    if degenerate {
        if value == 0.0 {
            "degenerate".into()
        } else if value > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{value:.6}")
    }
}

/// Write report.csv, report.txt, trajectories/*.csv and diagnostics/*.txt
/// under `out_dir`. The CSV carries no timing column so repeated runs with
/// the same config and seeds are byte-identical.
pub fn write_report(report: &BenchmarkReport, out_dir: impl AsRef<Path>) -> Result<()> {
    let out_dir = out_dir.as_ref();
    fs::create_dir_all(out_dir)
        .map_err(|e| FinqError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", out_dir.display()))))?;
    fs::create_dir_all(out_dir.join("trajectories"))?;
    fs::create_dir_all(out_dir.join("diagnostics"))?;

    // deterministic CSV
    let mut csv = String::from("solver,size,seed,cost,sharpe\n");
    for cell in &report.cells {
        match cell {
            CellOutcome::Done(row) => {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{}",
                    row.solver,
                    row.size,
                    row.seed,
                    fmt_cost(row.cost),
                    fmt_sharpe(row.sharpe, row.sharpe_degenerate)
                );
            }
            CellOutcome::Skipped(cell) => {
                let _ = writeln!(csv, "{},{},{},-,-", cell.solver, cell.size, cell.seed);
            }
        }
    }
    fs::write(out_dir.join("report.csv"), csv)?;

    // aligned text table with wall time
    let mut table: Vec<[String; 6]> = vec![[
        "solver".into(),
        "size".into(),
        "seed".into(),
        "cost".into(),
        "sharpe".into(),
        "wall_ms".into(),
    ]];
    for cell in &report.cells {
        match cell {
            CellOutcome::Done(row) => table.push([
                row.solver.clone(),
                row.size.clone(),
                row.seed.to_string(),
                format!("{:.6e}", row.cost),
                fmt_sharpe(row.sharpe, row.sharpe_degenerate),
                format!("{:.1}", row.wall_ms),
            ]),
            CellOutcome::Skipped(cell) => table.push([
                cell.solver.clone(),
                cell.size.clone(),
                cell.seed.to_string(),
                "-".into(),
                "-".into(),
                "-".into(),
            ]),
        }
    }
    let mut widths = [0usize; 6];
    for row in &table {
        for (w, field) in widths.iter_mut().zip(row) {
            *w = (*w).max(field.len());
        }
    }
    let mut text = String::new();
    for row in &table {
        for (w, field) in widths.iter().zip(row) {
            let _ = write!(text, "{field:>width$}  ", width = w);
        }
        text.push('\n');
    }
    text.push('\n');
    text.push_str(&sharpe_pivot(report));
    text.push('\n');
    let _ = writeln!(text, "config hash: {}", report.metadata.config_hash);
    let _ = writeln!(text, "version: {}", report.metadata.version);
    let _ = writeln!(
        text,
        "sharpe convention: annualized x sqrt(12) for business-month steps, risk-free rate 0"
    );
    let _ = writeln!(
        text,
        "wall_ms covers the solve call only and is excluded from report.csv for determinism"
    );
    let _ = writeln!(
        text,
        "exhaustive enumerates up to its max_vars cap (default 30 variables), so it may cover sizes a stricter budget would refuse; refused cells show '-'"
    );
    fs::write(out_dir.join("report.txt"), text)?;

    for cell in &report.cells {
        let CellOutcome::Done(row) = cell else { continue };
        let stem = format!("{}_{}_{}", row.size, row.solver, row.seed);
        let mut traj_csv = String::from("step");
        let holdings = row.trajectory.holdings();
        for asset in 0..holdings.ncols() {
            let _ = write!(traj_csv, ",A{asset:02}");
        }
        traj_csv.push('\n');
        for step in 0..holdings.nrows() {
            let _ = write!(traj_csv, "{step}");
            for asset in 0..holdings.ncols() {
                let _ = write!(traj_csv, ",{}", holdings[(step, asset)]);
            }
            traj_csv.push('\n');
        }
        fs::write(out_dir.join("trajectories").join(format!("{stem}.csv")), traj_csv)?;

        let mut diag = String::new();
        let _ = writeln!(diag, "cell: {stem}");
        let _ = writeln!(diag, "cost: {}", fmt_cost(row.cost));
        let _ = writeln!(diag, "wall_ms: {:.3}", row.wall_ms);
        let _ = writeln!(diag, "sweeps: {}", row.diagnostics.sweeps);
        let _ = writeln!(diag, "acceptance_rate: {:.4}", row.diagnostics.acceptance_rate);
        if let Some(expectation) = row.diagnostics.expectation {
            let _ = writeln!(diag, "expectation: {}", fmt_cost(expectation));
        }
        if !row.diagnostics.energy_trace.is_empty() {
            let trace = &row.diagnostics.energy_trace;
            let head: Vec<String> = trace.iter().take(5).map(|e| format!("{e:.6e}")).collect();
            let _ = writeln!(diag, "energy_trace_head: {}", head.join(" "));
            let _ = writeln!(diag, "energy_trace_final: {:.6e}", trace[trace.len() - 1]);
        }
        for note in &row.diagnostics.notes {
            let _ = writeln!(diag, "note: {note}");
        }
        fs::write(out_dir.join("diagnostics").join(format!("{stem}.txt")), diag)?;
    }
    Ok(())
}

/// Method-by-size grid of mean Sharpe ratios over seeds ("-" where every
/// seed was capacity-refused).
fn sharpe_pivot(report: &BenchmarkReport) -> String {
    let mut solvers: Vec<&str> = Vec::new();
    let mut sizes: Vec<&str> = Vec::new();
    for cell in &report.cells {
        let (solver, size) = match cell {
            CellOutcome::Done(row) => (row.solver.as_str(), row.size.as_str()),
            CellOutcome::Skipped(cell) => (cell.solver.as_str(), cell.size.as_str()),
        };
        if !solvers.contains(&solver) {
            solvers.push(solver);
        }
        if !sizes.contains(&size) {
            sizes.push(size);
        }
    }
    let mut table: Vec<Vec<String>> = Vec::new();
    let mut header = vec!["mean sharpe".to_string()];
    header.extend(sizes.iter().map(|s| s.to_string()));
    table.push(header);
    for solver in &solvers {
        let mut row = vec![solver.to_string()];
        for size in &sizes {
            let values: Vec<f64> = report
                .rows()
                .filter(|r| r.solver == *solver && r.size == *size && !r.sharpe_degenerate)
                .map(|r| r.sharpe)
                .collect();
            if values.is_empty() {
                row.push("-".into());
            } else {
                let mean = values.iter().sum::<f64>() / values.len() as f64;
                row.push(format!("{mean:.2}"));
            }
        }
        table.push(row);
    }
    let cols = table[0].len();
    let mut widths = vec![0usize; cols];
    for row in &table {
        for (w, field) in widths.iter_mut().zip(row) {
            *w = (*w).max(field.len());
        }
    }
    let mut text = String::new();
    for row in &table {
        for (w, field) in widths.iter().zip(row) {
            let _ = write!(text, "{field:>width$}  ", width = w);
        }
        text.push('\n');
    }
    text
}

/// Write the crash scenario as machine-readable CSV plus a human summary.
pub fn write_crash_report(
    report: &CrashScenarioReport,
    out_dir: impl AsRef<Path>,
) -> Result<()> {
    let out_dir = out_dir.as_ref();
    fs::create_dir_all(out_dir)?;

    let mut csv = String::from("institution,value_before,value_after,failed_before,failed_after,newly_failed\n");
    for (i, name) in report.institutions.iter().enumerate() {
        let newly = report.newly_failed.contains(name);
        let _ = writeln!(
            csv,
            "{name},{},{},{},{},{}",
            fmt_cost(report.before_values[i]),
            fmt_cost(report.after_values[i]),
            report.before_failed[i],
            report.after_failed[i],
            newly
        );
    }
    fs::write(out_dir.join("crash_report.csv"), csv)?;

    let mut file = fs::File::create(out_dir.join("crash_report.txt"))?;
    writeln!(file, "pre-shock residual:  {:.6e}", report.residual_before)?;
    writeln!(file, "post-shock residual: {:.6e}", report.residual_after)?;
    writeln!(
        file,
        "fixed-point reference residuals (tol {:.1e}): {:.6e} / {:.6e}",
        report.fixed_point_tol, report.fixed_point_residuals.0, report.fixed_point_residuals.1
    )?;
    writeln!(file, "solve wall_ms: {:.1}", report.wall_ms)?;
    if report.newly_failed.is_empty() {
        writeln!(file, "no new failures")?;
    } else {
        writeln!(file, "newly failed: {}", report.newly_failed.join(", "))?;
    }
    for (i, name) in report.institutions.iter().enumerate() {
        writeln!(
            file,
            "{name}: {:.6} -> {:.6}{}",
            report.before_values[i],
            report.after_values[i],
            if report.after_failed[i] { "  [failed]" } else { "" }
        )?;
    }
    Ok(())
}
