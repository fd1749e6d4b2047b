//! Generate the smallest benchmark instance (3 assets × 2 steps × 1 bit),
//! solve it exhaustively, and score the optimal trajectory.
//!
//! ```bash
//! cargo run -p finq --example portfolio_xs
//! ```

use finq::portfolio::{generate_instance, sharpe_ratio, SizeLabel};
use finq::solvers::{solve, SolverHandle};

fn main() -> finq::Result<()> {
    let (data, problem) = generate_instance(SizeLabel::Xs, 7)?;
    println!(
        "instance: {} assets x {} steps x {} bit(s) = {} qubits ({} states)",
        problem.num_assets(),
        problem.num_steps(),
        problem.bits_per_asset,
        problem.num_qubits(),
        1u64 << problem.num_qubits(),
    );

    let qubo = problem.build_qubo()?;
    let result = solve(&qubo, &SolverHandle::exhaustive())?;
    let trajectory = problem.decode(&result.best_bits)?;
    let summary = sharpe_ratio(&trajectory, &data)?;

    println!("optimal cost: {:.6e}", result.best_cost);
    println!("holdings (rows = months):\n{}", trajectory.holdings());
    println!(
        "sharpe: {:.4} (mean {:.5}, vol {:.5}, annualized x{:.3})",
        summary.sharpe, summary.mean_return, summary.volatility, summary.annualization
    );
    assert!(trajectory.is_feasible());
    Ok(())
}
