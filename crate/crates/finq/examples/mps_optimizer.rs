//! Ground-state search with the matrix-product-state backend on the S-size
//! portfolio instance (20 qubits), printing the per-sweep energy trace.
//!
//! ```bash
//! cargo run --release -p finq --example mps_optimizer
//! ```

use finq::portfolio::{generate_instance, SizeLabel};
use finq::solvers::{solve, Backend, MpsParams, SolverHandle};

fn main() -> finq::Result<()> {
    let (_, problem) = generate_instance(SizeLabel::S, 21)?;
    let qubo = problem.build_qubo()?;
    println!("{} variables, {} couplings", qubo.num_vars(), qubo.quadratic().len());

    let handle = SolverHandle::new(Backend::Mps(MpsParams {
        bond_dim: 16,
        sweeps: 20,
        samples: 256,
        restarts: 2,
        ..MpsParams::default()
    }))
    .with_seed(5);
    let result = solve(&qubo, &handle)?;

    println!("energy after each sweep:");
    for (sweep, energy) in result.diagnostics.energy_trace.iter().enumerate() {
        println!("  sweep {:>2}: {:.8e}", sweep + 1, energy);
    }
    println!(
        "final expectation {:.8e}, best sampled cost {:.8e}",
        result.diagnostics.expectation.unwrap_or(f64::NAN),
        result.best_cost
    );

    let exact = solve(&qubo, &SolverHandle::exhaustive())?;
    println!("exhaustive optimum {:.8e}", exact.best_cost);
    assert!(result.best_cost >= exact.best_cost - 1e-12);
    Ok(())
}
