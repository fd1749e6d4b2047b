//! Thermal and path-integral annealing side by side on a frustrated chain.
//!
//! ```bash
//! cargo run -p finq --example annealers
//! ```

use finq::qubo::Qubo;
use finq::solvers::{solve, Backend, SaParams, SolverHandle, SqaParams};

fn main() -> finq::Result<()> {
    // 16-variable chain with alternating couplings and a weak bias
    let n = 16;
    let mut qubo = Qubo::new(n);
    for i in 0..n {
        qubo.add_linear(i, if i % 3 == 0 { 0.2 } else { -0.1 });
    }
    for i in 0..n - 1 {
        qubo.add_quadratic(i, i + 1, if i % 2 == 0 { -1.0 } else { 0.6 });
    }

    let exact = solve(&qubo, &SolverHandle::exhaustive())?;
    println!("exhaustive optimum: {:.6}", exact.best_cost);

    let sa = solve(
        &qubo,
        &SolverHandle::new(Backend::Sa(SaParams { sweeps: 500, restarts: 8, ..SaParams::default() }))
            .with_seed(13),
    )?;
    println!(
        "simulated annealing: {:.6} (acceptance {:.2}, {} sweeps total)",
        sa.best_cost, sa.diagnostics.acceptance_rate, sa.diagnostics.sweeps
    );

    let sqa = solve(
        &qubo,
        &SolverHandle::new(Backend::Sqa(SqaParams {
            sweeps: 500,
            restarts: 2,
            replicas: 16,
            ..SqaParams::default()
        }))
        .with_seed(13),
    )?;
    println!(
        "simulated quantum annealing: {:.6} ({} sweeps total)",
        sqa.best_cost, sqa.diagnostics.sweeps
    );

    assert!(sa.best_cost >= exact.best_cost - 1e-12);
    assert!(sqa.best_cost >= exact.best_cost - 1e-12);
    println!(
        "gaps: sa {:.2e}, sqa {:.2e}",
        sa.best_cost - exact.best_cost,
        sqa.best_cost - exact.best_cost
    );
    Ok(())
}
