//! Variational eigensolver on the XS portfolio instance: the optimized
//! expectation bounds the true minimum from above, and the best measured
//! bitstring is scored exactly.
//!
//! ```bash
//! cargo run -p finq --example vqe_toy
//! ```

use finq::portfolio::{generate_instance, SizeLabel};
use finq::solvers::{solve, Backend, SolverHandle, VqeParams};

fn main() -> finq::Result<()> {
    let (_, problem) = generate_instance(SizeLabel::Xs, 3)?;
    let qubo = problem.build_qubo()?;

    let handle = SolverHandle::new(Backend::Vqe(VqeParams {
        layers: 3,
        max_iters: 200,
        ..VqeParams::default()
    }))
    .with_seed(2);
    let result = solve(&qubo, &handle)?;
    let exact = solve(&qubo, &SolverHandle::exhaustive())?;

    let expectation = result.diagnostics.expectation.unwrap();
    println!("iterations: {}", result.diagnostics.sweeps);
    println!("final expectation  : {expectation:.8e}");
    println!("best measured cost : {:.8e}", result.best_cost);
    println!("exhaustive optimum : {:.8e}", exact.best_cost);

    // variational bound: the expectation can never undercut the true minimum
    assert!(expectation >= exact.best_cost - 1e-9);
    assert!(result.best_cost >= exact.best_cost - 1e-12);
    Ok(())
}
