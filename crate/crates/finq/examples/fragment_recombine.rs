//! Split the multi-period problem into per-period subproblems, sample good
//! single-period portfolios, and recombine them exactly by dynamic
//! programming over the candidate pools.
//!
//! ```bash
//! cargo run -p finq --example fragment_recombine
//! ```

use finq::portfolio::{generate_instance, SizeLabel};
use finq::reduction::fragment_and_recombine;
use finq::solvers::{solve, SolverHandle};

fn main() -> finq::Result<()> {
    let (_, problem) = generate_instance(SizeLabel::Xs, 9)?;

    for m in [1usize, 2, 3] {
        let (trajectory, plan) =
            fragment_and_recombine(&problem, &SolverHandle::exhaustive(), m)?;
        let cost = problem.cost_full(&trajectory)?;
        println!("M = {m}: pools {:?}, recombined cost {cost:.6e}", plan.pool_sizes());
        for warning in &plan.warnings {
            println!("  note: {warning}");
        }
    }

    // with every feasible candidate in the pools the recombination is exact
    let (trajectory, _) = fragment_and_recombine(&problem, &SolverHandle::exhaustive(), 64)?;
    let recombined = problem.cost_full(&trajectory)?;
    let direct = solve(&problem.build_qubo()?, &SolverHandle::exhaustive())?;
    println!("full pools: {recombined:.6e} vs exhaustive {:.6e}", direct.best_cost);
    assert!((recombined - direct.best_cost).abs() < 1e-9);
    Ok(())
}
