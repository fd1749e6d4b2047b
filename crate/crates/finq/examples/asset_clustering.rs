//! Group correlated assets into synthetic indices, solve the reduced
//! problem, and refine back at asset level.
//!
//! ```bash
//! cargo run -p finq --example asset_clustering
//! ```

use finq::portfolio::{generate_instance, SizeLabel};
use finq::reduction::{cluster_assets, coarse_solve_then_refine};
use finq::solvers::{solve, SolverHandle};

fn main() -> finq::Result<()> {
    let (data, problem) = generate_instance(SizeLabel::S, 17)?;
    let clustering = cluster_assets(&data, 2)?;
    println!("cluster assignments: {:?}", clustering.assignments);
    println!("{}", clustering.dendrogram_text());

    let refined = coarse_solve_then_refine(&problem, &clustering, &SolverHandle::exhaustive())?;
    let refined_cost = problem.cost_full(&refined)?;

    let direct = solve(&problem.build_qubo()?, &SolverHandle::exhaustive())?;
    println!("refined cost : {refined_cost:.6e}");
    println!("direct cost  : {:.6e}", direct.best_cost);
    println!("gap          : {:.3e}", refined_cost - direct.best_cost);
    assert!(refined.is_feasible());
    Ok(())
}
