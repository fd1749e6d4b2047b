//! Per-period problem fragmentation with exact classical recombination.
//!
//! Stage 1 solves each period's standalone subproblem (no transaction term)
//! and keeps the M best distinct feasible portfolios from the solver's
//! sample pool. Stage 2 runs exact dynamic programming over the T × M
//! candidate lattice with the transaction cost as the transition weight, so
//! the result is the minimum-cost trajectory restricted to the pools.

use rayon::prelude::*;

use crate::error::{FinqError, Result};
use crate::portfolio::{PortfolioProblem, Trajectory};
use crate::solvers::{solve, SolverHandle};

/// One feasible single-period portfolio and its standalone score
/// −μ·ω + (γ/2)·ωᵀΣω.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub units: Vec<u32>,
    pub score: f64,
}

/// Per-period candidate pools.
#[derive(Debug, Clone, PartialEq)]
pub struct FragmentPlan {
    pub pools: Vec<Vec<Candidate>>,
    pub warnings: Vec<String>,
}

impl FragmentPlan {
    pub fn pool_sizes(&self) -> Vec<usize> {
        self.pools.iter().map(|p| p.len()).collect()
    }
}

fn period_pool(
    problem: &PortfolioProblem,
    t: usize,
    handle: &SolverHandle,
    max_candidates: usize,
) -> Result<Vec<Candidate>> {
    let sub = problem.single_period(t)?;
    let qubo = sub.build_qubo()?;
    // decorrelate the per-period streams and keep room for infeasible samples
    let sub_handle = handle
        .clone()
        .with_seed(handle.seed.wrapping_add(t as u64).wrapping_mul(0x9E37_79B9))
        .with_sample_cap((4 * max_candidates).max(64));
    let result = solve(&qubo, &sub_handle)?;

    let mut pool = Vec::new();
    for (bits, _) in &result.samples {
        let traj = sub.decode(bits)?;
        if !traj.is_feasible() {
            continue;
        }
        let units: Vec<u32> = traj.holdings().row(0).iter().copied().collect();
        if pool.iter().any(|c: &Candidate| c.units == units) {
            continue;
        }
        let score = sub.cost_h0(&traj)?;
        pool.push(Candidate { units, score });
        if pool.len() >= max_candidates {
            break;
        }
    }
    pool.sort_by(|a, b| a.score.total_cmp(&b.score).then(a.units.cmp(&b.units)));
    Ok(pool)
}

/// Deterministic feasible fallback: fill assets in index order up to the cap.
fn greedy_candidate(problem: &PortfolioProblem, t: usize) -> Result<Candidate> {
    let sub = problem.single_period(t)?;
    let mut units = vec![0u32; problem.num_assets()];
    let mut remaining = problem.budget;
    for slot in units.iter_mut() {
        let take = remaining.min(problem.max_per_asset);
        *slot = take;
        remaining -= take;
        if remaining == 0 {
            break;
        }
    }
    let traj = Trajectory::from_rows(&[units.clone()], problem.budget)?;
    let score = sub.cost_h0(&traj)?;
    Ok(Candidate { units, score })
}

pub fn fragment_and_recombine(
    problem: &PortfolioProblem,
    handle: &SolverHandle,
    max_candidates: usize,
) -> Result<(Trajectory, FragmentPlan)> {
    if max_candidates == 0 {
        return Err(FinqError::Parameter("candidate count must be ≥ 1".into()));
    }
    let t_steps = problem.num_steps();
    let mut pools: Vec<Vec<Candidate>> = (0..t_steps)
        .into_par_iter()
        .map(|t| period_pool(problem, t, handle, max_candidates))
        .collect::<Result<_>>()?;
    let mut warnings = Vec::new();
    for (t, pool) in pools.iter_mut().enumerate() {
        if pool.is_empty() {
            pool.push(greedy_candidate(problem, t)?);
            warnings.push(format!(
                "period {t}: solver produced no feasible samples; using a greedy fallback"
            ));
        } else if pool.len() < max_candidates {
            warnings.push(format!(
                "period {t}: only {} distinct feasible candidates (requested {max_candidates})",
                pool.len()
            ));
        }
    }

    // DP over the candidate lattice with λ‖Δω‖² transitions; the first period
    // is charged against the all-cash start.
    let transition = |from: Option<&[u32]>, to: &[u32]| -> f64 {
        let k = problem.budget as f64;
        (0..problem.num_assets())
            .map(|a| {
                let prev = from.map_or(0.0, |u| u[a] as f64 / k);
                let next = to[a] as f64 / k;
                let delta = next - prev;
                lambda_for(problem, a) * delta * delta
            })
            .sum()
    };

    let mut cost: Vec<f64> = pools[0]
        .iter()
        .map(|c| c.score + transition(None, &c.units))
        .collect();
    let mut back: Vec<Vec<usize>> = Vec::with_capacity(t_steps);
    for t in 1..t_steps {
        let mut next_cost = vec![f64::INFINITY; pools[t].len()];
        let mut pointers = vec![0usize; pools[t].len()];
        for (j, candidate) in pools[t].iter().enumerate() {
            let mut best = f64::INFINITY;
            let mut best_prev = 0usize;
            for (i, prev_cost) in cost.iter().enumerate() {
                let total = prev_cost + transition(Some(&pools[t - 1][i].units), &candidate.units);
                if total < best {
                    best = total;
                    best_prev = i;
                }
            }
            next_cost[j] = best + candidate.score;
            pointers[j] = best_prev;
        }
        back.push(pointers);
        cost = next_cost;
    }

    let mut last = 0usize;
    for (j, c) in cost.iter().enumerate() {
        if *c < cost[last] {
            last = j;
        }
    }
    let mut path = vec![last; t_steps];
    for t in (1..t_steps).rev() {
        path[t - 1] = back[t - 1][path[t]];
    }
    let rows: Vec<Vec<u32>> = path
        .iter()
        .enumerate()
        .map(|(t, &j)| pools[t][j].units.clone())
        .collect();
    let trajectory = Trajectory::from_rows(&rows, problem.budget)?;
    Ok((trajectory, FragmentPlan { pools, warnings }))
}

fn lambda_for(problem: &PortfolioProblem, asset: usize) -> f64 {
    match &problem.lambda {
        crate::portfolio::TransactionCost::Scalar(l) => *l,
        crate::portfolio::TransactionCost::PerAsset(v) => v[asset],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::portfolio::{generate_instance, SizeLabel, TransactionCost};
    use crate::solvers::SolverHandle;

    #[test]
    fn full_pools_match_exhaustive_optimum() {
        for seed in 0..5u64 {
            let (_, problem) = generate_instance(SizeLabel::Xs, seed).unwrap();
            let (traj, plan) =
                fragment_and_recombine(&problem, &SolverHandle::exhaustive(), 64).unwrap();
            assert!(traj.is_feasible());
            assert!(plan.pool_sizes().iter().all(|&s| s == 3)); // C(3,2) feasible per period
            let direct =
                solve(&problem.build_qubo().unwrap(), &SolverHandle::exhaustive()).unwrap();
            let recombined = problem.cost_full(&traj).unwrap();
            assert!(
                (recombined - direct.best_cost).abs() < 1e-9,
                "seed {seed}: {recombined} vs {}",
                direct.best_cost
            );
        }
    }

    #[test]
    fn single_candidate_concatenates_period_optima() {
        let (_, problem) = generate_instance(SizeLabel::Xs, 2).unwrap();
        let (traj, plan) =
            fragment_and_recombine(&problem, &SolverHandle::exhaustive(), 1).unwrap();
        for (t, pool) in plan.pools.iter().enumerate() {
            assert_eq!(pool.len(), 1);
            let row: Vec<u32> = traj.holdings().row(t).iter().copied().collect();
            assert_eq!(row, pool[0].units);
        }
    }

    #[test]
    fn zero_lambda_decouples_periods() {
        let (_, mut problem) = generate_instance(SizeLabel::Xs, 4).unwrap();
        problem.lambda = TransactionCost::Scalar(0.0);
        let (traj, plan) =
            fragment_and_recombine(&problem, &SolverHandle::exhaustive(), 8).unwrap();
        for t in 0..problem.num_steps() {
            let row: Vec<u32> = traj.holdings().row(t).iter().copied().collect();
            assert_eq!(row, plan.pools[t][0].units, "period {t} should pick its own best");
        }
    }

    /// DP optimality oracle: enumerate every path through the pools.
    #[test]
    fn dp_matches_path_enumeration() {
        let (_, problem) = generate_instance(SizeLabel::Xs, 8).unwrap();
        let (traj, plan) =
            fragment_and_recombine(&problem, &SolverHandle::exhaustive(), 3).unwrap();
        let recombined = problem.cost_full(&traj).unwrap();

        let mut best = f64::INFINITY;
        let sizes = plan.pool_sizes();
        let total: usize = sizes.iter().product();
        for index in 0..total {
            let mut rest = index;
            let mut rows = Vec::new();
            for (t, &size) in sizes.iter().enumerate() {
                rows.push(plan.pools[t][rest % size].units.clone());
                rest /= size;
            }
            let candidate = Trajectory::from_rows(&rows, problem.budget).unwrap();
            best = best.min(problem.cost_full(&candidate).unwrap());
        }
        assert!((recombined - best).abs() < 1e-9, "{recombined} vs {best}");
    }

    /// Growing the pools never hurts: larger M is a superset relaxation.
    #[test]
    fn monotone_in_pool_size() {
        let (_, problem) = generate_instance(SizeLabel::Xs, 6).unwrap();
        let mut previous = f64::INFINITY;
        for m in [1usize, 2, 3, 8] {
            let (traj, _) =
                fragment_and_recombine(&problem, &SolverHandle::exhaustive(), m).unwrap();
            let cost = problem.cost_full(&traj).unwrap();
            assert!(cost <= previous + 1e-12, "M={m}: {cost} vs {previous}");
            previous = cost;
        }
    }
}
