//! Coarse index-level solve followed by asset-level refinement.
//!
//! The clustered problem treats each cluster as a synthetic index whose
//! returns are the representative-weighted asset returns. Its solution is
//! expanded back to assets by largest-remainder rounding of the
//! representative weights, repaired to the exact budget, and polished by a
//! restricted local search that only moves units within clusters.

use nalgebra::DMatrix;

use crate::error::{FinqError, Result};
use crate::portfolio::{PortfolioProblem, Trajectory, TransactionCost};
use crate::qubo::Qubo;
use crate::solvers::{solve, SolverHandle};

use super::cluster::AssetClustering;

/// Build the index-level problem induced by a clustering. The per-index cap
/// is uniform: min(budget, largest cluster capacity). A coarse solution may
/// overfill a small cluster; expansion clips it to the member caps and the
/// budget repair reassigns the surplus.
pub fn clustered_problem(
    problem: &PortfolioProblem,
    clustering: &AssetClustering,
) -> Result<PortfolioProblem> {
    let n = problem.num_assets();
    if clustering.assignments.len() != n {
        return Err(FinqError::Dimension(format!(
            "clustering covers {} assets, problem has {n}",
            clustering.assignments.len()
        )));
    }
    let c = clustering.n_clusters;
    let t = problem.num_steps();
    let members = clustering.members();

    // representative-weighted moments: μ̃ = W μ, Σ̃ = W Σ Wᵀ
    let w = DMatrix::from_fn(c, n, |cluster, asset| clustering.representatives[cluster][asset]);
    let mu = DMatrix::from_fn(t, c, |step, cluster| {
        (0..n).map(|a| w[(cluster, a)] * problem.mu[(step, a)]).sum()
    });
    let sigma: Vec<DMatrix<f64>> = (0..t).map(|step| &w * &problem.sigma[step] * w.transpose()).collect();
    let lambda = match &problem.lambda {
        TransactionCost::Scalar(l) => TransactionCost::Scalar(*l),
        TransactionCost::PerAsset(v) => TransactionCost::PerAsset(
            (0..c)
                .map(|cluster| (0..n).map(|a| w[(cluster, a)] * v[a]).sum())
                .collect(),
        ),
    };

    let cap = members
        .iter()
        .map(|m| {
            (m.len() as u64 * problem.max_per_asset as u64).min(problem.budget as u64) as u32
        })
        .max()
        .expect("at least one cluster");
    let bits = 64 - u64::from(cap).leading_zeros() as usize; // fits cap exactly

    let coarse = PortfolioProblem::new(
        mu,
        sigma,
        problem.gamma,
        lambda,
        problem.budget,
        bits.max(1),
    )?
    .with_cap(cap)?
    .with_rho(problem.rho)?;
    Ok(coarse)
}

/// Distribute `total` units over `weights` by largest remainder, respecting
/// the per-slot `cap`. Ties go to the smaller index.
fn largest_remainder(total: u32, weights: &[f64], cap: u32) -> Vec<u32> {
    let slots = weights.len();
    let weight_sum: f64 = weights.iter().sum();
    let target: Vec<f64> = if weight_sum > 0.0 {
        weights.iter().map(|w| total as f64 * w / weight_sum).collect()
    } else {
        vec![total as f64 / slots as f64; slots]
    };
    let mut units: Vec<u32> = target.iter().map(|x| (x.floor() as u32).min(cap)).collect();
    let mut assigned: u32 = units.iter().sum();
    // order by descending remainder, index tie-break
    let mut order: Vec<usize> = (0..slots).collect();
    order.sort_by(|&a, &b| {
        let ra = target[a] - target[a].floor();
        let rb = target[b] - target[b].floor();
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    let mut cursor = 0usize;
    while assigned < total {
        let slot = order[cursor % slots];
        if units[slot] < cap {
            units[slot] += 1;
            assigned += 1;
        }
        cursor += 1;
        if cursor > slots * (total as usize + 1) {
            break; // capacity exhausted; caller repairs
        }
    }
    units
}

/// Solve the index-level problem, expand to assets, repair the budget, and
/// run within-cluster single-unit local search on the full objective.
pub fn coarse_solve_then_refine(
    problem: &PortfolioProblem,
    clustering: &AssetClustering,
    handle: &SolverHandle,
) -> Result<Trajectory> {
    let coarse = clustered_problem(problem, clustering)?;
    let qubo: Qubo = coarse.build_qubo()?;
    let result = solve(&qubo, handle)?;
    let coarse_traj = coarse.decode(&result.best_bits)?;

    let members = clustering.members();
    let t = problem.num_steps();
    let n = problem.num_assets();
    let cap = problem.max_per_asset;

    // expand cluster holdings to asset holdings
    let mut rows: Vec<Vec<u32>> = vec![vec![0; n]; t];
    for step in 0..t {
        for (cluster, assets) in members.iter().enumerate() {
            let cluster_units = coarse_traj.holdings()[(step, cluster)];
            let weights: Vec<f64> = assets
                .iter()
                .map(|&a| clustering.representatives[cluster][a])
                .collect();
            let split = largest_remainder(cluster_units, &weights, cap);
            for (&asset, units) in assets.iter().zip(split) {
                rows[step][asset] = units;
            }
        }
    }

    // repair any budget mismatch with greedy marginal-cost unit moves
    for step in 0..t {
        loop {
            let total: i64 = rows[step].iter().map(|&u| u as i64).sum();
            let deficit = problem.budget as i64 - total;
            if deficit == 0 {
                break;
            }
            let mut best: Option<(f64, usize)> = None;
            for asset in 0..n {
                let feasible = if deficit > 0 {
                    rows[step][asset] < cap
                } else {
                    rows[step][asset] > 0
                };
                if !feasible {
                    continue;
                }
                let mut candidate = rows.clone();
                if deficit > 0 {
                    candidate[step][asset] += 1;
                } else {
                    candidate[step][asset] -= 1;
                }
                let traj = Trajectory::from_rows(&candidate, problem.budget)?;
                let cost = problem.cost_full(&traj)?;
                if best.map_or(true, |(bc, _)| cost < bc) {
                    best = Some((cost, asset));
                }
            }
            match best {
                Some((_, asset)) => {
                    if deficit > 0 {
                        rows[step][asset] += 1;
                    } else {
                        rows[step][asset] -= 1;
                    }
                }
                None => break, // no capacity left; leave as-is
            }
        }
    }

    // restricted local search: move one unit between assets of the same
    // cluster, first improvement, until stable
    let mut current = Trajectory::from_rows(&rows, problem.budget)?;
    let mut current_cost = problem.cost_full(&current)?;
    let margin = 1e-12 * (1.0 + current_cost.abs());
    let max_rounds = 4 * t * n * (problem.budget as usize + 1);
    'outer: for _ in 0..max_rounds {
        let mut improved = false;
        for step in 0..t {
            for assets in &members {
                for &from in assets {
                    if rows[step][from] == 0 {
                        continue;
                    }
                    for &to in assets {
                        if to == from || rows[step][to] >= cap {
                            continue;
                        }
                        rows[step][from] -= 1;
                        rows[step][to] += 1;
                        let trial = Trajectory::from_rows(&rows, problem.budget)?;
                        let cost = problem.cost_full(&trial)?;
                        if cost < current_cost - margin {
                            current = trial;
                            current_cost = cost;
                            improved = true;
                        } else {
                            rows[step][from] += 1;
                            rows[step][to] -= 1;
                        }
                    }
                }
            }
        }
        if !improved {
            break 'outer;
        }
    }
    Ok(current)
}
