//! Simulated annealing with a geometric temperature schedule and parallel
//! restarts.

use rand::Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::qubo::Qubo;
use crate::solvers::{worker_rng, Diagnostics, SamplePool, SolveResult};

/// Temperatures are multiples of the objective's single-flip magnitude, so
/// the defaults are scale-free.
#[derive(Debug, Clone, PartialEq)]
pub struct SaParams {
    pub sweeps: usize,
    pub restarts: usize,
    /// Starting temperature as a multiple of the coefficient spread.
    pub t_hot: f64,
    /// Final temperature as a multiple of the coefficient spread.
    pub t_cold: f64,
}

impl Default for SaParams {
    fn default() -> Self {
        Self { sweeps: 1000, restarts: 20, t_hot: 1.0, t_cold: 1e-3 }
    }
}

struct RestartOutcome {
    pool: SamplePool,
    trace: Vec<f64>,
    accepted: u64,
    proposed: u64,
}

pub(crate) fn solve(qubo: &Qubo, params: &SaParams, seed: u64, sample_cap: usize) -> Result<SolveResult> {
    let n = qubo.num_vars();
    let mut pool = SamplePool::new(sample_cap);
    if n == 0 {
        pool.insert(&[], qubo.offset());
        return super::result_from_pool(pool, Diagnostics::default());
    }

    let spread = qubo.flip_magnitude();
    let t_hot = params.t_hot * spread;
    let t_cold = params.t_cold * spread;
    let cooling = (t_cold / t_hot).powf(1.0 / (params.sweeps.max(2) - 1) as f64);
    let adjacency = qubo.adjacency();

    let outcomes: Vec<RestartOutcome> = (0..params.restarts as u64)
        .into_par_iter()
        .map(|restart| run_restart(qubo, params, &adjacency, seed, restart, t_hot, cooling, sample_cap))
        .collect();

    let mut accepted = 0u64;
    let mut proposed = 0u64;
    let mut trace = Vec::new();
    for (index, outcome) in outcomes.iter().enumerate() {
        if index == 0 {
            trace = outcome.trace.clone();
        }
        accepted += outcome.accepted;
        proposed += outcome.proposed;
        pool.merge(&outcome.pool);
    }
    let diagnostics = Diagnostics {
        sweeps: params.sweeps * params.restarts,
        energy_trace: trace,
        acceptance_rate: if proposed > 0 { accepted as f64 / proposed as f64 } else { 0.0 },
        expectation: None,
        notes: Vec::new(),
    };
    super::result_from_pool(pool, diagnostics)
}

#[allow(clippy::too_many_arguments)]
fn run_restart(
    qubo: &Qubo,
    params: &SaParams,
    adjacency: &[Vec<(usize, f64)>],
    seed: u64,
    restart: u64,
    t_hot: f64,
    cooling: f64,
    sample_cap: usize,
) -> RestartOutcome {
    let n = qubo.num_vars();
    let mut rng = worker_rng(seed, restart);
    let mut bits: Vec<u8> = (0..n).map(|_| rng.gen_range(0..=1u8)).collect();
    let mut cost = qubo.cost(&bits).expect("dimensions match");
    let mut pool = SamplePool::new(sample_cap);
    pool.insert(&bits, cost);

    let flip_delta = |bits: &[u8], i: usize| -> f64 {
        let mut delta = qubo.linear()[i];
        for &(j, coeff) in &adjacency[i] {
            if bits[j] != 0 {
                delta += coeff;
            }
        }
        if bits[i] != 0 {
            -delta
        } else {
            delta
        }
    };

    let mut local_best = cost;
    let improvement_margin = 1e-12 * (1.0 + qubo.coeff_abs_sum());
    let mut temperature = t_hot;
    let mut accepted = 0u64;
    let mut proposed = 0u64;
    let mut trace = Vec::with_capacity(params.sweeps);

    for _ in 0..params.sweeps {
        // single-bit Metropolis pass
        for i in 0..n {
            proposed += 1;
            let delta = flip_delta(&bits, i);
            if delta <= 0.0 || rng.gen::<f64>() < (-delta / temperature).exp() {
                bits[i] ^= 1;
                cost += delta;
                accepted += 1;
                if cost < local_best - improvement_margin {
                    local_best = cost;
                    let exact = qubo.cost(&bits).expect("dimensions match");
                    pool.insert(&bits, exact);
                }
            }
        }
        // pair-swap pass: exchange a coupled pair of opposite bits. Penalty-
        // encoded equality constraints freeze single-bit dynamics early, and
        // these moves keep constraint-preserving rearrangements alive.
        for i in 0..n {
            if adjacency[i].is_empty() {
                continue;
            }
            let &(j, coupling) = &adjacency[i][rng.gen_range(0..adjacency[i].len())];
            if bits[i] == bits[j] {
                continue;
            }
            proposed += 1;
            let sign_i = 1.0 - 2.0 * bits[i] as f64;
            let sign_j = 1.0 - 2.0 * bits[j] as f64;
            let delta = flip_delta(&bits, i) + flip_delta(&bits, j) + sign_i * sign_j * coupling;
            if delta <= 0.0 || rng.gen::<f64>() < (-delta / temperature).exp() {
                bits[i] ^= 1;
                bits[j] ^= 1;
                cost += delta;
                accepted += 1;
                if cost < local_best - improvement_margin {
                    local_best = cost;
                    let exact = qubo.cost(&bits).expect("dimensions match");
                    pool.insert(&bits, exact);
                }
            }
        }
        trace.push(cost);
        let exact = qubo.cost(&bits).expect("dimensions match");
        pool.insert(&bits, exact);
        temperature *= cooling;
    }
    RestartOutcome { pool, trace, accepted, proposed }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::{Backend, SolverHandle};

    fn sa_handle(seed: u64) -> SolverHandle {
        SolverHandle::new(Backend::Sa(SaParams {
            sweeps: 300,
            restarts: 4,
            ..SaParams::default()
        }))
        .with_seed(seed)
    }

    #[test]
    fn ferromagnetic_chain_ground_state() {
        // coupling −1 between neighbors: all-zeros or all-ones
        let n = 10;
        let mut qubo = Qubo::new(n);
        for i in 0..n - 1 {
            qubo.add_quadratic(i, i + 1, -1.0);
            qubo.add_linear(i, 0.5);
            qubo.add_linear(i + 1, 0.5);
        }
        let result = crate::solvers::solve(&qubo, &sa_handle(3)).unwrap();
        let all_zero = vec![0u8; n];
        let all_one = vec![1u8; n];
        assert!(result.best_bits == all_zero || result.best_bits == all_one);
    }

    #[test]
    fn zero_qubo_costs_zero() {
        let qubo = Qubo::new(5);
        let result = crate::solvers::solve(&qubo, &sa_handle(1)).unwrap();
        assert_eq!(result.best_cost, 0.0);
    }

    #[test]
    fn deterministic_under_seed() {
        let mut qubo = Qubo::new(8);
        for i in 0..8 {
            qubo.add_linear(i, if i % 2 == 0 { -0.7 } else { 0.3 });
        }
        for i in 0..7 {
            qubo.add_quadratic(i, i + 1, -0.4);
        }
        let a = crate::solvers::solve(&qubo, &sa_handle(77)).unwrap();
        let b = crate::solvers::solve(&qubo, &sa_handle(77)).unwrap();
        assert_eq!(a, b);
        let c = crate::solvers::solve(&qubo, &sa_handle(78)).unwrap();
        assert_eq!(a.best_cost, c.best_cost); // same optimum either way
    }
}
