//! Exhaustive enumeration over all 2^n assignments with Gray-code
//! single-flip cost updates.

use crate::error::{FinqError, Result};
use crate::qubo::Qubo;
use crate::solvers::{Diagnostics, ExhaustiveParams, SamplePool, SolveResult};

pub(crate) fn solve(qubo: &Qubo, params: &ExhaustiveParams, sample_cap: usize) -> Result<SolveResult> {
    let n = qubo.num_vars();
    if n > params.max_vars {
        return Err(FinqError::Capacity(format!(
            "exhaustive solver supports at most {} variables, instance has {n}",
            params.max_vars
        )));
    }
    let mut pool = SamplePool::new(sample_cap);
    if n == 0 {
        pool.insert(&[], qubo.offset());
        return super::result_from_pool(pool, Diagnostics::default());
    }

    let adjacency = qubo.adjacency();
    let mut bits = vec![0u8; n];
    let mut running = qubo.cost(&bits)?;
    // Slack above the pool's admission threshold that forces an exact
    // re-evaluation; absorbs Gray-code accumulation drift so ties are
    // compared on exact costs.
    let guard = 1e-9 * (1.0 + qubo.coeff_abs_sum());

    pool.insert(&bits, running);
    let total: u64 = 1 << n;
    for step in 1..total {
        let flip = step.trailing_zeros() as usize;
        let mut delta = qubo.linear()[flip];
        for &(j, coeff) in &adjacency[flip] {
            if bits[j] != 0 {
                delta += coeff;
            }
        }
        if bits[flip] == 0 {
            running += delta;
        } else {
            running -= delta;
        }
        bits[flip] ^= 1;

        if pool.would_keep(running - guard) || pool.would_keep(running + guard) {
            let exact = qubo.cost(&bits)?;
            pool.insert(&bits, exact);
        }
        // periodic refresh keeps drift bounded on long enumerations
        if step & 0xF_FFFF == 0 {
            running = qubo.cost(&bits)?;
        }
    }
    super::result_from_pool(pool, Diagnostics::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::SolverHandle;

    #[test]
    fn single_variable_minimum() {
        let mut qubo = Qubo::new(1);
        qubo.add_linear(0, -1.0);
        let result = crate::solvers::solve(&qubo, &SolverHandle::exhaustive()).unwrap();
        assert_eq!(result.best_bits, vec![1]);
        assert_eq!(result.best_cost, -1.0);
    }

    #[test]
    fn zero_qubo_ties_break_to_all_zeros() {
        let qubo = Qubo::new(4);
        let result = crate::solvers::solve(&qubo, &SolverHandle::exhaustive()).unwrap();
        assert_eq!(result.best_bits, vec![0, 0, 0, 0]);
        assert_eq!(result.best_cost, 0.0);
    }

    #[test]
    fn matches_naive_enumeration() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10 {
            let n = rng.gen_range(2..=8);
            let mut qubo = Qubo::new(n);
            qubo.add_offset(rng.gen_range(-1.0..1.0));
            for i in 0..n {
                qubo.add_linear(i, rng.gen_range(-2.0..2.0));
                for j in i + 1..n {
                    if rng.gen_bool(0.5) {
                        qubo.add_quadratic(i, j, rng.gen_range(-2.0..2.0));
                    }
                }
            }
            let result = crate::solvers::solve(&qubo, &SolverHandle::exhaustive()).unwrap();
            let mut best = f64::INFINITY;
            let mut best_bits = Vec::new();
            for assignment in 0u64..(1 << n) {
                let bits: Vec<u8> = (0..n).map(|i| (assignment >> i & 1) as u8).collect();
                let cost = qubo.cost(&bits).unwrap();
                if cost < best || (cost == best && bits < best_bits) {
                    best = cost;
                    best_bits = bits;
                }
            }
            assert_eq!(result.best_cost, best);
            assert_eq!(result.best_bits, best_bits);
            // samples contract: exact costs, ascending order
            for window in result.samples.windows(2) {
                assert!(window[0].1 <= window[1].1);
            }
            for (bits, cost) in &result.samples {
                assert_eq!(*cost, qubo.cost(bits).unwrap());
            }
        }
    }

    #[test]
    fn capacity_error_names_the_cap() {
        let qubo = Qubo::new(31);
        match crate::solvers::solve(&qubo, &SolverHandle::exhaustive()) {
            Err(FinqError::Capacity(msg)) => assert!(msg.contains("30")),
            other => panic!("expected capacity error, got {other:?}"),
        }
    }
}
