//! Toy-scale variational eigensolver on a dense statevector.
//!
//! Hardware-efficient ansatz: layers of per-qubit Ry rotations interleaved
//! with a CZ entangling ring, plus a final rotation layer. All gates are
//! real, so the statevector stays in R^(2^n). Parameters are optimized with
//! Adam on exact parameter-shift gradients; the answer is the best bitstring
//! sampled from the final state.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{FinqError, Result};
use crate::qubo::Qubo;
use crate::solvers::{worker_rng, Diagnostics, SamplePool, SolveResult, VQE_MAX_VARS};

#[derive(Debug, Clone, PartialEq)]
pub struct VqeParams {
    /// Entangling layers (each preceded by a rotation layer).
    pub layers: usize,
    pub max_iters: usize,
    pub learning_rate: f64,
    /// Bitstrings measured from the optimized state.
    pub samples: usize,
}

impl Default for VqeParams {
    fn default() -> Self {
        Self { layers: 3, max_iters: 500, learning_rate: 0.1, samples: 512 }
    }
}

/// Per-basis-state cost table e[x] = qubo.cost(bits(x)).
fn energy_table(qubo: &Qubo) -> Vec<f64> {
    let n = qubo.num_vars();
    let size = 1usize << n;
    let mut e = vec![qubo.offset(); size];
    for (i, &l) in qubo.linear().iter().enumerate() {
        if l == 0.0 {
            continue;
        }
        let bit = 1usize << i;
        for x in 0..size {
            if x & bit != 0 {
                e[x] += l;
            }
        }
    }
    for (&(i, j), &c) in qubo.quadratic() {
        let mask = (1usize << i) | (1usize << j);
        for x in 0..size {
            if x & mask == mask {
                e[x] += c;
            }
        }
    }
    e
}

struct Ansatz {
    n: usize,
    layers: usize,
}

impl Ansatz {
    fn num_params(&self) -> usize {
        self.n * (self.layers + 1)
    }

    fn prepare(&self, theta: &[f64]) -> Vec<f64> {
        let size = 1usize << self.n;
        let mut state = vec![0.0; size];
        state[0] = 1.0;
        for layer in 0..self.layers {
            for q in 0..self.n {
                apply_ry(&mut state, self.n, q, theta[layer * self.n + q]);
            }
            apply_cz_ring(&mut state, self.n);
        }
        for q in 0..self.n {
            apply_ry(&mut state, self.n, q, theta[self.layers * self.n + q]);
        }
        state
    }
}

fn apply_ry(state: &mut [f64], n: usize, qubit: usize, theta: f64) {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let bit = 1usize << qubit;
    let size = 1usize << n;
    let mut x = 0usize;
    while x < size {
        if x & bit == 0 {
            let partner = x | bit;
            let a = state[x];
            let b = state[partner];
            state[x] = c * a - s * b;
            state[partner] = s * a + c * b;
        }
        x += 1;
    }
}

fn apply_cz_ring(state: &mut [f64], n: usize) {
    if n < 2 {
        return;
    }
    let mut pairs: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    if n > 2 {
        pairs.push((n - 1, 0));
    }
    for (a, b) in pairs {
        let mask = (1usize << a) | (1usize << b);
        for (x, amp) in state.iter_mut().enumerate() {
            if x & mask == mask {
                *amp = -*amp;
            }
        }
    }
}

fn expectation(state: &[f64], energies: &[f64]) -> f64 {
    state
        .iter()
        .zip(energies)
        .map(|(amp, e)| amp * amp * e)
        .sum()
}

fn sample_state(state: &[f64], n: usize, rng: &mut ChaCha8Rng) -> usize {
    let draw: f64 = rng.gen();
    let mut acc = 0.0;
    for (x, amp) in state.iter().enumerate() {
        acc += amp * amp;
        if draw < acc {
            return x;
        }
    }
    (1usize << n) - 1
}

fn index_to_bits(x: usize, n: usize) -> Vec<u8> {
    (0..n).map(|i| (x >> i & 1) as u8).collect()
}

pub(crate) fn solve(qubo: &Qubo, params: &VqeParams, seed: u64, sample_cap: usize) -> Result<SolveResult> {
    let n = qubo.num_vars();
    if n > VQE_MAX_VARS {
        return Err(FinqError::Capacity(format!(
            "vqe statevector simulation supports at most {VQE_MAX_VARS} variables, instance has {n}"
        )));
    }
    let mut pool = SamplePool::new(sample_cap);
    if n == 0 {
        pool.insert(&[], qubo.offset());
        return super::result_from_pool(pool, Diagnostics::default());
    }

    let energies = energy_table(qubo);
    let ansatz = Ansatz { n, layers: params.layers };
    let scale = 1.0 + qubo.coeff_abs_sum();
    let mut rng = worker_rng(seed, 0);
    let mut theta: Vec<f64> = (0..ansatz.num_params())
        .map(|_| rng.gen_range(-0.3..0.3))
        .collect();

    // Adam on parameter-shift gradients.
    let (beta1, beta2, eps) = (0.9, 0.999, 1e-8);
    let mut m = vec![0.0; theta.len()];
    let mut v = vec![0.0; theta.len()];
    let mut trace = Vec::with_capacity(params.max_iters);
    let mut prev = f64::INFINITY;
    let mut stall = 0usize;
    let half_pi = std::f64::consts::FRAC_PI_2;

    for iter in 0..params.max_iters {
        let energy = expectation(&ansatz.prepare(&theta), &energies);
        trace.push(energy);
        if (prev - energy).abs() < 1e-10 * scale {
            stall += 1;
            if stall >= 10 {
                break;
            }
        } else {
            stall = 0;
        }
        prev = energy;

        for k in 0..theta.len() {
            let original = theta[k];
            theta[k] = original + half_pi;
            let plus = expectation(&ansatz.prepare(&theta), &energies);
            theta[k] = original - half_pi;
            let minus = expectation(&ansatz.prepare(&theta), &energies);
            theta[k] = original;
            let grad = 0.5 * (plus - minus);
            m[k] = beta1 * m[k] + (1.0 - beta1) * grad;
            v[k] = beta2 * v[k] + (1.0 - beta2) * grad * grad;
            let m_hat = m[k] / (1.0 - beta1.powi(iter as i32 + 1));
            let v_hat = v[k] / (1.0 - beta2.powi(iter as i32 + 1));
            theta[k] -= params.learning_rate * m_hat / (v_hat.sqrt() + eps);
        }
    }

    let state = ansatz.prepare(&theta);
    let final_energy = expectation(&state, &energies);

    // most probable basis state plus measured samples
    let argmax = state
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| (*a * *a).total_cmp(&(*b * *b)))
        .map(|(x, _)| x)
        .unwrap_or(0);
    let bits = index_to_bits(argmax, n);
    pool.insert(&bits, qubo.cost(&bits)?);
    for _ in 0..params.samples {
        let x = sample_state(&state, n, &mut rng);
        let bits = index_to_bits(x, n);
        let cost = qubo.cost(&bits)?;
        pool.insert(&bits, cost);
    }

    let diagnostics = Diagnostics {
        sweeps: trace.len(),
        energy_trace: trace,
        acceptance_rate: 0.0,
        expectation: Some(final_energy),
        notes: Vec::new(),
    };
    super::result_from_pool(pool, diagnostics)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::{Backend, SolverHandle};

    fn vqe_handle(seed: u64) -> SolverHandle {
        SolverHandle::new(Backend::Vqe(VqeParams {
            layers: 2,
            max_iters: 120,
            samples: 128,
            ..VqeParams::default()
        }))
        .with_seed(seed)
    }

    #[test]
    fn one_variable_exact() {
        let mut qubo = Qubo::new(1);
        qubo.add_linear(0, -2.5);
        qubo.add_offset(1.0);
        let result = crate::solvers::solve(&qubo, &vqe_handle(1)).unwrap();
        assert_eq!(result.best_bits, vec![1]);
        assert_eq!(result.best_cost, -1.5);
    }

    #[test]
    fn capacity_cap_is_enforced() {
        let qubo = Qubo::new(VQE_MAX_VARS + 1);
        assert!(matches!(
            crate::solvers::solve(&qubo, &vqe_handle(1)),
            Err(FinqError::Capacity(_))
        ));
    }

    #[test]
    fn expectation_respects_variational_bound() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let n = 5;
        let mut qubo = Qubo::new(n);
        for i in 0..n {
            qubo.add_linear(i, rng.gen_range(-1.5..1.5));
            for j in i + 1..n {
                qubo.add_quadratic(i, j, rng.gen_range(-1.0..1.0));
            }
        }
        let exact = crate::solvers::solve(&qubo, &SolverHandle::exhaustive()).unwrap();
        let result = crate::solvers::solve(&qubo, &vqe_handle(3)).unwrap();
        let expectation = result.diagnostics.expectation.unwrap();
        assert!(expectation >= exact.best_cost - 1e-9);
        assert!(result.best_cost >= exact.best_cost - 1e-12);
    }

    #[test]
    fn energy_table_matches_cost() {
        let mut qubo = Qubo::new(3);
        qubo.add_offset(0.5);
        qubo.add_linear(0, -1.0);
        qubo.add_linear(2, 2.0);
        qubo.add_quadratic(0, 2, -3.0);
        let table = energy_table(&qubo);
        for x in 0..8usize {
            let bits = index_to_bits(x, 3);
            assert_eq!(table[x], qubo.cost(&bits).unwrap());
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let mut qubo = Qubo::new(3);
        qubo.add_linear(0, -1.0);
        qubo.add_quadratic(0, 1, 0.7);
        let a = crate::solvers::solve(&qubo, &vqe_handle(11)).unwrap();
        let b = crate::solvers::solve(&qubo, &vqe_handle(11)).unwrap();
        assert_eq!(a, b);
    }
}
