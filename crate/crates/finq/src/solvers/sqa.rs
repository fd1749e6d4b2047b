//! Simulated quantum annealing: path-integral Monte Carlo over Trotter
//! replicas of the classical Ising system, with a decreasing transverse
//! field.
//!
//! The QUBO is mapped to spins s = 2x − 1. The effective model couples P
//! replicas of the spin configuration along the imaginary-time direction
//! (periodic); the inter-replica coupling J⊥ = −(P·T/2)·ln tanh(Γ/(P·T))
//! follows the standard Suzuki–Trotter mapping and stiffens as Γ → 0.

use rand::Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::qubo::Qubo;
use crate::solvers::{worker_rng, Diagnostics, SamplePool, SolveResult};

/// Field and temperature values are multiples of the objective's single-flip
/// magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct SqaParams {
    /// Trotter replicas P.
    pub replicas: usize,
    pub sweeps: usize,
    pub restarts: usize,
    /// Initial transverse field factor.
    pub gamma_hot: f64,
    /// Final transverse field factor (kept > 0 so J⊥ stays finite).
    pub gamma_cold: f64,
    /// Simulation temperature factor.
    pub temperature: f64,
}

impl Default for SqaParams {
    fn default() -> Self {
        Self {
            replicas: 20,
            sweeps: 1000,
            restarts: 4,
            gamma_hot: 3.0,
            gamma_cold: 0.01,
            temperature: 0.05,
        }
    }
}

/// Spin-space image of a QUBO: E(s) = constant + h·s + Σ_{i<j} J_ij s_i s_j.
struct IsingForm {
    h: Vec<f64>,
    adjacency: Vec<Vec<(usize, f64)>>,
    constant: f64,
}

impl IsingForm {
    fn from_qubo(qubo: &Qubo) -> Self {
        let n = qubo.num_vars();
        let mut h = vec![0.0; n];
        let mut constant = qubo.offset();
        for (i, &l) in qubo.linear().iter().enumerate() {
            h[i] += 0.5 * l;
            constant += 0.5 * l;
        }
        let mut adjacency = vec![Vec::new(); n];
        for (&(i, j), &c) in qubo.quadratic() {
            let coupling = 0.25 * c;
            adjacency[i].push((j, coupling));
            adjacency[j].push((i, coupling));
            h[i] += coupling;
            h[j] += coupling;
            constant += coupling;
        }
        Self { h, adjacency, constant }
    }

    fn energy(&self, spins: &[i8]) -> f64 {
        let mut e = self.constant;
        for (i, &s) in spins.iter().enumerate() {
            e += self.h[i] * s as f64;
            for &(j, coupling) in &self.adjacency[i] {
                if j > i {
                    e += coupling * (s as f64) * spins[j] as f64;
                }
            }
        }
        e
    }

    /// Classical energy change of flipping spin i in `spins`.
    fn flip_delta(&self, spins: &[i8], i: usize) -> f64 {
        let mut field = self.h[i];
        for &(j, coupling) in &self.adjacency[i] {
            field += coupling * spins[j] as f64;
        }
        -2.0 * spins[i] as f64 * field
    }
}

fn spins_to_bits(spins: &[i8]) -> Vec<u8> {
    spins.iter().map(|&s| if s > 0 { 1 } else { 0 }).collect()
}

struct SqaRun {
    pub pool: SamplePool,
    pub trace: Vec<f64>,
    pub accepted: u64,
    pub proposed: u64,
    /// Incrementally tracked classical energies of the final replicas,
    /// paired with their bitstrings; used to cross-check bookkeeping.
    #[cfg_attr(not(test), allow(dead_code))]
    pub final_replicas: Vec<(Vec<u8>, f64)>,
}

fn run_restart(
    qubo: &Qubo,
    ising: &IsingForm,
    params: &SqaParams,
    seed: u64,
    restart: u64,
    sample_cap: usize,
) -> SqaRun {
    let n = qubo.num_vars();
    let p = params.replicas;
    let spread = qubo.flip_magnitude();
    let temperature = params.temperature * spread;
    let pt = temperature * p as f64;

    let mut rng = worker_rng(seed, restart);
    let mut replicas: Vec<Vec<i8>> = (0..p)
        .map(|_| (0..n).map(|_| if rng.gen::<bool>() { 1i8 } else { -1i8 }).collect())
        .collect();
    let mut energies: Vec<f64> = replicas.iter().map(|s| ising.energy(s)).collect();

    let mut pool = SamplePool::new(sample_cap);
    for (k, replica) in replicas.iter().enumerate() {
        let bits = spins_to_bits(replica);
        pool.insert(&bits, qubo.cost(&bits).expect("dimensions match"));
        let _ = k;
    }

    let mut best_seen = f64::INFINITY;
    let mut trace = Vec::with_capacity(params.sweeps);
    let mut accepted = 0u64;
    let sweeps = params.sweeps.max(2);

    for sweep in 0..params.sweeps {
        let ramp = sweep as f64 / (sweeps - 1) as f64;
        let gamma = (params.gamma_hot + (params.gamma_cold - params.gamma_hot) * ramp) * spread;
        let j_perp = -0.5 * pt * (gamma / pt).tanh().ln();

        for k in 0..p {
            let up = (k + 1) % p;
            let down = (k + p - 1) % p;
            for i in 0..n {
                let delta_classical = ising.flip_delta(&replicas[k], i);
                let neighbor_sum = (replicas[up][i] + replicas[down][i]) as f64;
                let delta_trotter = delta_classical / p as f64
                    + 2.0 * j_perp * replicas[k][i] as f64 * neighbor_sum;
                if delta_trotter <= 0.0
                    || rng.gen::<f64>() < (-delta_trotter / temperature).exp()
                {
                    replicas[k][i] = -replicas[k][i];
                    energies[k] += delta_classical;
                    accepted += 1;
                    if energies[k] < best_seen - 1e-12 * spread {
                        best_seen = energies[k];
                        let bits = spins_to_bits(&replicas[k]);
                        pool.insert(&bits, qubo.cost(&bits).expect("dimensions match"));
                    }
                }
            }
        }
        let sweep_best = energies.iter().copied().fold(f64::INFINITY, f64::min);
        trace.push(sweep_best);
    }

    // retain every final replica as a candidate
    let mut final_replicas = Vec::with_capacity(p);
    for (k, replica) in replicas.iter().enumerate() {
        let bits = spins_to_bits(replica);
        pool.insert(&bits, qubo.cost(&bits).expect("dimensions match"));
        final_replicas.push((bits, energies[k]));
    }
    SqaRun {
        pool,
        trace,
        accepted,
        proposed: (params.sweeps * p * n) as u64,
        final_replicas,
    }
}

pub(crate) fn solve(qubo: &Qubo, params: &SqaParams, seed: u64, sample_cap: usize) -> Result<SolveResult> {
    let n = qubo.num_vars();
    let mut pool = SamplePool::new(sample_cap);
    if n == 0 {
        pool.insert(&[], qubo.offset());
        return super::result_from_pool(pool, Diagnostics::default());
    }
    let ising = IsingForm::from_qubo(qubo);
    let runs: Vec<SqaRun> = (0..params.restarts as u64)
        .into_par_iter()
        .map(|restart| run_restart(qubo, &ising, params, seed, restart, sample_cap))
        .collect();

    let mut accepted = 0u64;
    let mut proposed = 0u64;
    let mut trace = Vec::new();
    for (index, run) in runs.iter().enumerate() {
        if index == 0 {
            trace = run.trace.clone();
        }
        accepted += run.accepted;
        proposed += run.proposed;
        pool.merge(&run.pool);
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
