//! A uniform solver contract over `Qubo` instances with five backends:
//! exhaustive enumeration, simulated annealing, simulated quantum annealing
//! (path-integral Monte Carlo), a matrix-product-state optimizer, and a
//! toy-scale variational eigensolver on a dense statevector.
//!
//! All stochastic backends are deterministic under (qubo, handle) including
//! the seed: every parallel worker owns its own counter-derived random
//! stream, so parallel and serial runs produce identical results.

mod exhaustive;
mod mps;
mod sa;
mod sqa;
mod vqe;

use std::collections::BTreeSet;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{FinqError, Result};
use crate::qubo::Qubo;

pub use mps::MpsParams;
pub use sa::SaParams;
pub use sqa::SqaParams;
pub use vqe::VqeParams;

/// Hard cap for the dense-statevector eigensolver.
pub const VQE_MAX_VARS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct ExhaustiveParams {
    /// Refuse instances with more variables than this (2^30 states is the
    /// practical desk-scale limit).
    pub max_vars: usize,
}

impl Default for ExhaustiveParams {
    fn default() -> Self {
        Self { max_vars: 30 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Backend {
    Exhaustive(ExhaustiveParams),
    Sa(SaParams),
    Sqa(SqaParams),
    Mps(MpsParams),
    Vqe(VqeParams),
}

impl Backend {
    pub fn name(&self) -> &'static str {
        match self {
            Backend::Exhaustive(_) => "exhaustive",
            Backend::Sa(_) => "sa",
            Backend::Sqa(_) => "sqa",
            Backend::Mps(_) => "mps",
            Backend::Vqe(_) => "vqe",
        }
    }
}

/// A configured solver: backend parameters, seed, and the cap on retained
/// candidate samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverHandle {
    pub backend: Backend,
    pub seed: u64,
    pub sample_cap: usize,
}

impl SolverHandle {
    pub fn new(backend: Backend) -> Self {
        Self { backend, seed: 0, sample_cap: 256 }
    }

    pub fn exhaustive() -> Self {
        Self::new(Backend::Exhaustive(ExhaustiveParams::default()))
    }

    pub fn sa() -> Self {
        Self::new(Backend::Sa(SaParams::default()))
    }

    pub fn sqa() -> Self {
        Self::new(Backend::Sqa(SqaParams::default()))
    }

    pub fn mps() -> Self {
        Self::new(Backend::Mps(MpsParams::default()))
    }

    pub fn vqe() -> Self {
        Self::new(Backend::Vqe(VqeParams::default()))
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_sample_cap(mut self, cap: usize) -> Self {
        self.sample_cap = cap.max(1);
        self
    }

    fn validate(&self) -> Result<()> {
        let err = |msg: String| Err(FinqError::Parameter(msg));
        match &self.backend {
            Backend::Exhaustive(p) => {
                if p.max_vars == 0 {
                    return err("exhaustive max_vars must be positive".into());
                }
            }
            Backend::Sa(p) => {
                if p.sweeps == 0 || p.restarts == 0 {
                    return err("sa sweeps and restarts must be positive".into());
                }
                if !(p.t_hot > 0.0 && p.t_cold > 0.0 && p.t_cold <= p.t_hot) {
                    return err("sa temperatures must satisfy 0 < t_cold ≤ t_hot".into());
                }
            }
            Backend::Sqa(p) => {
                if p.replicas < 2 {
                    return err(format!("sqa needs at least 2 replicas, got {}", p.replicas));
                }
                if p.sweeps == 0 || p.restarts == 0 {
                    return err("sqa sweeps and restarts must be positive".into());
                }
                if !(p.gamma_hot > 0.0 && p.gamma_cold > 0.0 && p.temperature > 0.0) {
                    return err("sqa field and temperature factors must be positive".into());
                }
            }
            Backend::Mps(p) => {
                if p.bond_dim == 0 {
                    return err("mps bond dimension must be ≥ 1".into());
                }
                if p.sweeps == 0 || p.samples == 0 || p.restarts == 0 {
                    return err("mps sweeps, samples and restarts must be positive".into());
                }
            }
            Backend::Vqe(p) => {
                if p.layers == 0 || p.max_iters == 0 || p.samples == 0 {
                    return err("vqe layers, max_iters and samples must be positive".into());
                }
                if !(p.learning_rate > 0.0) {
                    return err("vqe learning rate must be positive".into());
                }
            }
        }
        Ok(())
    }
}

/// Solver diagnostics: energy trace, sweeps performed, acceptance rate, and
/// (for the variational backends) the final state's expectation value.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Diagnostics {
    pub sweeps: usize,
    pub energy_trace: Vec<f64>,
    pub acceptance_rate: f64,
    pub expectation: Option<f64>,
    pub notes: Vec<String>,
}

/// Best bitstring found, its exact cost, and the retained candidate pool.
/// `samples` is sorted by cost ascending (ties by lexicographically smaller
/// bitstring) and every recorded cost is the exact `qubo.cost` of its bits.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub best_bits: Vec<u8>,
    pub best_cost: f64,
    pub samples: Vec<(Vec<u8>, f64)>,
    pub diagnostics: Diagnostics,
}

pub fn solve(qubo: &Qubo, handle: &SolverHandle) -> Result<SolveResult> {
    handle.validate()?;
    match &handle.backend {
        Backend::Exhaustive(p) => exhaustive::solve(qubo, p, handle.sample_cap),
        Backend::Sa(p) => sa::solve(qubo, p, handle.seed, handle.sample_cap),
        Backend::Sqa(p) => sqa::solve(qubo, p, handle.seed, handle.sample_cap),
        Backend::Mps(p) => mps::solve(qubo, p, handle.seed, handle.sample_cap),
        Backend::Vqe(p) => vqe::solve(qubo, p, handle.seed, handle.sample_cap),
    }
}

/// f64 wrapper ordered by `total_cmp`, for use in sorted containers. Solver
/// costs are always finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct TotalF64(pub f64);

impl Eq for TotalF64 {}

impl PartialOrd for TotalF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TotalF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Bounded pool of the best distinct bitstrings seen, ordered by
/// (cost, bits). Merging pools is deterministic regardless of insertion
/// order, which keeps parallel restarts reproducible.
#[derive(Debug, Clone)]
pub(crate) struct SamplePool {
    cap: usize,
    entries: BTreeSet<(TotalF64, Vec<u8>)>,
    seen: BTreeSet<Vec<u8>>,
}

impl SamplePool {
    pub fn new(cap: usize) -> Self {
        Self { cap: cap.max(1), entries: BTreeSet::new(), seen: BTreeSet::new() }
    }

    /// Insert bits with their exact cost. Returns true if retained.
    pub fn insert(&mut self, bits: &[u8], cost: f64) -> bool {
        if self.seen.contains(bits) {
            return false;
        }
        if self.entries.len() >= self.cap {
            let worst = self.entries.iter().next_back().expect("non-empty").clone();
            if (TotalF64(cost), bits) >= (worst.0, worst.1.as_slice()) {
                return false;
            }
            self.entries.remove(&worst);
            self.seen.remove(&worst.1);
        }
        self.seen.insert(bits.to_vec());
        self.entries.insert((TotalF64(cost), bits.to_vec()));
        true
    }

    /// Cheap pre-check: would a candidate with this cost possibly be kept?
    pub fn would_keep(&self, cost: f64) -> bool {
        if self.entries.len() < self.cap {
            return true;
        }
        match self.entries.iter().next_back() {
            Some((worst, _)) => cost <= worst.0,
            None => true,
        }
    }

    pub fn merge(&mut self, other: &SamplePool) {
        for (cost, bits) in &other.entries {
            self.insert(bits, cost.0);
        }
    }

    pub fn best(&self) -> Option<(&[u8], f64)> {
        self.entries.iter().next().map(|(c, b)| (b.as_slice(), c.0))
    }

    pub fn into_sorted(self) -> Vec<(Vec<u8>, f64)> {
        self.entries.into_iter().map(|(c, b)| (b, c.0)).collect()
    }
}

/// Independent random stream for worker `index` under a run seed.
pub(crate) fn worker_rng(seed: u64, index: u64) -> ChaCha8Rng {
    // splitmix64 over (seed, index) decorrelates adjacent worker seeds
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    ChaCha8Rng::seed_from_u64(z)
}

/// Result assembly shared by the stochastic backends.
pub(crate) fn result_from_pool(pool: SamplePool, diagnostics: Diagnostics) -> Result<SolveResult> {
    let (bits, cost) = pool
        .best()
        .map(|(b, c)| (b.to_vec(), c))
        .ok_or_else(|| FinqError::NonConvergent("solver produced no candidates".into()))?;
    Ok(SolveResult {
        best_bits: bits,
        best_cost: cost,
        samples: pool.into_sorted(),
        diagnostics,
    })
}
