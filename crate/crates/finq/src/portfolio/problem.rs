//! Multi-period integer portfolio objective and its QUBO form.
//!
//! Holdings are integers n_tn ∈ [0, K′], weights ω_tn = n_tn / K. The cost
//! over a trajectory is
//!
//!   Σ_t [ −μ_t·ω_t + (γ/2)·ω_tᵀ Σ_t ω_t + λ‖ω_t − ω_{t−1}‖² ]
//!     + ρ Σ_t (Σ_n ω_tn − 1)²
//!
//! with ω_0 = 0 (the investor starts all-cash, so the first period pays full
//! purchase costs). Each holding is encoded on `bits_per_asset` bits whose
//! weights sum to exactly K′, so the per-asset cap is enforced by the
//! encoding range itself.

use nalgebra::DMatrix;

use crate::error::{FinqError, Result};
use crate::qubo::Qubo;

/// Scalar or per-asset transaction cost λ.
#[derive(Debug, Clone, PartialEq)]
pub enum TransactionCost {
    Scalar(f64),
    PerAsset(Vec<f64>),
}

impl TransactionCost {
    fn for_asset(&self, asset: usize) -> f64 {
        match self {
            TransactionCost::Scalar(l) => *l,
            TransactionCost::PerAsset(v) => v[asset],
        }
    }

    fn max(&self) -> f64 {
        match self {
            TransactionCost::Scalar(l) => *l,
            TransactionCost::PerAsset(v) => v.iter().copied().fold(0.0, f64::max),
        }
    }

    fn validate(&self, num_assets: usize) -> Result<()> {
        let all_ok = match self {
            TransactionCost::Scalar(l) => *l >= 0.0 && l.is_finite(),
            TransactionCost::PerAsset(v) => {
                if v.len() != num_assets {
                    return Err(FinqError::Dimension(format!(
                        "{} transaction costs for {num_assets} assets",
                        v.len()
                    )));
                }
                v.iter().all(|l| *l >= 0.0 && l.is_finite())
            }
        };
        if all_ok {
            Ok(())
        } else {
            Err(FinqError::Parameter("transaction costs must be nonnegative".into()))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PortfolioProblem {
    /// T × N expected returns per step.
    pub mu: DMatrix<f64>,
    /// One N × N covariance per step.
    pub sigma: Vec<DMatrix<f64>>,
    /// Risk aversion γ.
    pub gamma: f64,
    /// Transaction cost λ.
    pub lambda: TransactionCost,
    /// Budget-normalization penalty weight ρ.
    pub rho: f64,
    /// Total investment units K.
    pub budget: u32,
    /// Per-asset cap K′.
    pub max_per_asset: u32,
    /// Bits per asset-time holding variable.
    pub bits_per_asset: usize,
}

impl PortfolioProblem {
    /// Builds a problem with the default cap K′ = 2^bits − 1 and the default
    /// dominant ρ. Covariances must be symmetric positive semidefinite up to
    /// a −1e-10 eigenvalue tolerance.
    pub fn new(
        mu: DMatrix<f64>,
        sigma: Vec<DMatrix<f64>>,
        gamma: f64,
        lambda: TransactionCost,
        budget: u32,
        bits_per_asset: usize,
    ) -> Result<Self> {
        if bits_per_asset == 0 || bits_per_asset > 31 {
            return Err(FinqError::Parameter(format!(
                "bits_per_asset must be in 1..=31, got {bits_per_asset}"
            )));
        }
        let max_per_asset = ((1u64 << bits_per_asset) - 1) as u32;
        let mut problem = Self {
            mu,
            sigma,
            gamma,
            lambda,
            rho: 0.0,
            budget,
            max_per_asset,
            bits_per_asset,
        };
        problem.validate()?;
        problem.rho = problem.default_rho();
        Ok(problem)
    }

    pub fn with_rho(mut self, rho: f64) -> Result<Self> {
        if !(rho >= 0.0) || !rho.is_finite() {
            return Err(FinqError::Parameter(format!("rho must be nonnegative, got {rho}")));
        }
        self.rho = rho;
        Ok(self)
    }

    /// Override the per-asset cap. The cap must be representable on the
    /// configured bits: 2^(bits−1) − 1 ≤ K′ ≤ 2^bits − 1.
    pub fn with_cap(mut self, cap: u32) -> Result<Self> {
        self.max_per_asset = cap;
        self.bit_weights()?;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        let t = self.mu.nrows();
        let n = self.mu.ncols();
        if t == 0 || n == 0 {
            return Err(FinqError::Dimension("problem needs ≥ 1 step and ≥ 1 asset".into()));
        }
        if self.sigma.len() != t {
            return Err(FinqError::Dimension(format!(
                "{} covariance matrices for {t} steps",
                self.sigma.len()
            )));
        }
        for (step, cov) in self.sigma.iter().enumerate() {
            if cov.nrows() != n || cov.ncols() != n {
                return Err(FinqError::Dimension(format!(
                    "covariance at step {step} is {}×{}, expected {n}×{n}",
                    cov.nrows(),
                    cov.ncols()
                )));
            }
            let asym = (cov - cov.transpose()).abs().max();
            if asym > 1e-9 * (1.0 + cov.abs().max()) {
                return Err(FinqError::Data(format!(
                    "covariance at step {step} is not symmetric (max asymmetry {asym})"
                )));
            }
            let eigen = cov.clone().symmetric_eigen();
            let min_eig = eigen.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
            if min_eig < -1e-10 * (1.0 + cov.abs().max()) {
                return Err(FinqError::Data(format!(
                    "covariance at step {step} has negative eigenvalue {min_eig}"
                )));
            }
        }
        if !self.gamma.is_finite() || self.gamma < 0.0 {
            return Err(FinqError::Parameter(format!(
                "risk aversion must be nonnegative, got {}",
                self.gamma
            )));
        }
        self.lambda.validate(n)?;
        if self.budget == 0 {
            return Err(FinqError::Parameter("budget must be positive".into()));
        }
        if self.budget as u64 > n as u64 * self.max_per_asset as u64 {
            return Err(FinqError::Parameter(format!(
                "budget {} exceeds total capacity {}×{}",
                self.budget, n, self.max_per_asset
            )));
        }
        Ok(())
    }

    pub fn num_steps(&self) -> usize {
        self.mu.nrows()
    }

    pub fn num_assets(&self) -> usize {
        self.mu.ncols()
    }

    pub fn num_qubits(&self) -> usize {
        self.num_steps() * self.num_assets() * self.bits_per_asset
    }

    /// Default normalization weight: 10 × the largest per-step objective
    /// magnitude, so feasibility always dominates the objective spread.
    pub fn default_rho(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for t in 0..self.num_steps() {
            let mu_l1: f64 = self.mu.row(t).iter().map(|m| m.abs()).sum();
            let sigma_l1: f64 = self.sigma[t].iter().map(|s| s.abs()).sum();
            let per_step =
                mu_l1 + self.gamma * sigma_l1 + self.lambda.max() * self.num_assets() as f64;
            worst = worst.max(per_step);
        }
        10.0 * (worst + 1.0)
    }

    /// Per-bit unit weights for one holding variable. The weights sum to
    /// exactly K′ (plain binary when K′ = 2^bits − 1, a clipped top weight
    /// otherwise), so no assignment can exceed the cap.
    pub fn bit_weights(&self) -> Result<Vec<u32>> {
        let bits = self.bits_per_asset;
        let cap = self.max_per_asset as u64;
        let full = (1u64 << bits) - 1;
        if cap > full {
            return Err(FinqError::Range(format!(
                "per-asset cap {cap} is not representable on {bits} bits"
            )));
        }
        let lower = (1u64 << (bits - 1)) - 1;
        if cap < lower {
            return Err(FinqError::Range(format!(
                "per-asset cap {cap} needs fewer than {bits} bits; reduce bits_per_asset"
            )));
        }
        let mut weights: Vec<u32> = (0..bits - 1).map(|q| 1u32 << q).collect();
        weights.push((cap - lower) as u32);
        Ok(weights)
    }

    fn bit_index(&self, t: usize, asset: usize, q: usize) -> usize {
        (t * self.num_assets() + asset) * self.bits_per_asset + q
    }

    /// Trajectory weights ω = n / K per step.
    pub fn weights(&self, traj: &Trajectory) -> DMatrix<f64> {
        traj.holdings.map(|n| n as f64 / self.budget as f64)
    }

    fn check_trajectory(&self, traj: &Trajectory) -> Result<()> {
        if traj.holdings.nrows() != self.num_steps() || traj.holdings.ncols() != self.num_assets()
        {
            return Err(FinqError::Dimension(format!(
                "trajectory is {}×{}, problem is {}×{}",
                traj.holdings.nrows(),
                traj.holdings.ncols(),
                self.num_steps(),
                self.num_assets()
            )));
        }
        if traj.budget != self.budget {
            return Err(FinqError::Dimension(format!(
                "trajectory budget {} differs from problem budget {}",
                traj.budget, self.budget
            )));
        }
        if let Some(over) = traj.holdings.iter().find(|&&n| n > self.max_per_asset) {
            return Err(FinqError::Range(format!(
                "holding {over} exceeds the per-asset cap {}",
                self.max_per_asset
            )));
        }
        Ok(())
    }

    /// Objective without the normalization penalty.
    pub fn cost_h0(&self, traj: &Trajectory) -> Result<f64> {
        self.check_trajectory(traj)?;
        let omega = self.weights(traj);
        let n = self.num_assets();
        let mut total = 0.0;
        for t in 0..self.num_steps() {
            let w = omega.row(t);
            let mut returns = 0.0;
            let mut risk = 0.0;
            for a in 0..n {
                returns += self.mu[(t, a)] * w[a];
                for b in 0..n {
                    risk += w[a] * self.sigma[t][(a, b)] * w[b];
                }
            }
            let mut churn = 0.0;
            for a in 0..n {
                let prev = if t == 0 { 0.0 } else { omega[(t - 1, a)] };
                let delta = w[a] - prev;
                churn += self.lambda.for_asset(a) * delta * delta;
            }
            total += -returns + 0.5 * self.gamma * risk + churn;
        }
        Ok(total)
    }

    /// Full objective: cost_h0 plus ρ Σ_t (Σ_n ω_tn − 1)².
    pub fn cost_full(&self, traj: &Trajectory) -> Result<f64> {
        let mut total = self.cost_h0(traj)?;
        let omega = self.weights(traj);
        for t in 0..self.num_steps() {
            let violation: f64 = omega.row(t).iter().sum::<f64>() - 1.0;
            total += self.rho * violation * violation;
        }
        Ok(total)
    }

    /// Lower the full objective to a Qubo over x_{t,n,q} bits. The Qubo cost
    /// of any assignment equals `cost_full` of the decoded trajectory.
    pub fn build_qubo(&self) -> Result<Qubo> {
        let weights = self.bit_weights()?;
        let t_steps = self.num_steps();
        let n = self.num_assets();
        let bits = self.bits_per_asset;
        let k = self.budget as f64;
        let unit: Vec<f64> = weights.iter().map(|&w| w as f64 / k).collect();

        let mut qubo = Qubo::new(self.num_qubits());
        for t in 0..t_steps {
            // −μ_t·ω_t
            for a in 0..n {
                for q in 0..bits {
                    qubo.add_linear(self.bit_index(t, a, q), -self.mu[(t, a)] * unit[q]);
                }
            }
            // (γ/2) ω_tᵀ Σ_t ω_t
            for a in 0..n {
                for b in 0..n {
                    let coeff = 0.5 * self.gamma * self.sigma[t][(a, b)];
                    if coeff == 0.0 {
                        continue;
                    }
                    for qa in 0..bits {
                        for qb in 0..bits {
                            let ia = self.bit_index(t, a, qa);
                            let ib = self.bit_index(t, b, qb);
                            let c = coeff * unit[qa] * unit[qb];
                            if ia == ib {
                                qubo.add_linear(ia, c);
                            } else {
                                qubo.add_quadratic(ia, ib, c);
                            }
                        }
                    }
                }
            }
            // λ‖ω_t − ω_{t−1}‖², measured against the all-cash start at t = 0
            for a in 0..n {
                let lambda = self.lambda.for_asset(a);
                if lambda == 0.0 {
                    continue;
                }
                let mut combo: Vec<(usize, f64)> = Vec::with_capacity(2 * bits);
                for q in 0..bits {
                    combo.push((self.bit_index(t, a, q), unit[q]));
                }
                if t > 0 {
                    for q in 0..bits {
                        combo.push((self.bit_index(t - 1, a, q), -unit[q]));
                    }
                }
                qubo.add_weighted_square(&combo, 0.0, lambda);
            }
            // ρ (Σ_n ω_tn − 1)²
            if self.rho > 0.0 {
                let mut combo: Vec<(usize, f64)> = Vec::with_capacity(n * bits);
                for a in 0..n {
                    for q in 0..bits {
                        combo.push((self.bit_index(t, a, q), unit[q]));
                    }
                }
                qubo.add_weighted_square(&combo, -1.0, self.rho);
            }
        }
        Ok(qubo)
    }

    /// Decode a bit assignment into integer holdings.
    pub fn decode(&self, bits: &[u8]) -> Result<Trajectory> {
        if bits.len() != self.num_qubits() {
            return Err(FinqError::Dimension(format!(
                "assignment has {} bits, expected {}",
                bits.len(),
                self.num_qubits()
            )));
        }
        let weights = self.bit_weights()?;
        let holdings = DMatrix::from_fn(self.num_steps(), self.num_assets(), |t, a| {
            (0..self.bits_per_asset)
                .map(|q| bits[self.bit_index(t, a, q)] as u32 * weights[q])
                .sum()
        });
        Trajectory::new(holdings, self.budget)
    }

    /// Single-period subproblem at step t with the transaction term removed
    /// (the recombination stage accounts for transitions itself).
    pub fn single_period(&self, t: usize) -> Result<PortfolioProblem> {
        if t >= self.num_steps() {
            return Err(FinqError::Dimension(format!(
                "step {t} out of range {}",
                self.num_steps()
            )));
        }
        Ok(PortfolioProblem {
            mu: DMatrix::from_fn(1, self.num_assets(), |_, a| self.mu[(t, a)]),
            sigma: vec![self.sigma[t].clone()],
            gamma: self.gamma,
            lambda: TransactionCost::Scalar(0.0),
            rho: self.rho,
            budget: self.budget,
            max_per_asset: self.max_per_asset,
            bits_per_asset: self.bits_per_asset,
        })
    }
}

/// Integer holdings per (step, asset) plus the budget that turns them into
/// weights. Feasible trajectories satisfy Σ_n n_tn = K for every t.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    holdings: DMatrix<u32>,
    budget: u32,
}

impl Trajectory {
    pub fn new(holdings: DMatrix<u32>, budget: u32) -> Result<Self> {
        if budget == 0 {
            return Err(FinqError::Parameter("budget must be positive".into()));
        }
        Ok(Self { holdings, budget })
    }

    pub fn from_rows(rows: &[Vec<u32>], budget: u32) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(FinqError::Dimension("trajectory needs ≥ 1 step and ≥ 1 asset".into()));
        }
        let n = rows[0].len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(FinqError::Dimension("ragged trajectory rows".into()));
        }
        let holdings = DMatrix::from_fn(rows.len(), n, |t, a| rows[t][a]);
        Self::new(holdings, budget)
    }

    pub fn holdings(&self) -> &DMatrix<u32> {
        &self.holdings
    }

    pub fn budget(&self) -> u32 {
        self.budget
    }

    /// ω = n / K.
    pub fn as_weights(&self) -> DMatrix<f64> {
        self.holdings.map(|n| n as f64 / self.budget as f64)
    }

    /// Budget satisfied at every step.
    pub fn is_feasible(&self) -> bool {
        (0..self.holdings.nrows())
            .all(|t| self.holdings.row(t).iter().map(|&n| n as u64).sum::<u64>() == self.budget as u64)
    }
}
