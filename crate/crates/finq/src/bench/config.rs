//! Benchmark and run configuration: TOML sections with defaults mirroring
//! the solver parameter defaults, plus a canonical-serialization hash.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{FinqError, Result};
use crate::solvers::{
    Backend, ExhaustiveParams, MpsParams, SaParams, SolverHandle, SqaParams, VqeParams,
};

pub const VALID_SOLVERS: [&str; 5] = ["exhaustive", "sa", "sqa", "mps", "vqe"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchmarkConfig {
    /// Size labels to run (XS, S, M, L, XL, XXL).
    pub sizes: Vec<String>,
    /// Solver backends to run.
    pub solvers: Vec<String>,
    /// One benchmark cell per (size, solver, seed).
    pub seeds: Vec<u64>,
    pub out_dir: String,
    /// Worker threads for benchmark cells.
    pub jobs: usize,
    pub exhaustive: ExhaustiveConfig,
    pub sa: SaConfig,
    pub sqa: SqaConfig,
    pub mps: MpsConfig,
    pub vqe: VqeConfig,
    /// Problem parameters used when ingesting external price data.
    pub portfolio: PortfolioConfig,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self {
            sizes: vec!["XS".into(), "S".into()],
            solvers: vec!["exhaustive".into(), "sa".into()],
            seeds: vec![0],
            out_dir: "benchmark-out".into(),
            jobs: 1,
            exhaustive: ExhaustiveConfig::default(),
            sa: SaConfig::default(),
            sqa: SqaConfig::default(),
            mps: MpsConfig::default(),
            vqe: VqeConfig::default(),
            portfolio: PortfolioConfig::default(),
        }
    }
}

macro_rules! mirrored_config {
    ($name:ident, $params:ident, { $($field:ident : $ty:ty),+ $(,)? }) => {
        #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
        #[serde(default)]
        pub struct $name {
            $(pub $field: $ty),+
        }

        impl Default for $name {
            fn default() -> Self {
                let params = $params::default();
                Self { $($field: params.$field),+ }
            }
        }

        impl From<&$name> for $params {
            fn from(config: &$name) -> Self {
                Self { $($field: config.$field),+ }
            }
        }
    };
}

mirrored_config!(ExhaustiveConfig, ExhaustiveParams, { max_vars: usize });
mirrored_config!(SaConfig, SaParams, {
    sweeps: usize,
    restarts: usize,
    t_hot: f64,
    t_cold: f64,
});
mirrored_config!(SqaConfig, SqaParams, {
    replicas: usize,
    sweeps: usize,
    restarts: usize,
    gamma_hot: f64,
    gamma_cold: f64,
    temperature: f64,
});
mirrored_config!(MpsConfig, MpsParams, {
    bond_dim: usize,
    sweeps: usize,
    samples: usize,
    restarts: usize,
    expansion: f64,
    tol: f64,
});
mirrored_config!(VqeConfig, VqeParams, {
    layers: usize,
    max_iters: usize,
    learning_rate: f64,
    samples: usize,
});

impl BenchmarkConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| FinqError::Config(format!("invalid config: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the canonical serialized form; any parameter change yields
    /// a different hash.
    pub fn hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.to_toml().as_bytes());
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Solver handle for a backend name, seeded for one benchmark cell.
    pub fn handle_for(&self, solver: &str, seed: u64) -> Result<SolverHandle> {
        let backend = match solver {
            "exhaustive" => Backend::Exhaustive((&self.exhaustive).into()),
            "sa" => Backend::Sa((&self.sa).into()),
            "sqa" => Backend::Sqa((&self.sqa).into()),
            "mps" => Backend::Mps((&self.mps).into()),
            "vqe" => Backend::Vqe((&self.vqe).into()),
            other => {
                return Err(FinqError::Parameter(format!(
                    "unknown solver {other:?}; valid names: {}",
                    VALID_SOLVERS.join(", ")
                )))
            }
        };
        Ok(SolverHandle::new(backend).with_seed(seed))
    }

    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() {
            return Err(FinqError::Parameter("config lists no sizes".into()));
        }
        if self.solvers.is_empty() {
            return Err(FinqError::Parameter(format!(
                "config lists no solvers; valid names: {}",
                VALID_SOLVERS.join(", ")
            )));
        }
        if self.seeds.is_empty() {
            return Err(FinqError::Parameter("config lists no seeds".into()));
        }
        for solver in &self.solvers {
            self.handle_for(solver, 0)?;
        }
        for size in &self.sizes {
            crate::portfolio::SizeLabel::parse(size)?;
        }
        Ok(())
    }
}

/// Parameters for solving one portfolio instance: problem constants for
/// ingested price data plus the default size label and seed for generated
/// instances (CLI flags override these).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PortfolioConfig {
    pub gamma: f64,
    pub lambda: f64,
    /// Normalization penalty; 0 means "use the dominant default".
    pub rho: f64,
    pub window: usize,
    pub budget: u32,
    /// Per-asset cap; 0 means the full bit range 2^bits − 1.
    pub max_per_asset: u32,
    pub bits_per_asset: usize,
    pub size: String,
    pub seed: Option<u64>,
}

impl Default for PortfolioConfig {
    fn default() -> Self {
        Self {
            gamma: 1.0,
            lambda: crate::portfolio::DEFAULT_LAMBDA,
            rho: 0.0,
            window: crate::portfolio::DEFAULT_WINDOW,
            budget: 2,
            max_per_asset: 0,
            bits_per_asset: 1,
            size: "XS".into(),
            seed: None,
        }
    }
}
