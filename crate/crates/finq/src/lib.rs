//! Quantum-inspired combinatorial optimization for two financial problems:
//! equilibrium and crash analysis of cross-holding financial networks, and
//! dynamic portfolio optimization over integer holdings.
//!
//! Everything funnels through one pipeline: a cost function is written as a
//! [`qubo::BinaryPolynomial`], reduced to a [`qubo::Qubo`], and handed to any
//! of the pluggable [`solvers`] backends (exhaustive, simulated annealing,
//! simulated quantum annealing, matrix-product-state optimizer, toy
//! variational eigensolver). The [`reduction`] module adds the two
//! dimensional-reduction procedures (asset clustering, per-period
//! fragmentation with exact recombination), and [`bench`] orchestrates
//! deterministic seeded benchmark runs.
//!
//! See the crate examples for one runnable walkthrough per capability.

pub mod bench;
pub mod crash;
pub mod error;
pub mod portfolio;
pub mod qubo;
pub mod reduction;
pub mod solvers;

pub use error::{FinqError, Result};
