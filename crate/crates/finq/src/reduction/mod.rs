//! Dimensional reduction: correlation-based asset clustering with a coarse
//! solve-then-refine path, and per-period fragmentation with exact dynamic-
//! programming recombination.

mod cluster;
mod coarse;
mod fragment;

pub use cluster::{cluster_assets, correlation_matrix, AssetClustering, MergeStep};
pub use coarse::{clustered_problem, coarse_solve_then_refine};
pub use fragment::{fragment_and_recombine, Candidate, FragmentPlan};
