//! Dynamic integer portfolio optimization: market data, the multi-period
//! objective, its QUBO form, Sharpe scoring, and benchmark instances.

mod instance;
mod market;
mod problem;
mod sharpe;

pub use instance::{generate_instance, SizeLabel, SizeParams, DEFAULT_LAMBDA, DEFAULT_WINDOW};
pub use market::{estimate_moments, ingest_prices, read_prices, MarketData, Moments};
pub use problem::{PortfolioProblem, Trajectory, TransactionCost};
pub use sharpe::{sharpe_ratio, SharpeSummary, PERIODS_PER_YEAR};
