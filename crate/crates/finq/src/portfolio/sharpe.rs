//! Realized Sharpe ratio of a holdings trajectory.

use crate::error::{FinqError, Result};
use crate::portfolio::market::MarketData;
use crate::portfolio::problem::Trajectory;

/// Periods per year for business-month time steps.
pub const PERIODS_PER_YEAR: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharpeSummary {
    /// Annualized Sharpe ratio (risk-free rate 0, sample standard deviation
    /// with T − 1 denominator, ×√12 for business-month steps). Signed
    /// infinity when volatility is zero but the mean is not.
    pub sharpe: f64,
    pub mean_return: f64,
    pub volatility: f64,
    /// Annualization factor applied (√12).
    pub annualization: f64,
    /// True when the return series has zero volatility.
    pub degenerate: bool,
}

/// Realized per-step portfolio returns r_t = ω_t · (p_{t+1}/p_t − 1): the
/// holdings chosen at step t earn the price move into step t + 1, so the
/// data must span exactly one more row than the trajectory has steps.
pub fn sharpe_ratio(traj: &Trajectory, data: &MarketData) -> Result<SharpeSummary> {
    let steps = traj.holdings().nrows();
    if data.num_steps() != steps + 1 {
        return Err(FinqError::Dimension(format!(
            "trajectory has {steps} steps; needs {} price rows, got {}",
            steps + 1,
            data.num_steps()
        )));
    }
    if traj.holdings().ncols() != data.num_assets() {
        return Err(FinqError::Dimension(format!(
            "trajectory has {} assets, data has {}",
            traj.holdings().ncols(),
            data.num_assets()
        )));
    }
    let omega = traj.as_weights();
    let simple = data.simple_returns();
    let returns: Vec<f64> = (0..steps)
        .map(|t| {
            (0..data.num_assets())
                .map(|a| omega[(t, a)] * simple[(t, a)])
                .sum()
        })
        .collect();

    let mean = returns.iter().sum::<f64>() / steps as f64;
    let volatility = if steps >= 2 {
        (returns.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (steps - 1) as f64).sqrt()
    } else {
        0.0
    };
    let annualization = PERIODS_PER_YEAR.sqrt();
    let (sharpe, degenerate) = if volatility == 0.0 {
        let sentinel = if mean > 0.0 {
            f64::INFINITY
        } else if mean < 0.0 {
            f64::NEG_INFINITY
        } else {
            0.0
        };
        (sentinel, true)
    } else {
        (mean / volatility * annualization, false)
    };
    Ok(SharpeSummary { sharpe, mean_return: mean, volatility, annualization, degenerate })
}
