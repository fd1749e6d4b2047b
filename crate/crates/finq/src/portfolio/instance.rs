//! Benchmark instance generator: six canonical problem sizes with fixed
//! (assets, steps, bits, budget, cap) parameters, synthetic geometric
//! random-walk prices, and trailing-window moment estimates.

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{FinqError, Result};
use crate::portfolio::market::{estimate_moments, MarketData};
use crate::portfolio::problem::{PortfolioProblem, TransactionCost};
use crate::solvers::worker_rng;

/// Default moment-estimation window in steps.
pub const DEFAULT_WINDOW: usize = 6;
/// Default scalar transaction cost for generated instances.
pub const DEFAULT_LAMBDA: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SizeLabel {
    Xs,
    S,
    M,
    L,
    Xl,
    Xxl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeParams {
    pub assets: usize,
    pub steps: usize,
    pub bits_per_asset: usize,
    pub budget: u32,
    pub max_per_asset: u32,
}

impl SizeLabel {
    pub fn all() -> [SizeLabel; 6] {
        [Self::Xs, Self::S, Self::M, Self::L, Self::Xl, Self::Xxl]
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Xs => "XS",
            Self::S => "S",
            Self::M => "M",
            Self::L => "L",
            Self::Xl => "XL",
            Self::Xxl => "XXL",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text.to_ascii_uppercase().as_str() {
            "XS" => Ok(Self::Xs),
            "S" => Ok(Self::S),
            "M" => Ok(Self::M),
            "L" => Ok(Self::L),
            "XL" => Ok(Self::Xl),
            "XXL" => Ok(Self::Xxl),
            other => Err(FinqError::Parameter(format!(
                "unknown size label {other:?} (expected XS, S, M, L, XL, or XXL)"
            ))),
        }
    }

    pub fn params(&self) -> SizeParams {
        // (assets, steps, bits, budget, cap); risk aversion is fixed to 1 and
        // the cap always equals 2^bits − 1
        let (assets, steps, bits, budget, cap) = match self {
            Self::Xs => (3, 2, 1, 2, 1),
            Self::S => (4, 5, 1, 3, 1),
            Self::M => (4, 7, 1, 3, 1),
            Self::L => (8, 17, 2, 5, 3),
            Self::Xl => (8, 29, 2, 10, 3),
            Self::Xxl => (8, 53, 3, 15, 7),
        };
        SizeParams {
            assets,
            steps,
            bits_per_asset: bits,
            budget,
            max_per_asset: cap,
        }
    }

    pub fn num_qubits(&self) -> usize {
        let p = self.params();
        p.assets * p.steps * p.bits_per_asset
    }

    /// log₁₀ of the state-space size 2^num_qubits.
    pub fn log10_states(&self) -> f64 {
        self.num_qubits() as f64 * 2f64.log10()
    }
}

/// Deterministic synthetic instance for a size label: geometric random-walk
/// prices over steps + 1 business months, moments from the trailing window,
/// γ = 1, scalar λ, default ρ.
pub fn generate_instance(label: SizeLabel, seed: u64) -> Result<(MarketData, PortfolioProblem)> {
    let params = label.params();
    let mut rng = worker_rng(seed, label.num_qubits() as u64);
    let rows = params.steps + 1;

    let mut prices = DMatrix::zeros(rows, params.assets);
    for asset in 0..params.assets {
        let drift = rng.gen_range(-0.01..0.02);
        let vol = rng.gen_range(0.02..0.10);
        let mut price = rng.gen_range(20.0..200.0);
        for row in 0..rows {
            prices[(row, asset)] = price;
            let shock: f64 = rng.gen_range(-1.0..1.0);
            price *= (drift + vol * shock).exp();
        }
    }
    let timestamps = (0..rows)
        .map(|i| format!("{:04}-{:02}-01", 2000 + i / 12, 1 + i % 12))
        .collect();
    let asset_names = (0..params.assets).map(|a| format!("A{a:02}")).collect();
    let data = MarketData::new(prices, timestamps, asset_names)?;

    let window = DEFAULT_WINDOW.min(params.steps).max(2);
    let moments = estimate_moments(&data, window)?;
    let problem = PortfolioProblem::new(
        moments.mu,
        moments.sigma,
        1.0,
        TransactionCost::Scalar(DEFAULT_LAMBDA),
        params.budget,
        params.bits_per_asset,
    )?;
    debug_assert_eq!(problem.max_per_asset, params.max_per_asset);
    Ok((data, problem))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qubit_counts_for_all_labels() {
        let expected = [6usize, 20, 28, 272, 464, 1272];
        for (label, want) in SizeLabel::all().iter().zip(expected) {
            assert_eq!(label.num_qubits(), want, "{}", label.name());
        }
    }

    #[test]
    fn xs_parameters() {
        let p = SizeLabel::Xs.params();
        assert_eq!((p.assets, p.steps, p.bits_per_asset), (3, 2, 1));
        assert_eq!((p.budget, p.max_per_asset), (2, 1));
        assert_eq!(SizeLabel::Xs.num_qubits(), 6);
        // 2^6 = 64 states
        assert!((SizeLabel::Xs.log10_states() - 64f64.log10()).abs() < 1e-12);
    }

    #[test]
    fn l_has_272_qubits() {
        assert_eq!(SizeLabel::L.num_qubits(), 8 * 17 * 2);
    }

    #[test]
    fn caps_match_full_bit_range() {
        for label in SizeLabel::all() {
            let p = label.params();
            assert_eq!(p.max_per_asset as u64, (1u64 << p.bits_per_asset) - 1);
            assert!(p.budget as u64 <= p.assets as u64 * p.max_per_asset as u64);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let (a, _) = generate_instance(SizeLabel::Xs, 7).unwrap();
        let (b, _) = generate_instance(SizeLabel::Xs, 7).unwrap();
        assert_eq!(a, b);
        let mut bytes_a = Vec::new();
        let mut bytes_b = Vec::new();
        a.write_csv(&mut bytes_a).unwrap();
        b.write_csv(&mut bytes_b).unwrap();
        assert_eq!(bytes_a, bytes_b);
        let (c, _) = generate_instance(SizeLabel::Xs, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn generated_problem_matches_label() {
        for label in [SizeLabel::Xs, SizeLabel::S, SizeLabel::M] {
            let (data, problem) = generate_instance(label, 1).unwrap();
            let p = label.params();
            assert_eq!(problem.num_steps(), p.steps);
            assert_eq!(problem.num_assets(), p.assets);
            assert_eq!(problem.num_qubits(), label.num_qubits());
            assert_eq!(data.num_steps(), p.steps + 1);
            assert_eq!(problem.gamma, 1.0);
        }
    }

    #[test]
    fn parse_labels() {
        assert_eq!(SizeLabel::parse("xs").unwrap(), SizeLabel::Xs);
        assert_eq!(SizeLabel::parse("XXL").unwrap(), SizeLabel::Xxl);
        assert!(SizeLabel::parse("huge").is_err());
    }
}
