//! Cross-holding financial network model: equilibrium market values, the
//! squared-residual optimization form, and crash detection after price
//! perturbations.
//!
//! An institution's market value satisfies v = A(Dp − b(v)): asset prices p
//! scaled by the ownership matrix D, propagated through the cross-holding
//! dependency matrix A, minus a discontinuous drop b(v) that activates when
//! an institution's value falls below its critical threshold. The residual
//! ‖v − A(Dp − b(v))‖² turns the fixed-point condition into a minimization
//! problem that can be lowered to a binary polynomial over encoded values.

pub mod io;

use nalgebra::{DMatrix, DVector};

use crate::error::{FinqError, Result};
use crate::qubo::{from_truth_table, quadratize, BinaryPolynomial, IntegerEncoding};
use crate::solvers::{solve, SolverHandle};

/// Institutions, their cross-holding dependency matrix, asset ownership,
/// prices, failure thresholds, and failure drops. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct FinancialNetwork {
    dependency: DMatrix<f64>,
    ownership: DMatrix<f64>,
    prices: DVector<f64>,
    v_crit: DVector<f64>,
    b_drop: DVector<f64>,
}

impl FinancialNetwork {
    /// Validates: consistent dimensions, ownership shares in [0, 1] with
    /// column sums ≤ 1, nonnegative drops, finite thresholds and prices.
    pub fn new(
        dependency: DMatrix<f64>,
        ownership: DMatrix<f64>,
        prices: DVector<f64>,
        v_crit: DVector<f64>,
        b_drop: DVector<f64>,
    ) -> Result<Self> {
        let n = dependency.nrows();
        let m = ownership.ncols();
        if dependency.ncols() != n {
            return Err(FinqError::Dimension(format!(
                "dependency matrix must be square, got {}×{}",
                dependency.nrows(),
                dependency.ncols()
            )));
        }
        if ownership.nrows() != n {
            return Err(FinqError::Dimension(format!(
                "ownership matrix has {} rows, expected {n} institutions",
                ownership.nrows()
            )));
        }
        if prices.len() != m {
            return Err(FinqError::Dimension(format!(
                "price vector has {} entries, expected {m} assets",
                prices.len()
            )));
        }
        if v_crit.len() != n || b_drop.len() != n {
            return Err(FinqError::Dimension(
                "v_crit and b_drop must have one entry per institution".into(),
            ));
        }
        if dependency.iter().any(|a| !a.is_finite()) {
            return Err(FinqError::Data("dependency matrix has non-finite entries".into()));
        }
        if ownership.iter().any(|d| !(0.0..=1.0).contains(d)) {
            return Err(FinqError::Data("ownership shares must lie in [0, 1]".into()));
        }
        for j in 0..m {
            let col_sum: f64 = ownership.column(j).iter().sum();
            if col_sum > 1.0 + 1e-12 {
                return Err(FinqError::Data(format!(
                    "ownership column {j} sums to {col_sum} > 1"
                )));
            }
        }
        if prices.iter().any(|p| !p.is_finite()) {
            return Err(FinqError::Data("prices must be finite".into()));
        }
        if v_crit.iter().any(|v| !v.is_finite()) {
            return Err(FinqError::Data("critical values must be finite".into()));
        }
        if b_drop.iter().any(|b| !(*b >= 0.0) || !b.is_finite()) {
            return Err(FinqError::Data("failure drops must be nonnegative".into()));
        }
        Ok(Self { dependency, ownership, prices, v_crit, b_drop })
    }

    pub fn n_institutions(&self) -> usize {
        self.dependency.nrows()
    }

    pub fn n_assets(&self) -> usize {
        self.ownership.ncols()
    }

    pub fn dependency(&self) -> &DMatrix<f64> {
        &self.dependency
    }

    pub fn ownership(&self) -> &DMatrix<f64> {
        &self.ownership
    }

    pub fn prices(&self) -> &DVector<f64> {
        &self.prices
    }

    pub fn v_crit(&self) -> &DVector<f64> {
        &self.v_crit
    }

    pub fn b_drop(&self) -> &DVector<f64> {
        &self.b_drop
    }

    pub fn with_prices(&self, prices: DVector<f64>) -> Result<Self> {
        Self::new(
            self.dependency.clone(),
            self.ownership.clone(),
            prices,
            self.v_crit.clone(),
            self.b_drop.clone(),
        )
    }

    /// Failure-free value vector A·D·p, also the conventional iteration
    /// start.
    pub fn base_value(&self) -> DVector<f64> {
        &self.dependency * (&self.ownership * &self.prices)
    }

    /// Componentwise drop vector: b_i where v_i < v_i^c (strict), else 0.
    /// At exact equality an institution is solvent.
    pub fn step_drop(&self, values: &[f64]) -> Result<Vec<f64>> {
        let n = self.n_institutions();
        if values.len() != n {
            return Err(FinqError::Dimension(format!(
                "value vector has {} entries, expected {n}",
                values.len()
            )));
        }
        Ok((0..n)
            .map(|i| if values[i] < self.v_crit[i] { self.b_drop[i] } else { 0.0 })
            .collect())
    }

    /// One application of the stability map v ↦ A(Dp − b(v)).
    pub fn value_map(&self, values: &[f64]) -> Result<DVector<f64>> {
        let drops = DVector::from_vec(self.step_drop(values)?);
        Ok(&self.dependency * (&self.ownership * &self.prices - drops))
    }

    /// Squared residual ‖v − A(Dp − b(v))‖² of the stability condition.
    pub fn residual(&self, values: &[f64]) -> Result<f64> {
        let mapped = self.value_map(values)?;
        Ok(values
            .iter()
            .zip(mapped.iter())
            .map(|(v, m)| (v - m) * (v - m))
            .sum())
    }

    /// Iterate the stability map until the max-norm change drops below
    /// `tol` or `max_iter` is reached. Non-convergence is not an error:
    /// oscillation between failure sets is a legitimate model outcome, and
    /// the best iterate is returned with `iterations == max_iter`.
    pub fn fixed_point_equilibrium(
        &self,
        v0: &[f64],
        tol: f64,
        max_iter: usize,
    ) -> Result<EquilibriumResult> {
        if !(tol > 0.0) {
            return Err(FinqError::Parameter(format!("tolerance must be positive, got {tol}")));
        }
        if v0.len() != self.n_institutions() {
            return Err(FinqError::Dimension(format!(
                "v0 has {} entries, expected {}",
                v0.len(),
                self.n_institutions()
            )));
        }
        let mut current: Vec<f64> = v0.to_vec();
        let mut iterations = max_iter;
        for iter in 1..=max_iter {
            let next = self.value_map(&current)?;
            let change = current
                .iter()
                .zip(next.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            current = next.as_slice().to_vec();
            if change < tol {
                iterations = iter;
                break;
            }
        }
        Ok(self.equilibrium_from_values(current, iterations))
    }

    fn equilibrium_from_values(&self, values: Vec<f64>, iterations: usize) -> EquilibriumResult {
        let failed = values
            .iter()
            .zip(self.v_crit.iter())
            .map(|(v, c)| v < c)
            .collect();
        let residual = self.residual(&values).expect("dimensions already checked");
        EquilibriumResult { values, failed, residual, iterations }
    }

    /// Encoding scale that makes the grid ceiling coincide with the largest
    /// failure-free value: max(A·D·p) / (2^num_bits − 1).
    pub fn default_scale(&self, num_bits: usize) -> Result<f64> {
        let max_base = self.base_value().iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(max_base > 0.0) {
            return Err(FinqError::Parameter(format!(
                "cannot derive a default scale: max base value is {max_base}"
            )));
        }
        Ok(max_base / ((1u64 << num_bits) - 1) as f64)
    }

    /// Lower the squared residual to a binary polynomial over encoded values
    /// plus one failure-indicator bit per institution that can actually fail
    /// on the grid. The indicator s_i is pinned to [v_i < v_i^c] by the exact
    /// penalty w·(s_i − f_i(bits_i))², where f_i is the multilinear
    /// interpolation of the threshold test on institution i's own value bits;
    /// the minimum over indicator bits therefore reproduces the grid
    /// restriction of the residual objective exactly.
    pub fn equilibrium_qubo(&self, enc: &IntegerEncoding) -> Result<CrashQubo> {
        let n = self.n_institutions();
        let bits_per_inst = enc.num_bits();
        let scale = enc.scale();
        let max_units = enc.max_value();

        let base = self.base_value();
        let max_base = base.iter().copied().fold(f64::NEG_INFINITY, f64::max).max(0.0);
        if enc.max_decoded() < max_base * (1.0 - 1e-12) {
            return Err(FinqError::Range(format!(
                "encoding range {} does not cover the failure-free values; need at least {max_base}",
                enc.max_decoded()
            )));
        }

        // Classify each institution's failure behaviour on the grid.
        let mut indicators: Vec<DropKind> = Vec::with_capacity(n);
        let mut num_indicators = 0usize;
        for i in 0..n {
            if self.b_drop[i] == 0.0 {
                indicators.push(DropKind::Never);
                continue;
            }
            let threshold = self.v_crit[i];
            // smallest unit count whose value is ≥ threshold, consistent with
            // the f64 grid used by step_drop
            let mut kappa = (threshold / scale).ceil() as i64;
            while kappa > 0 && scale * (kappa - 1) as f64 >= threshold {
                kappa -= 1;
            }
            while (kappa as f64) * scale < threshold {
                kappa += 1;
            }
            if kappa <= 0 {
                indicators.push(DropKind::Never);
            } else if kappa as u64 > max_units {
                indicators.push(DropKind::Always);
            } else {
                indicators.push(DropKind::Indicator {
                    s_index: n * bits_per_inst + num_indicators,
                    kappa: kappa as u64,
                });
                num_indicators += 1;
            }
        }
        let total_bits = n * bits_per_inst + num_indicators;

        // Residual rows: v̂_i − Σ_j A_ij [(Dp)_j − b_j·s_j]
        let asset_values = &self.ownership * &self.prices;
        let mut poly = BinaryPolynomial::new(total_bits);
        for i in 0..n {
            let mut row = BinaryPolynomial::new(total_bits);
            for q in 0..bits_per_inst {
                row.add_term(&[i * bits_per_inst + q], scale * (1u64 << q) as f64);
            }
            let mut constant = 0.0;
            for j in 0..n {
                let a = self.dependency[(i, j)];
                if a == 0.0 {
                    continue;
                }
                constant -= a * asset_values[j];
                match indicators[j] {
                    DropKind::Never => {}
                    DropKind::Always => constant += a * self.b_drop[j],
                    DropKind::Indicator { s_index, .. } => {
                        row.add_term(&[s_index], a * self.b_drop[j]);
                    }
                }
            }
            if constant != 0.0 {
                row.add_term(&[], constant);
            }
            poly.add_assign(&row.square());
        }

        // Indicator penalties, weighted to dominate the residual range.
        let weight = 2.0 * poly.coeff_abs_sum() + 1.0;
        for (i, kind) in indicators.iter().enumerate() {
            if let DropKind::Indicator { s_index, kappa } = *kind {
                let value_bits: Vec<usize> =
                    (0..bits_per_inst).map(|q| i * bits_per_inst + q).collect();
                let mut diff =
                    from_truth_table(total_bits, &value_bits, |units| {
                        if units < kappa {
                            1.0
                        } else {
                            0.0
                        }
                    });
                diff.scale(-1.0);
                diff.add_term(&[s_index], 1.0);
                let mut penalty = diff.square();
                penalty.scale(weight);
                poly.add_assign(&penalty);
            }
        }

        Ok(CrashQubo {
            poly,
            enc: *enc,
            n_institutions: n,
            num_indicators,
        })
    }

    /// Solve the equilibrium at the current prices and at `p + Δp` with the
    /// given solver, reporting the institutions that fail only after the
    /// shock.
    pub fn shock_and_detect(
        &self,
        price_delta: &[f64],
        enc: &IntegerEncoding,
        handle: &SolverHandle,
    ) -> Result<ShockReport> {
        if price_delta.len() != self.n_assets() {
            return Err(FinqError::Dimension(format!(
                "price delta has {} entries, expected {}",
                price_delta.len(),
                self.n_assets()
            )));
        }
        let before = self.equilibrium_qubo(enc)?.solve(self, handle)?;
        let shocked_prices = DVector::from_iterator(
            self.n_assets(),
            self.prices.iter().zip(price_delta).map(|(p, d)| p + d),
        );
        let shocked = self.with_prices(shocked_prices)?;
        let after = shocked.equilibrium_qubo(enc)?.solve(&shocked, handle)?;
        let newly_failed = (0..self.n_institutions())
            .filter(|&i| after.failed[i] && !before.failed[i])
            .collect();
        Ok(ShockReport { before, after, newly_failed })
    }
}

#[derive(Debug, Clone, Copy)]
enum DropKind {
    /// b_i = 0, or no grid point lies below the threshold.
    Never,
    /// Every grid point lies below the threshold: the drop is constant.
    Always,
    /// The threshold splits the grid; an indicator bit is required.
    Indicator { s_index: usize, kappa: u64 },
}

/// Equilibrium values, failure flags (v_i < v_i^c on the returned vector),
/// the residual of the stability condition, and the iteration or sweep
/// count that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumResult {
    pub values: Vec<f64>,
    pub failed: Vec<bool>,
    pub residual: f64,
    pub iterations: usize,
}

/// The residual objective lowered to a binary polynomial, with the layout
/// needed to decode solver output back into institution values.
#[derive(Debug, Clone)]
pub struct CrashQubo {
    poly: BinaryPolynomial,
    enc: IntegerEncoding,
    n_institutions: usize,
    num_indicators: usize,
}

impl CrashQubo {
    pub fn polynomial(&self) -> &BinaryPolynomial {
        &self.poly
    }

    pub fn num_indicators(&self) -> usize {
        self.num_indicators
    }

    pub fn total_bits(&self) -> usize {
        self.poly.num_vars()
    }

    /// Institution values from the leading value bits of an assignment.
    pub fn decode_values(&self, bits: &[u8]) -> Result<Vec<f64>> {
        let per = self.enc.num_bits();
        if bits.len() < self.n_institutions * per {
            return Err(FinqError::Dimension(format!(
                "assignment has {} bits, need at least {}",
                bits.len(),
                self.n_institutions * per
            )));
        }
        (0..self.n_institutions)
            .map(|i| self.enc.decode(&bits[i * per..(i + 1) * per]))
            .collect()
    }

    /// Quadratize, run the solver, and decode the best assignment into an
    /// equilibrium. The reported residual is recomputed from the network
    /// definition, not from the solver's objective value.
    pub fn solve(&self, net: &FinancialNetwork, handle: &SolverHandle) -> Result<EquilibriumResult> {
        let (qubo, _ancillas) = quadratize(&self.poly)?;
        let result = solve(&qubo, handle)?;
        let values = self.decode_values(&result.best_bits)?;
        let failed = values
            .iter()
            .zip(net.v_crit().iter())
            .map(|(v, c)| v < c)
            .collect();
        let residual = net.residual(&values)?;
        Ok(EquilibriumResult {
            values,
            failed,
            residual,
            iterations: result.diagnostics.sweeps,
        })
    }
}

/// Pre- and post-shock equilibria plus the institutions newly below their
/// critical value.
#[derive(Debug, Clone)]
pub struct ShockReport {
    pub before: EquilibriumResult,
    pub after: EquilibriumResult,
    pub newly_failed: Vec<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::SolverHandle;

    fn identity_network(prices: &[f64], v_crit: &[f64], b_drop: &[f64]) -> FinancialNetwork {
        let n = prices.len();
        FinancialNetwork::new(
            DMatrix::identity(n, n),
            DMatrix::identity(n, n),
            DVector::from_row_slice(prices),
            DVector::from_row_slice(v_crit),
            DVector::from_row_slice(b_drop),
        )
        .unwrap()
    }

    #[test]
    fn step_drop_no_failures() {
        let net = identity_network(&[1.0, 2.0], &[0.5, 0.5], &[1.0, 1.0]);
        assert_eq!(net.step_drop(&[1.0, 2.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn step_drop_boundary_is_solvent() {
        let net = identity_network(&[1.0, 1.0], &[0.5, 0.5], &[1.0, 1.0]);
        assert_eq!(net.step_drop(&[0.5, 0.5]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn step_drop_componentwise() {
        let net = identity_network(&[1.0, 1.0, 1.0], &[0.5, 0.5, 0.5], &[1.0, 1.0, 1.0]);
        assert_eq!(net.step_drop(&[1.0, 0.2, 5.0]).unwrap(), vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn identity_network_fixed_point() {
        let net = identity_network(&[1.0, 2.0], &[0.0, 0.0], &[0.0, 0.0]);
        let v0 = net.base_value();
        let eq = net.fixed_point_equilibrium(v0.as_slice(), 1e-12, 100).unwrap();
        assert_eq!(eq.values, vec![1.0, 2.0]);
        assert_eq!(eq.iterations, 1);
        assert_eq!(eq.failed, vec![false, false]);
        assert!(eq.residual == 0.0);
    }

    #[test]
    fn solvent_single_institution() {
        let net = identity_network(&[1.0], &[0.9], &[0.5]);
        let eq = net.fixed_point_equilibrium(&[1.0], 1e-12, 100).unwrap();
        assert_eq!(eq.values, vec![1.0]);
        assert_eq!(eq.failed, vec![false]);
    }

    /// Enumeration oracle: for every candidate failure set, compute
    /// v = A(Dp − b·1_S) directly and keep the self-consistent sets.
    fn consistent_failure_sets(net: &FinancialNetwork) -> Vec<(u64, Vec<f64>)> {
        let n = net.n_institutions();
        let mut sets = Vec::new();
        for mask in 0u64..(1 << n) {
            let drops = DVector::from_iterator(
                n,
                (0..n).map(|i| if mask >> i & 1 == 1 { net.b_drop()[i] } else { 0.0 }),
            );
            let v = net.dependency() * (net.ownership() * net.prices() - drops);
            let consistent = (0..n).all(|i| (v[i] < net.v_crit()[i]) == (mask >> i & 1 == 1));
            if consistent {
                sets.push((mask, v.as_slice().to_vec()));
            }
        }
        sets
    }

    fn cascade_network() -> FinancialNetwork {
        // one cross-holding cycle: institution 0 owns the only asset; 1 and 2
        // depend on each other and on 0; a drop in 0 pushes 1 under, which
        // pushes 2 under
        let dependency = DMatrix::from_row_slice(
            3,
            3,
            &[
                1.0, 0.0, 0.0, //
                0.75, 1.0, 0.25, //
                0.0, 0.5, 1.0,
            ],
        );
        let ownership = DMatrix::from_row_slice(3, 1, &[1.0, 0.0, 0.0]);
        FinancialNetwork::new(
            dependency,
            ownership,
            DVector::from_row_slice(&[2.0]),
            DVector::from_row_slice(&[2.5, 1.25, 0.5]),
            DVector::from_row_slice(&[0.5, 0.5, 0.25]),
        )
        .unwrap()
    }

    #[test]
    fn cascade_matches_failure_set_enumeration() {
        let net = cascade_network();
        let v0 = net.base_value();
        let eq = net.fixed_point_equilibrium(v0.as_slice(), 1e-10, 200).unwrap();
        assert!(eq.iterations < 200, "fixed point should converge");

        let sets = consistent_failure_sets(&net);
        assert!(!sets.is_empty());
        let mask: u64 = eq
            .failed
            .iter()
            .enumerate()
            .map(|(i, &f)| if f { 1 << i } else { 0 })
            .sum();
        let matching = sets.iter().find(|(m, _)| *m == mask);
        let (_, oracle_v) = matching.expect("converged equilibrium must be a consistent set");
        for (a, b) in eq.values.iter().zip(oracle_v) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
        // the base-value start lands on the fewest-failures equilibrium
        let min_failures = sets.iter().map(|(m, _)| m.count_ones()).min().unwrap();
        assert_eq!(mask.count_ones(), min_failures);
        // self-consistency: one more map application changes nothing
        let remapped = net.value_map(&eq.values).unwrap();
        for (a, b) in eq.values.iter().zip(remapped.iter()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn equilibrium_qubo_without_drops_is_plain_quadratic() {
        let net = identity_network(&[1.0, 2.0], &[0.5, 0.5], &[0.0, 0.0]);
        let enc = IntegerEncoding::new(2, 1.0).unwrap();
        let crash = net.equilibrium_qubo(&enc).unwrap();
        assert_eq!(crash.num_indicators(), 0);
        assert_eq!(crash.total_bits(), 4);
        assert_eq!(crash.polynomial().degree(), 2);
        // residual of the decoded assignment equals the polynomial value
        for assignment in 0u64..16 {
            let bits: Vec<u8> = (0..4).map(|i| (assignment >> i & 1) as u8).collect();
            let values = crash.decode_values(&bits).unwrap();
            let direct = net.residual(&values).unwrap();
            let from_poly = crash.polynomial().evaluate(&bits).unwrap();
            assert!((direct - from_poly).abs() < 1e-9, "{direct} vs {from_poly}");
        }
    }

    /// Single institution, two value bits, unit scale: the exhaustive minimum
    /// over value + indicator bits must match direct minimization of the
    /// residual over v ∈ {0, 1, 2, 3}.
    #[test]
    fn single_institution_qubo_matches_grid_minimum() {
        let net = identity_network(&[1.0], &[1.5], &[1.0]);
        let enc = IntegerEncoding::new(2, 1.0).unwrap();
        let crash = net.equilibrium_qubo(&enc).unwrap();
        assert_eq!(crash.num_indicators(), 1);
        assert_eq!(crash.total_bits(), 3);

        let poly = crash.polynomial();
        let mut qubo_min = f64::INFINITY;
        for assignment in 0u64..(1 << crash.total_bits()) {
            let bits: Vec<u8> = (0..crash.total_bits())
                .map(|i| (assignment >> i & 1) as u8)
                .collect();
            qubo_min = qubo_min.min(poly.evaluate(&bits).unwrap());
        }
        let grid_min = (0..4)
            .map(|v| net.residual(&[v as f64]).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert_eq!(qubo_min, grid_min);
    }

    /// Full pipeline on 2 institutions: quadratize, solve exhaustively, and
    /// compare against direct grid enumeration of the residual.
    #[test]
    fn two_institution_pipeline_matches_grid_enumeration() {
        let dependency = DMatrix::from_row_slice(2, 2, &[1.0, 0.25, 0.5, 1.0]);
        let ownership = DMatrix::from_row_slice(2, 2, &[0.75, 0.0, 0.0, 0.5]);
        let net = FinancialNetwork::new(
            dependency,
            ownership,
            DVector::from_row_slice(&[1.0, 1.0]),
            DVector::from_row_slice(&[0.75, 0.75]),
            DVector::from_row_slice(&[0.5, 0.25]),
        )
        .unwrap();
        let enc = IntegerEncoding::new(1, 1.0).unwrap();
        let crash = net.equilibrium_qubo(&enc).unwrap();
        let eq = crash.solve(&net, &SolverHandle::exhaustive()).unwrap();

        let mut grid_min = f64::INFINITY;
        for v0 in 0..2 {
            for v1 in 0..2 {
                grid_min = grid_min.min(net.residual(&[v0 as f64, v1 as f64]).unwrap());
            }
        }
        assert_eq!(eq.residual, grid_min);
    }

    #[test]
    fn zero_perturbation_causes_no_new_failures() {
        let net = identity_network(&[1.0, 2.0], &[0.5, 0.5], &[0.25, 0.25]);
        let enc = IntegerEncoding::new(2, net.default_scale(2).unwrap()).unwrap();
        let report = net
            .shock_and_detect(&[0.0, 0.0], &enc, &SolverHandle::exhaustive())
            .unwrap();
        assert!(report.newly_failed.is_empty());
    }

    #[test]
    fn targeted_shock_on_identity_network() {
        // decoupled institutions with unit prices; price grid {0, 1}
        let net = identity_network(&[1.0, 1.0], &[0.75, 0.75], &[0.0, 0.0]);
        let enc = IntegerEncoding::new(1, 1.0).unwrap();
        let report = net
            .shock_and_detect(&[0.0, -1.0], &enc, &SolverHandle::exhaustive())
            .unwrap();
        assert_eq!(report.newly_failed, vec![1]);
    }

    #[test]
    fn insufficient_encoding_range_is_reported() {
        let net = identity_network(&[8.0], &[0.5], &[0.0]);
        let enc = IntegerEncoding::new(2, 1.0).unwrap(); // covers up to 3 < 8
        match net.equilibrium_qubo(&enc) {
            Err(FinqError::Range(msg)) => assert!(msg.contains('8')),
            other => panic!("expected range error, got {other:?}"),
        }
    }

    #[test]
    fn ownership_column_sums_validated() {
        let result = FinancialNetwork::new(
            DMatrix::identity(2, 2),
            DMatrix::from_row_slice(2, 1, &[0.7, 0.7]),
            DVector::from_row_slice(&[1.0]),
            DVector::from_row_slice(&[0.0, 0.0]),
            DVector::from_row_slice(&[0.0, 0.0]),
        );
        assert!(matches!(result, Err(FinqError::Data(_))));
    }
}
