//! Multilinear polynomials over binary variables and polynomials over
//! nonnegative integer variables.
//!
//! `BinaryPolynomial` is the universal cost-function carrier: every objective
//! in this crate is assembled as (or lowered to) one of these before being
//! reduced to a `Qubo`. Terms are keyed by sorted, duplicate-free variable
//! index sets; since x² = x for binary x, repeated indices are folded away on
//! insertion. The empty index set is the constant term.

use std::collections::BTreeMap;

use crate::error::{FinqError, Result};
use crate::qubo::encoding::IntegerEncoding;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BinaryPolynomial {
    terms: BTreeMap<Vec<usize>, f64>,
    num_vars: usize,
}

impl BinaryPolynomial {
    pub fn new(num_vars: usize) -> Self {
        Self { terms: BTreeMap::new(), num_vars }
    }

    pub fn constant(num_vars: usize, value: f64) -> Self {
        let mut poly = Self::new(num_vars);
        poly.add_term(&[], value);
        poly
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in deterministic (sorted-key) order.
    pub fn terms(&self) -> impl Iterator<Item = (&[usize], f64)> {
        self.terms.iter().map(|(k, &c)| (k.as_slice(), c))
    }

    pub fn coefficient(&self, vars: &[usize]) -> f64 {
        let key = normalize_binary_key(vars);
        self.terms.get(&key).copied().unwrap_or(0.0)
    }

    /// Add `coeff · Π_{i ∈ vars} x_i`, normalizing x² = x. Zero accumulated
    /// coefficients are dropped so the term multiset stays canonical.
    pub fn add_term(&mut self, vars: &[usize], coeff: f64) {
        let key = normalize_binary_key(vars);
        if let Some(&max) = key.last() {
            if max >= self.num_vars {
                self.num_vars = max + 1;
            }
        }
        let entry = self.terms.entry(key).or_insert(0.0);
        *entry += coeff;
        if *entry == 0.0 {
            let key = normalize_binary_key(vars);
            self.terms.remove(&key);
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (vars, coeff) in other.terms() {
            self.add_term(vars, coeff);
        }
    }

    pub fn scale(&mut self, factor: f64) {
        if factor == 0.0 {
            self.terms.clear();
            return;
        }
        for coeff in self.terms.values_mut() {
            *coeff *= factor;
        }
    }

    /// Polynomial product with x² = x normalization.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::new(self.num_vars.max(other.num_vars));
        for (a_vars, a_coeff) in self.terms() {
            for (b_vars, b_coeff) in other.terms() {
                let mut key: Vec<usize> = a_vars.to_vec();
                key.extend_from_slice(b_vars);
                out.add_term(&key, a_coeff * b_coeff);
            }
        }
        out
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    /// Largest term cardinality; 0 for a constant or empty polynomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(|k| k.len()).max().unwrap_or(0)
    }

    /// Sum of |coefficient| over non-constant terms. The constant shifts all
    /// costs equally, so it does not enter penalty-weight bounds.
    pub fn coeff_abs_sum(&self) -> f64 {
        self.terms
            .iter()
            .filter(|(k, _)| !k.is_empty())
            .map(|(_, c)| c.abs())
            .sum()
    }

    /// Exact multilinear evaluation.
    pub fn evaluate(&self, bits: &[u8]) -> Result<f64> {
        if bits.len() != self.num_vars {
            return Err(FinqError::Dimension(format!(
                "assignment has {} bits, polynomial has {} variables",
                bits.len(),
                self.num_vars
            )));
        }
        let mut total = 0.0;
        'terms: for (vars, coeff) in self.terms() {
            for &v in vars {
                if bits[v] == 0 {
                    continue 'terms;
                }
            }
            total += coeff;
        }
        Ok(total)
    }
}

/// Exact multilinear interpolation of a boolean/real function of a small set
/// of bits. `bit_indices` lists the global variable indices; `f` receives the
/// local assignment packed little-endian (bit k of the argument is
/// `bit_indices[k]`).
pub fn from_truth_table(
    num_vars: usize,
    bit_indices: &[usize],
    f: impl Fn(u64) -> f64,
) -> BinaryPolynomial {
    let k = bit_indices.len();
    assert!(k <= 20, "truth table too large");
    let mut poly = BinaryPolynomial::new(num_vars);
    for assignment in 0u64..(1 << k) {
        let value = f(assignment);
        if value == 0.0 {
            continue;
        }
        // value · Π (y_q ? x_q : 1 − x_q), expanded by subset inclusion-exclusion
        // over the zero positions.
        let zero_positions: Vec<usize> = (0..k).filter(|q| assignment >> q & 1 == 0).collect();
        let one_positions: Vec<usize> = (0..k).filter(|q| assignment >> q & 1 == 1).collect();
        for subset in 0u64..(1 << zero_positions.len()) {
            let mut vars: Vec<usize> = one_positions.iter().map(|&q| bit_indices[q]).collect();
            let mut sign = 1.0;
            for (pos, &q) in zero_positions.iter().enumerate() {
                if subset >> pos & 1 == 1 {
                    vars.push(bit_indices[q]);
                    sign = -sign;
                }
            }
            poly.add_term(&vars, sign * value);
        }
    }
    poly
}

fn normalize_binary_key(vars: &[usize]) -> Vec<usize> {
    let mut key = vars.to_vec();
    key.sort_unstable();
    key.dedup();
    key
}

/// Polynomial over nonnegative integer variables. Repeated indices in a term
/// key encode powers (v₀² is stored as `[0, 0]`), since integer variables are
/// not idempotent.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntegerPolynomial {
    terms: BTreeMap<Vec<usize>, f64>,
    num_vars: usize,
}

impl IntegerPolynomial {
    pub fn new(num_vars: usize) -> Self {
        Self { terms: BTreeMap::new(), num_vars }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], f64)> {
        self.terms.iter().map(|(k, &c)| (k.as_slice(), c))
    }

    pub fn add_term(&mut self, vars: &[usize], coeff: f64) {
        let mut key = vars.to_vec();
        key.sort_unstable();
        if let Some(&max) = key.last() {
            if max >= self.num_vars {
                self.num_vars = max + 1;
            }
        }
        let entry = self.terms.entry(key.clone()).or_insert(0.0);
        *entry += coeff;
        if *entry == 0.0 {
            self.terms.remove(&key);
        }
    }

    pub fn evaluate(&self, values: &[u64]) -> Result<f64> {
        if values.len() != self.num_vars {
            return Err(FinqError::Dimension(format!(
                "assignment has {} values, polynomial has {} variables",
                values.len(),
                self.num_vars
            )));
        }
        let mut total = 0.0;
        for (vars, coeff) in self.terms() {
            let mut product = coeff;
            for &v in vars {
                product *= values[v] as f64;
            }
            total += product;
        }
        Ok(total)
    }

    /// Lower each integer variable to its bit expansion and expand the
    /// polynomial over the concatenated bit blocks. On encoded inputs the
    /// result evaluates to the integer polynomial's value for every integer
    /// assignment in range.
    pub fn substitute_encodings(&self, encodings: &[IntegerEncoding]) -> Result<BinaryPolynomial> {
        if encodings.len() != self.num_vars {
            return Err(FinqError::Config(format!(
                "need {} encodings, got {}",
                self.num_vars,
                encodings.len()
            )));
        }
        let mut offsets = Vec::with_capacity(encodings.len());
        let mut total_bits = 0usize;
        for enc in encodings {
            offsets.push(total_bits);
            total_bits += enc.num_bits();
        }
        // Linear bit expansion of each integer variable.
        let expansions: Vec<BinaryPolynomial> = encodings
            .iter()
            .enumerate()
            .map(|(i, enc)| {
                let mut lin = BinaryPolynomial::new(total_bits);
                for q in 0..enc.num_bits() {
                    lin.add_term(&[offsets[i] + q], enc.scale() * (1u64 << q) as f64);
                }
                lin
            })
            .collect();

        let mut out = BinaryPolynomial::new(total_bits);
        for (vars, coeff) in self.terms() {
            let mut product = BinaryPolynomial::constant(total_bits, coeff);
            for &v in vars {
                product = product.mul(&expansions[v]);
            }
            out.add_assign(&product);
        }
        Ok(out)
    }
}
