//! Reduction of higher-order binary polynomials to quadratic form.
//!
//! Uses pair substitution: the most frequent variable pair across terms of
//! degree ≥ 3 is replaced by a fresh ancilla z, together with the exactness
//! penalty M·(xy − 2xz − 2yz + 3z). The penalty is 0 when z = x·y and ≥ M
//! otherwise, so with M larger than the objective range the reduction is
//! exact: for every original assignment, the ancilla-minimized quadratic cost
//! equals the original polynomial value.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::qubo::poly::BinaryPolynomial;
use crate::qubo::qubo::Qubo;

/// Replace higher-order terms with ancilla variables until the polynomial is
/// quadratic. Returns the quadratic form (ancilla variables appended after
/// the originals) and the number of ancillas introduced.
pub fn quadratize(poly: &BinaryPolynomial) -> Result<(Qubo, usize)> {
    // Certified penalty: any wrong ancilla costs at least M, which exceeds
    // twice the objective range bound.
    let penalty = 2.0 * poly.coeff_abs_sum() + 1.0;

    let mut terms: BTreeMap<Vec<usize>, f64> =
        poly.terms().map(|(vars, coeff)| (vars.to_vec(), coeff)).collect();
    let mut num_vars = poly.num_vars();
    let original_vars = num_vars;
    let mut penalty_terms: Vec<(Vec<usize>, f64)> = Vec::new();

    loop {
        let high: Vec<&Vec<usize>> = terms.keys().filter(|k| k.len() >= 3).collect();
        if high.is_empty() {
            break;
        }
        // Most frequent pair among high-degree terms; ties go to the
        // smallest (i, j) so the reduction is deterministic.
        let mut pair_counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for key in &high {
            for a in 0..key.len() {
                for b in a + 1..key.len() {
                    *pair_counts.entry((key[a], key[b])).or_insert(0) += 1;
                }
            }
        }
        let (&(x, y), _) = pair_counts
            .iter()
            .max_by(|(ka, ca), (kb, cb)| ca.cmp(cb).then_with(|| kb.cmp(ka)))
            .expect("high-degree term implies at least one pair");

        let ancilla = num_vars;
        num_vars += 1;

        let affected: Vec<Vec<usize>> = high
            .into_iter()
            .filter(|k| k.binary_search(&x).is_ok() && k.binary_search(&y).is_ok())
            .cloned()
            .collect();
        for key in affected {
            let coeff = terms.remove(&key).expect("key taken from the map");
            let mut replaced: Vec<usize> =
                key.iter().copied().filter(|&v| v != x && v != y).collect();
            replaced.push(ancilla); // ancilla index is the largest so far
            let entry = terms.entry(replaced.clone()).or_insert(0.0);
            *entry += coeff;
            if *entry == 0.0 {
                terms.remove(&replaced);
            }
        }
        penalty_terms.push((vec![x, y], penalty));
        penalty_terms.push((vec![x, ancilla], -2.0 * penalty));
        penalty_terms.push((vec![y, ancilla], -2.0 * penalty));
        penalty_terms.push((vec![ancilla], 3.0 * penalty));
    }

    let mut reduced = BinaryPolynomial::new(num_vars);
    for (vars, coeff) in terms {
        reduced.add_term(&vars, coeff);
    }
    for (vars, coeff) in penalty_terms {
        reduced.add_term(&vars, coeff);
    }
    let qubo = Qubo::from_polynomial(&reduced)?;
    Ok((qubo, num_vars - original_vars))
}
