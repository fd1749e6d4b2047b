//! Build a binary cost polynomial, add an equality constraint, reduce a
//! cubic term to quadratic form, solve, and round-trip the result through
//! the text format.
//!
//! ```bash
//! cargo run -p finq --example qubo_basics
//! ```

use finq::qubo::{quadratize, BinaryPolynomial, Qubo};
use finq::solvers::{solve, SolverHandle};

fn main() -> finq::Result<()> {
    // objective: pick exactly two of four items, with a bonus for taking
    // items 0·1·2 together (a cubic interaction)
    let mut poly = BinaryPolynomial::new(4);
    poly.add_term(&[0], -1.0);
    poly.add_term(&[1], -1.2);
    poly.add_term(&[2], -0.8);
    poly.add_term(&[3], -1.1);
    poly.add_term(&[0, 1, 2], -0.5);

    let (mut qubo, ancillas) = quadratize(&poly)?;
    println!("quadratized with {ancillas} ancilla variable(s), {} total", qubo.num_vars());

    // exactly two items: (Σ x_i − 2)² weighted to dominate
    let mut coeffs = vec![0.0; qubo.num_vars()];
    for i in 0..4 {
        coeffs[i] = 1.0;
    }
    qubo.add_penalty_equality(&coeffs, 2.0, 10.0)?;

    let result = solve(&qubo, &SolverHandle::exhaustive())?;
    println!("best assignment: {:?} cost {:.3}", &result.best_bits[..4], result.best_cost);
    assert_eq!(result.best_bits[..4].iter().map(|&b| b as u32).sum::<u32>(), 2);

    // serialization round-trips bit-exactly
    let mut buffer = Vec::new();
    qubo.write_text(&mut buffer)?;
    let reloaded = Qubo::read_text(buffer.as_slice())?;
    assert_eq!(qubo, reloaded);
    println!("text round-trip OK ({} bytes)", buffer.len());
    Ok(())
}
