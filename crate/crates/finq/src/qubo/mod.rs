//! Binary cost polynomials, integer-to-bit encodings, penalty constraints,
//! and quadratization.

mod encoding;
mod poly;
#[allow(clippy::module_inception)]
mod qubo;
mod quadratize;

pub use encoding::{encode_integer, IntegerEncoding};
pub use poly::{from_truth_table, BinaryPolynomial, IntegerPolynomial};
pub use quadratize::quadratize;
pub use qubo::Qubo;
