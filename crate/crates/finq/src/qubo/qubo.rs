//! Quadratic unconstrained binary optimization problems.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{FinqError, Result};
use crate::qubo::poly::BinaryPolynomial;

/// Degree-≤2 binary cost function:
///
/// cost(x) = offset + Σ_i linear[i]·x_i + Σ_{i<j} quadratic[(i,j)]·x_i·x_j
///
/// The quadratic map stores the full pair coefficient keyed by (i, j) with
/// i < j; the diagonal is always folded into `linear` since x² = x.
/// Iteration order over coefficients is deterministic (sorted keys).
#[derive(Debug, Clone, PartialEq)]
pub struct Qubo {
    num_vars: usize,
    linear: Vec<f64>,
    quadratic: BTreeMap<(usize, usize), f64>,
    offset: f64,
}

impl Qubo {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            linear: vec![0.0; num_vars],
            quadratic: BTreeMap::new(),
            offset: 0.0,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    pub fn quadratic(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.quadratic
    }

    pub fn add_offset(&mut self, value: f64) {
        self.offset += value;
    }

    pub fn add_linear(&mut self, i: usize, coeff: f64) {
        assert!(i < self.num_vars, "variable index out of range");
        self.linear[i] += coeff;
    }

    /// Add a pair coefficient. A diagonal entry (i == j) is folded into the
    /// linear term.
    pub fn add_quadratic(&mut self, i: usize, j: usize, coeff: f64) {
        assert!(i < self.num_vars && j < self.num_vars, "variable index out of range");
        if i == j {
            self.linear[i] += coeff;
            return;
        }
        let key = (i.min(j), i.max(j));
        let entry = self.quadratic.entry(key).or_insert(0.0);
        *entry += coeff;
        if *entry == 0.0 {
            self.quadratic.remove(&key);
        }
    }

    pub fn cost(&self, bits: &[u8]) -> Result<f64> {
        if bits.len() != self.num_vars {
            return Err(FinqError::Dimension(format!(
                "assignment has {} bits, qubo has {} variables",
                bits.len(),
                self.num_vars
            )));
        }
        let mut total = self.offset;
        for (i, &coeff) in self.linear.iter().enumerate() {
            if bits[i] != 0 {
                total += coeff;
            }
        }
        for (&(i, j), &coeff) in &self.quadratic {
            if bits[i] != 0 && bits[j] != 0 {
                total += coeff;
            }
        }
        Ok(total)
    }

    /// Add `weight · (Σ_i terms[i].1 · x_{terms[i].0} + constant)²`, expanded
    /// to quadratic form with x² = x.
    pub fn add_weighted_square(&mut self, terms: &[(usize, f64)], constant: f64, weight: f64) {
        self.offset += weight * constant * constant;
        for (k, &(i, ci)) in terms.iter().enumerate() {
            self.add_linear(i, weight * ci * (ci + 2.0 * constant));
            for &(j, cj) in &terms[k + 1..] {
                if i == j {
                    // duplicate index in the combination: x_i·x_i = x_i
                    self.add_linear(i, 2.0 * weight * ci * cj);
                } else {
                    self.add_quadratic(i, j, 2.0 * weight * ci * cj);
                }
            }
        }
    }

    /// Add the equality penalty `weight · (coeffs · x − target)²`.
    pub fn add_penalty_equality(&mut self, coeffs: &[f64], target: f64, weight: f64) -> Result<()> {
        if !(weight > 0.0) {
            return Err(FinqError::Parameter(format!(
                "penalty weight must be positive, got {weight}"
            )));
        }
        if coeffs.len() != self.num_vars {
            return Err(FinqError::Dimension(format!(
                "coefficient vector has {} entries, qubo has {} variables",
                coeffs.len(),
                self.num_vars
            )));
        }
        let terms: Vec<(usize, f64)> = coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0.0)
            .map(|(i, &c)| (i, c))
            .collect();
        self.add_weighted_square(&terms, -target, weight);
        Ok(())
    }

    /// Sum of |coefficient| over linear and quadratic terms (offset excluded).
    /// Bounds the cost range over all assignments.
    pub fn coeff_abs_sum(&self) -> f64 {
        self.linear.iter().map(|c| c.abs()).sum::<f64>()
            + self.quadratic.values().map(|c| c.abs()).sum::<f64>()
    }

    /// Per-variable neighbor lists: entry i holds (j, pair coefficient) for
    /// every quadratic term touching i. Used by solvers for O(degree) flip
    /// deltas.
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.num_vars];
        for (&(i, j), &coeff) in &self.quadratic {
            adj[i].push((j, coeff));
            adj[j].push((i, coeff));
        }
        adj
    }

    /// Largest possible |ΔE| of a single bit flip; temperature scale for
    /// annealing schedules. Returns 1.0 for an all-zero objective.
    pub fn flip_magnitude(&self) -> f64 {
        let mut row_sums = vec![0.0f64; self.num_vars];
        for (&(i, j), &coeff) in &self.quadratic {
            row_sums[i] += coeff.abs();
            row_sums[j] += coeff.abs();
        }
        let spread = self
            .linear
            .iter()
            .zip(&row_sums)
            .map(|(l, r)| l.abs() + r)
            .fold(0.0f64, f64::max);
        if spread > 0.0 {
            spread
        } else {
            1.0
        }
    }

    /// Requires degree ≤ 2.
    pub fn from_polynomial(poly: &BinaryPolynomial) -> Result<Self> {
        if poly.degree() > 2 {
            return Err(FinqError::Parameter(format!(
                "polynomial has degree {}, expected ≤ 2 (quadratize first)",
                poly.degree()
            )));
        }
        let mut qubo = Self::new(poly.num_vars());
        for (vars, coeff) in poly.terms() {
            match vars {
                [] => qubo.offset += coeff,
                [i] => qubo.add_linear(*i, coeff),
                [i, j] => qubo.add_quadratic(*i, *j, coeff),
                _ => unreachable!(),
            }
        }
        Ok(qubo)
    }

    pub fn to_polynomial(&self) -> BinaryPolynomial {
        let mut poly = BinaryPolynomial::new(self.num_vars);
        if self.offset != 0.0 {
            poly.add_term(&[], self.offset);
        }
        for (i, &coeff) in self.linear.iter().enumerate() {
            if coeff != 0.0 {
                poly.add_term(&[i], coeff);
            }
        }
        for (&(i, j), &coeff) in &self.quadratic {
            poly.add_term(&[i, j], coeff);
        }
        poly
    }

    /// Text serialization: a `# vars` and `# offset` header, then one line
    /// per term — `i i coeff` for linear (diagonal convention on disk only)
    /// and `i j coeff` for pairs. Coefficients are written with 17
    /// significant digits so the round trip is bit-exact.
    pub fn write_text<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# vars {}", self.num_vars)?;
        writeln!(w, "# offset {:.16e}", self.offset)?;
        for (i, &coeff) in self.linear.iter().enumerate() {
            if coeff != 0.0 {
                writeln!(w, "{i} {i} {coeff:.16e}")?;
            }
        }
        for (&(i, j), &coeff) in &self.quadratic {
            writeln!(w, "{i} {j} {coeff:.16e}")?;
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let mut num_vars: Option<usize> = None;
        let mut offset = 0.0;
        let mut entries: Vec<(usize, usize, f64)> = Vec::new();
        let mut max_index = 0usize;
        for (line_no, line) in r.lines().enumerate() {
            let line = line?;
            let line_no = line_no + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            if trimmed.starts_with('#') {
                match fields.get(1) {
                    Some(&"vars") => {
                        num_vars = Some(parse_field(fields.get(2), line_no, "vars")?);
                    }
                    Some(&"offset") => {
                        offset = parse_field(fields.get(2), line_no, "offset")?;
                    }
                    _ => {} // unknown comment, ignore
                }
                continue;
            }
            if fields.len() != 3 {
                return Err(FinqError::Parse {
                    line: line_no,
                    msg: format!("expected `i j coeff`, got {trimmed:?}"),
                });
            }
            let i: usize = parse_field(fields.first(), line_no, "row index")?;
            let j: usize = parse_field(fields.get(1), line_no, "col index")?;
            let coeff: f64 = parse_field(fields.get(2), line_no, "coefficient")?;
            max_index = max_index.max(i).max(j);
            entries.push((i, j, coeff));
        }
        let num_vars = num_vars.unwrap_or(if entries.is_empty() { 0 } else { max_index + 1 });
        if !entries.is_empty() && max_index >= num_vars {
            return Err(FinqError::Parse {
                line: 0,
                msg: format!("index {max_index} exceeds declared vars {num_vars}"),
            });
        }
        let mut qubo = Self::new(num_vars);
        qubo.offset = offset;
        for (i, j, coeff) in entries {
            if i == j {
                qubo.add_linear(i, coeff);
            } else {
                qubo.add_quadratic(i, j, coeff);
            }
        }
        Ok(qubo)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_text(std::io::BufWriter::new(file))?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_text(std::io::BufReader::new(file))
    }
}

fn parse_field<T: std::str::FromStr>(
    field: Option<&&str>,
    line: usize,
    what: &str,
) -> Result<T> {
    field
        .ok_or_else(|| FinqError::Parse { line, msg: format!("missing {what}") })?
        .parse()
        .map_err(|_| FinqError::Parse { line, msg: format!("invalid {what}") })
}
