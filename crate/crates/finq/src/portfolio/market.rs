//! Market price series and moment estimation.

use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::error::{FinqError, Result};

/// A T × N table of asset prices per time step with row timestamps.
/// Prices are strictly positive and T ≥ 2.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketData {
    prices: DMatrix<f64>,
    timestamps: Vec<String>,
    asset_names: Vec<String>,
}

impl MarketData {
    pub fn new(
        prices: DMatrix<f64>,
        timestamps: Vec<String>,
        asset_names: Vec<String>,
    ) -> Result<Self> {
        if prices.nrows() < 2 {
            return Err(FinqError::Data(format!(
                "need at least 2 time steps, got {}",
                prices.nrows()
            )));
        }
        if timestamps.len() != prices.nrows() {
            return Err(FinqError::Dimension(format!(
                "{} timestamps for {} rows",
                timestamps.len(),
                prices.nrows()
            )));
        }
        if asset_names.len() != prices.ncols() {
            return Err(FinqError::Dimension(format!(
                "{} asset names for {} columns",
                asset_names.len(),
                prices.ncols()
            )));
        }
        if prices.iter().any(|p| !(*p > 0.0) || !p.is_finite()) {
            return Err(FinqError::Data("prices must be positive and finite".into()));
        }
        Ok(Self { prices, timestamps, asset_names })
    }

    pub fn num_steps(&self) -> usize {
        self.prices.nrows()
    }

    pub fn num_assets(&self) -> usize {
        self.prices.ncols()
    }

    pub fn prices(&self) -> &DMatrix<f64> {
        &self.prices
    }

    pub fn timestamps(&self) -> &[String] {
        &self.timestamps
    }

    pub fn asset_names(&self) -> &[String] {
        &self.asset_names
    }

    /// (T−1) × N matrix of log price ratios between consecutive rows.
    pub fn log_returns(&self) -> DMatrix<f64> {
        let t = self.num_steps() - 1;
        DMatrix::from_fn(t, self.num_assets(), |row, col| {
            (self.prices[(row + 1, col)] / self.prices[(row, col)]).ln()
        })
    }

    /// (T−1) × N matrix of simple returns p_{t+1}/p_t − 1.
    pub fn simple_returns(&self) -> DMatrix<f64> {
        let t = self.num_steps() - 1;
        DMatrix::from_fn(t, self.num_assets(), |row, col| {
            self.prices[(row + 1, col)] / self.prices[(row, col)] - 1.0
        })
    }

    /// CSV with a header of asset names and an ISO date first column.
    /// Prices are printed with the shortest representation that round-trips,
    /// so write → read reproduces the matrix bit-exactly.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        write!(w, "date")?;
        for name in &self.asset_names {
            write!(w, ",{name}")?;
        }
        writeln!(w)?;
        for (row, stamp) in self.timestamps.iter().enumerate() {
            write!(w, "{stamp}")?;
            for col in 0..self.num_assets() {
                write!(w, ",{}", self.prices[(row, col)])?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))?;
        Ok(())
    }
}

/// Parse a prices CSV: header row of asset names, first column an ISO date,
/// one row per time step. Rows are sorted by date; duplicate dates are
/// rejected and non-positive prices are data errors naming the row.
pub fn ingest_prices(path: impl AsRef<Path>) -> Result<MarketData> {
    let file = std::fs::File::open(path.as_ref()).map_err(|e| {
        FinqError::Data(format!("cannot open {}: {e}", path.as_ref().display()))
    })?;
    read_prices(file)
}

pub fn read_prices<R: std::io::Read>(reader: R) -> Result<MarketData> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .has_headers(true)
        .from_reader(reader);
    let headers = csv_reader
        .headers()
        .map_err(|e| FinqError::Data(e.to_string()))?
        .clone();
    if headers.len() < 2 {
        return Err(FinqError::Data("prices CSV needs a date column and at least one asset".into()));
    }
    let asset_names: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    let n = asset_names.len();

    let mut rows: Vec<(String, Vec<f64>, usize)> = Vec::new();
    for (row_index, record) in csv_reader.records().enumerate() {
        let record = record.map_err(|e| FinqError::Data(e.to_string()))?;
        let line = record
            .position()
            .map(|p| p.line() as usize)
            .unwrap_or(row_index + 2);
        if record.len() != n + 1 {
            return Err(FinqError::Parse {
                line,
                msg: format!("expected {} fields, got {}", n + 1, record.len()),
            });
        }
        let date = record[0].to_string();
        let mut values = Vec::with_capacity(n);
        for field in record.iter().skip(1) {
            let value: f64 = field.parse().map_err(|_| FinqError::Parse {
                line,
                msg: format!("invalid price {field:?}"),
            })?;
            if !(value > 0.0) || !value.is_finite() {
                return Err(FinqError::Data(format!(
                    "non-positive price {value} on line {line}"
                )));
            }
            values.push(value);
        }
        rows.push((date, values, line));
    }
    rows.sort_by(|a, b| a.0.cmp(&b.0));
    for pair in rows.windows(2) {
        if pair[0].0 == pair[1].0 {
            return Err(FinqError::Data(format!("duplicate date {:?}", pair[0].0)));
        }
    }
    let t = rows.len();
    if t < 2 {
        return Err(FinqError::Data(format!("need at least 2 rows, got {t}")));
    }
    let prices = DMatrix::from_fn(t, n, |row, col| rows[row].1[col]);
    let timestamps = rows.into_iter().map(|(date, _, _)| date).collect();
    MarketData::new(prices, timestamps, asset_names)
}

/// Per-step expected returns and covariance matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    /// T′ × N matrix of trailing-window mean log returns, T′ = T − 1.
    pub mu: DMatrix<f64>,
    /// One N × N sample covariance per step.
    pub sigma: Vec<DMatrix<f64>>,
}

/// Trailing-window mean and sample covariance of log returns. Step t uses
/// return rows max(0, t − window + 1) ..= t, so the first `window` steps run
/// on an expanding window; a single-row window has zero covariance.
pub fn estimate_moments(data: &MarketData, window: usize) -> Result<Moments> {
    if window < 2 {
        return Err(FinqError::Parameter(format!("window must be ≥ 2, got {window}")));
    }
    if data.num_steps() <= window {
        return Err(FinqError::Data(format!(
            "insufficient history: {} price rows for window {window}",
            data.num_steps()
        )));
    }
    let returns = data.log_returns();
    let steps = returns.nrows();
    let n = returns.ncols();
    let mut mu = DMatrix::zeros(steps, n);
    let mut sigma = Vec::with_capacity(steps);
    for t in 0..steps {
        let lo = (t + 1).saturating_sub(window);
        let len = t + 1 - lo;
        let slice = returns.rows(lo, len);
        let mean: DVector<f64> = slice.row_mean().transpose();
        for (j, &m) in mean.iter().enumerate() {
            mu[(t, j)] = m;
        }
        let mut cov = DMatrix::zeros(n, n);
        if len >= 2 {
            for row in 0..len {
                let centered: DVector<f64> = slice.row(row).transpose() - &mean;
                cov += &centered * centered.transpose();
            }
            cov /= (len - 1) as f64;
        }
        sigma.push(cov);
    }
    Ok(Moments { mu, sigma })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn market(prices: DMatrix<f64>) -> MarketData {
        let t = prices.nrows();
        let n = prices.ncols();
        MarketData::new(
            prices,
            (0..t).map(|i| format!("2020-{:02}-01", i + 1)).collect(),
            (0..n).map(|j| format!("A{j}")).collect(),
        )
        .unwrap()
    }

    #[test]
    fn constant_prices_have_zero_moments() {
        let data = market(DMatrix::from_element(8, 2, 5.0));
        let moments = estimate_moments(&data, 3).unwrap();
        assert!(moments.mu.iter().all(|&m| m == 0.0));
        assert!(moments.sigma.iter().all(|s| s.iter().all(|&c| c == 0.0)));
    }

    #[test]
    fn deterministic_exponential_growth() {
        // prices (1, e, e²): every log return is exactly 1, variance 0
        let e = std::f64::consts::E;
        let data = market(DMatrix::from_column_slice(3, 1, &[1.0, e, e * e]));
        let moments = estimate_moments(&data, 2).unwrap();
        assert_eq!(moments.mu.nrows(), 2);
        for t in 0..2 {
            assert!((moments.mu[(t, 0)] - 1.0).abs() < 1e-12);
            assert!(moments.sigma[t][(0, 0)].abs() < 1e-12);
        }
    }

    /// Second-route oracle: recompute mean and covariance with plain loops.
    #[test]
    fn moments_match_direct_recomputation() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let t = 10;
        let mut prices = DMatrix::zeros(t, 2);
        for col in 0..2 {
            let mut p: f64 = 100.0;
            for row in 0..t {
                prices[(row, col)] = p;
                p *= (0.01 * rng.gen_range(-1.0..1.0f64)).exp();
            }
        }
        let data = market(prices);
        let window = 4;
        let moments = estimate_moments(&data, window).unwrap();
        let returns = data.log_returns();
        for step in 0..returns.nrows() {
            let lo = (step + 1).saturating_sub(window);
            let rows: Vec<usize> = (lo..=step).collect();
            for a in 0..2 {
                let mean: f64 =
                    rows.iter().map(|&r| returns[(r, a)]).sum::<f64>() / rows.len() as f64;
                assert!((moments.mu[(step, a)] - mean).abs() < 1e-12);
                for b in 0..2 {
                    let mean_b: f64 =
                        rows.iter().map(|&r| returns[(r, b)]).sum::<f64>() / rows.len() as f64;
                    let cov = if rows.len() >= 2 {
                        rows.iter()
                            .map(|&r| (returns[(r, a)] - mean) * (returns[(r, b)] - mean_b))
                            .sum::<f64>()
                            / (rows.len() - 1) as f64
                    } else {
                        0.0
                    };
                    assert!((moments.sigma[step][(a, b)] - cov).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn insufficient_history_is_rejected() {
        let data = market(DMatrix::from_element(3, 1, 1.0));
        assert!(matches!(estimate_moments(&data, 5), Err(FinqError::Data(_))));
    }

    #[test]
    fn csv_round_trip_reproduces_matrix() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let prices = DMatrix::from_fn(5, 3, |_, _| rng.gen_range(0.5..200.0f64));
        let data = market(prices);
        let mut buf = Vec::new();
        data.write_csv(&mut buf).unwrap();
        let loaded = read_prices(buf.as_slice()).unwrap();
        assert_eq!(data, loaded);
    }

    #[test]
    fn csv_rejects_zero_price() {
        let text = "date,A\n2020-01-01,1.0\n2020-02-01,0.0\n";
        match read_prices(text.as_bytes()) {
            Err(FinqError::Data(msg)) => assert!(msg.contains("line 3")),
            other => panic!("expected data error, got {other:?}"),
        }
    }

    #[test]
    fn csv_rejects_duplicate_dates() {
        let text = "date,A\n2020-01-01,1.0\n2020-01-01,2.0\n";
        assert!(matches!(read_prices(text.as_bytes()), Err(FinqError::Data(_))));
    }

    #[test]
    fn csv_sorts_rows_by_date() {
        let text = "date,A\n2020-03-01,3.0\n2020-01-01,1.0\n2020-02-01,2.0\n";
        let data = read_prices(text.as_bytes()).unwrap();
        assert_eq!(data.timestamps()[0], "2020-01-01");
        assert_eq!(data.prices()[(0, 0)], 1.0);
        assert_eq!(data.prices()[(2, 0)], 3.0);
    }
}
