//! CSV ingestion for financial networks.
//!
//! A network is described by four files:
//! - `institutions.csv`: `institution,v_crit,b_drop` — row order fixes
//!   institution indices;
//! - `prices.csv`: `asset,price` — row order fixes asset indices;
//! - `ownership.csv`: `institution,asset,share` edge list (matrix D);
//! - `dependency.csv`: `institution,counterparty,weight` edge list (matrix A,
//!   row = holder, column = counterparty).
//!
//! A perturbation file is an `asset,delta` edge list; omitted assets get a
//! zero delta.

use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};

use crate::error::{FinqError, Result};

use super::FinancialNetwork;

/// File locations for one network.
#[derive(Debug, Clone)]
pub struct NetworkPaths {
    pub institutions: PathBuf,
    pub ownership: PathBuf,
    pub dependency: PathBuf,
    pub prices: PathBuf,
}

impl NetworkPaths {
    /// Conventional file names beneath one directory.
    pub fn in_dir(dir: impl AsRef<Path>) -> Self {
        let dir = dir.as_ref();
        Self {
            institutions: dir.join("institutions.csv"),
            ownership: dir.join("ownership.csv"),
            dependency: dir.join("dependency.csv"),
            prices: dir.join("prices.csv"),
        }
    }
}

/// Institution and asset names, in index order.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkLabels {
    pub institutions: Vec<String>,
    pub assets: Vec<String>,
}

fn open_reader(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    let file = std::fs::File::open(path).map_err(|e| {
        FinqError::Data(format!("cannot open {}: {e}", path.display()))
    })?;
    Ok(csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .has_headers(true)
        .from_reader(file))
}

fn parse_f64(field: &str, line: usize, what: &str) -> Result<f64> {
    field.parse().map_err(|_| FinqError::Parse {
        line,
        msg: format!("invalid {what}: {field:?}"),
    })
}

fn record_line(record: &csv::StringRecord, fallback: usize) -> usize {
    record.position().map(|p| p.line() as usize).unwrap_or(fallback)
}

fn lookup(names: &[String], name: &str, line: usize, what: &str) -> Result<usize> {
    names.iter().position(|n| n == name).ok_or_else(|| FinqError::Parse {
        line,
        msg: format!("unknown {what} {name:?}"),
    })
}

pub fn load_network(paths: &NetworkPaths) -> Result<(FinancialNetwork, NetworkLabels)> {
    // institutions: name, v_crit, b_drop
    let mut institutions: Vec<String> = Vec::new();
    let mut v_crit: Vec<f64> = Vec::new();
    let mut b_drop: Vec<f64> = Vec::new();
    let mut reader = open_reader(&paths.institutions)?;
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| FinqError::Data(e.to_string()))?;
        let line = record_line(&record, row + 2);
        if record.len() != 3 {
            return Err(FinqError::Parse {
                line,
                msg: format!("expected institution,v_crit,b_drop, got {} fields", record.len()),
            });
        }
        institutions.push(record[0].to_string());
        v_crit.push(parse_f64(&record[1], line, "v_crit")?);
        b_drop.push(parse_f64(&record[2], line, "b_drop")?);
    }
    if institutions.is_empty() {
        return Err(FinqError::Data("institutions.csv lists no institutions".into()));
    }

    // prices: asset, price
    let mut assets: Vec<String> = Vec::new();
    let mut prices: Vec<f64> = Vec::new();
    let mut reader = open_reader(&paths.prices)?;
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| FinqError::Data(e.to_string()))?;
        let line = record_line(&record, row + 2);
        if record.len() != 2 {
            return Err(FinqError::Parse {
                line,
                msg: format!("expected asset,price, got {} fields", record.len()),
            });
        }
        assets.push(record[0].to_string());
        prices.push(parse_f64(&record[1], line, "price")?);
    }
    if assets.is_empty() {
        return Err(FinqError::Data("prices.csv lists no assets".into()));
    }

    let n = institutions.len();
    let m = assets.len();

    let mut ownership = DMatrix::zeros(n, m);
    let mut reader = open_reader(&paths.ownership)?;
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| FinqError::Data(e.to_string()))?;
        let line = record_line(&record, row + 2);
        if record.len() != 3 {
            return Err(FinqError::Parse {
                line,
                msg: format!("expected institution,asset,share, got {} fields", record.len()),
            });
        }
        let i = lookup(&institutions, &record[0], line, "institution")?;
        let j = lookup(&assets, &record[1], line, "asset")?;
        ownership[(i, j)] = parse_f64(&record[2], line, "share")?;
    }

    let mut dependency = DMatrix::zeros(n, n);
    let mut reader = open_reader(&paths.dependency)?;
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| FinqError::Data(e.to_string()))?;
        let line = record_line(&record, row + 2);
        if record.len() != 3 {
            return Err(FinqError::Parse {
                line,
                msg: format!(
                    "expected institution,counterparty,weight, got {} fields",
                    record.len()
                ),
            });
        }
        let i = lookup(&institutions, &record[0], line, "institution")?;
        let j = lookup(&institutions, &record[1], line, "institution")?;
        dependency[(i, j)] = parse_f64(&record[2], line, "weight")?;
    }

    let network = FinancialNetwork::new(
        dependency,
        ownership,
        DVector::from_vec(prices),
        DVector::from_vec(v_crit),
        DVector::from_vec(b_drop),
    )?;
    Ok((network, NetworkLabels { institutions, assets }))
}

/// Read an `asset,delta` perturbation file into a dense delta vector over
/// the given asset order.
pub fn load_price_delta(path: impl AsRef<Path>, assets: &[String]) -> Result<Vec<f64>> {
    let mut delta = vec![0.0; assets.len()];
    let mut reader = open_reader(path.as_ref())?;
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| FinqError::Data(e.to_string()))?;
        let line = record_line(&record, row + 2);
        if record.len() != 2 {
            return Err(FinqError::Parse {
                line,
                msg: format!("expected asset,delta, got {} fields", record.len()),
            });
        }
        let j = lookup(assets, &record[0], line, "asset")?;
        delta[j] += parse_f64(&record[1], line, "delta")?;
    }
    Ok(delta)
}
