//! Write a prices CSV, ingest it back, and estimate rolling moments — the
//! file-based path used when bringing your own market data.
//!
//! ```bash
//! cargo run -p finq --example market_data_files
//! ```

use finq::portfolio::{estimate_moments, generate_instance, ingest_prices, SizeLabel};

fn main() -> finq::Result<()> {
    let (data, _) = generate_instance(SizeLabel::M, 42)?;
    let path = std::env::temp_dir().join("finq-example-prices.csv");
    data.save_csv(&path)?;
    println!("wrote {} rows to {}", data.num_steps(), path.display());

    let loaded = ingest_prices(&path)?;
    assert_eq!(loaded, data);
    println!("round trip OK: {} assets x {} rows", loaded.num_assets(), loaded.num_steps());

    let moments = estimate_moments(&loaded, 4)?;
    for step in [0usize, loaded.num_steps() - 2] {
        println!(
            "step {step}: mean log-returns {:?}",
            moments.mu.row(step).iter().map(|m| format!("{m:.4}")).collect::<Vec<_>>()
        );
    }
    Ok(())
}
