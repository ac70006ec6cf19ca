// SPDX-License-Identifier: MIT OR Apache-2.0

// Null behaviour of the T-scan at finite n, and finite-sample critical
// values that fix its size.
//
// ```bash
// cargo run --release --example null_calibration
// ```

use amoc::harness::{calibrate, run_null, ExperimentConfig};
use amoc::models::TailModel;

pub fn run_example() -> amoc::Result<()> {
    let model = TailModel::Normal { mean: 0.0, sd: 1.0 };
    let cfg = ExperimentConfig::new(model, 1000, 500, 11);
    let null = run_null(&cfg)?;
    println!(
        "asymptotic 5% test: rejection rate {:.3}, KS to Gumbel {:.3}",
        null.rejection_rate_asymptotic.unwrap_or(f64::NAN),
        null.ks_to_gumbel.unwrap_or(f64::NAN)
    );

    let table = calibrate(&ExperimentConfig::new(model, 1000, 1000, 12), &[0.9, 0.95, 0.99])?;
    for row in &table.quantiles {
        println!("raw max quantile {:.2}: {:.4}", row.prob, row.value);
    }
    let fresh = ExperimentConfig {
        calibrated_threshold: table.threshold(0.95),
        ..ExperimentConfig::new(model, 1000, 500, 13)
    };
    let rate = run_null(&fresh)?.rejection_rate_calibrated.unwrap_or(f64::NAN);
    println!("calibrated 5% test on fresh samples: rejection rate {rate:.3}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> amoc::Result<()> {
    run_example()
}
