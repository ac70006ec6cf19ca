// SPDX-License-Identifier: MIT OR Apache-2.0

// Power and change-point localization as the shift grows.
//
// ```bash
// cargo run --release --example power_study
// ```

use amoc::harness::{run_power, ExperimentConfig};
use amoc::models::TailModel;

pub fn run_example() -> amoc::Result<()> {
    println!("{:<10} {:>6} {:>8} {:>14}", "model", "delta", "power", "mean|k^-k*|/n");
    for model in [TailModel::Normal { mean: 0.0, sd: 1.0 }, TailModel::Pareto2] {
        for delta in [0.0, 0.25, 0.5, 1.0] {
            let cfg = ExperimentConfig::new(model, 500, 200, 21).with_change(0.5, delta);
            let r = run_power(&cfg)?;
            let loc = r.localization.as_ref().map_or(f64::NAN, |l| l.mean_abs_error);
            println!(
                "{:<10} {delta:>6} {:>8.3} {loc:>14.4}",
                model.to_string(),
                r.rejection_rate_asymptotic.unwrap_or(f64::NAN)
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> amoc::Result<()> {
    run_example()
}
