// SPDX-License-Identifier: MIT OR Apache-2.0

// σ̂ (pooled, biased) versus σ̃ (two unbiased segment variances) as the
// self-normalizer, with finite and infinite variance.
//
// ```bash
// cargo run --release --example compare_normalizers
// ```

use amoc::harness::{compare_normalizers, ExperimentConfig};
use amoc::models::TailModel;

pub fn run_example() -> amoc::Result<()> {
    for model in [TailModel::Normal { mean: 0.0, sd: 1.0 }, TailModel::Pareto2, TailModel::LogPow { alpha: 0.5 }] {
        let r = compare_normalizers(&ExperimentConfig::new(model, 2000, 200, 31))?;
        let median = |q: &[amoc::summary::QuantileRow]| q.iter().find(|r| r.prob == 0.5).map_or(f64::NAN, |r| r.value);
        println!(
            "{model}: pearson {:.3}, spearman {:.3}, KS hat {:.3}, KS tkn {:.3}, medians {:.3} / {:.3}",
            r.pearson,
            r.spearman,
            r.ks_hat,
            r.ks_tkn,
            median(&r.quantiles_hat),
            median(&r.quantiles_tkn)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> amoc::Result<()> {
    run_example()
}
