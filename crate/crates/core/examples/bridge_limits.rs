// SPDX-License-Identifier: MIT OR Apache-2.0

// Monte Carlo quantiles of the Brownian bridge functionals and how far the
// normalized Darling–Erdős supremum still is from its Gumbel limit.
//
// ```bash
// cargo run --release --example bridge_limits
// ```

use amoc::bridge::{limit_quantiles, normalize_de, simulate_functional, BridgeFunctional, LimitConfig};
use amoc::summary::{ks_distance, mean_se};
use amoc::GumbelLaw;

pub fn run_example() -> amoc::Result<()> {
    let probs = [0.5, 0.9, 0.95, 0.99];
    let cfg = LimitConfig::new(BridgeFunctional::WeightedSupQ, 500, 1024, 1e6, 1);
    let q = limit_quantiles(&cfg, &probs)?;
    q.write_csv(std::io::stdout().lock())?;

    for horizon in [1e3, 1e6] {
        let cfg = LimitConfig::new(BridgeFunctional::DarlingErdos, 500, 1024, horizon, 2);
        let norm = normalize_de(&simulate_functional(&cfg)?, horizon);
        let (mean, se) = mean_se(&norm);
        let ks = ks_distance(&norm, |t| GumbelLaw::ONE_SIDED.cdf(t));
        println!("T = {horizon:e}: mean {mean:.3} ± {se:.3} (Gumbel 0.577), KS {ks:.3}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> amoc::Result<()> {
    run_example()
}
