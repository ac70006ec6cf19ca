// SPDX-License-Identifier: MIT OR Apache-2.0

// Truncated second moments of the bundled tail models: is `l(x)` slowly
// varying, and where does the truncation level `η_n` sit?
//
// ```bash
// cargo run --example dan_diagnostics
// ```

use amoc::models::{eta_n, slow_var_diag, TailModel};

pub fn run_example() -> amoc::Result<()> {
    let models: Vec<TailModel> = ["normal", "student:3", "student:2.5", "pareto2", "logpow:0.5", "logpow:2"]
        .iter()
        .map(|s| s.parse())
        .collect::<amoc::Result<_>>()?;
    for m in &models {
        println!("{m}  (finite variance: {})", m.has_finite_variance());
        println!("  {:>10} {:>14} {:>12} {:>14}", "x", "l(x)", "eps(x)", "l(x^2)/l(x)");
        for x in [5.0, 50.0, 500.0, 5e4] {
            let d = slow_var_diag(m, x)?;
            println!(
                "  {:>10} {:>14.6} {:>12.3e} {:>14.6}",
                x, d.l_of_x, d.eps_of_x, d.ratio_l_x2_over_l_x
            );
        }
        println!("  eta_n at n = 1e4, 1e6: {:.4}, {:.4}", eta_n(m, 10_000)?, eta_n(m, 1_000_000)?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> amoc::Result<()> {
    run_example()
}
