// SPDX-License-Identifier: MIT OR Apache-2.0

// Normalizing constants and Gumbel critical values.
//
// ```bash
// cargo run --example gumbel_tables
// ```

use amoc::limit::{q_weight, GumbelLaw, NormConstants};

pub fn run_example() -> amoc::Result<()> {
    println!("{:>10} {:>10} {:>10} {:>16}", "n", "a(n)", "b(n)", "raw 5% (2-sided)");
    let crit = GumbelLaw::TWO_SIDED.critical(0.05)?;
    for n in [10usize, 100, 1_000, 10_000, 100_000, 1_000_000] {
        let c = NormConstants::for_count(n);
        println!("{n:>10} {:>10.6} {:>10.6} {:>16.6}", c.a_n, c.b_n, c.raw_threshold(crit));
    }

    println!();
    println!("{:>6} {:>12} {:>12}", "alpha", "one-sided", "two-sided");
    for alpha in [0.2, 0.1, 0.05, 0.01, 0.001] {
        let one = GumbelLaw::ONE_SIDED.critical(alpha)?;
        let two = GumbelLaw::TWO_SIDED.critical(alpha)?;
        assert!((GumbelLaw::TWO_SIDED.pvalue(two) - alpha).abs() < 1e-12);
        println!("{alpha:>6} {one:>12.6} {two:>12.6}");
    }

    println!();
    for t in [1e-6, 1e-3, 0.1, 0.5] {
        println!("q({t}) = {:.6}", q_weight(t)?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> amoc::Result<()> {
    run_example()
}
