// SPDX-License-Identifier: MIT OR Apache-2.0

use super::scan::reject_constant;
use super::PrefixSums;
use crate::limit::q_weight_unchecked;
use crate::Result;
use std::cmp::Ordering;

/// A breakpoint `num/den` of the step functions `⌊(n+1)t⌋` and `⌊nt⌋`.
#[derive(Clone, Copy, Debug)]
struct Frac {
    num: u64,
    den: u64,
}

impl Frac {
    fn cmp(self, other: Frac) -> Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }

    fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// `sup_{0<t<1} |Z_n(t)| / (σ̂_{m(t),n} · q(t))` with `m(t) = min(n, ⌊nt⌋+1)`.
///
/// `Z_n` and `σ̂_{m(t),n}` are step functions with jumps at `i/(n+1)` and
/// `l/n`, and `q` increases on `(0, 1/2]` and decreases on `[1/2, 1)`. On each
/// piece between consecutive breakpoints (with `1/2` added as a breakpoint)
/// the supremum is therefore `|Z|/σ̂` over the smallest `q` on the piece,
/// which sits at the left end on the rising half and the right end on the
/// falling half. The walk is exact and O(n).
pub fn weighted_supnorm(ps: &PrefixSums) -> Result<f64> {
    let n = ps.n();
    if n < 2 {
        return Err(crate::Error::InvalidData(format!(
            "weighted statistic needs n ≥ 2, got {n}"
        )));
    }
    reject_constant(ps)?;

    let sigma: Vec<f64> = (1..=n)
        .map(|m| ps.sigma_hat_sq(m).map(f64::sqrt))
        .collect::<Result<_>>()?;

    let nn = n as u64;
    let half = Frac { num: 1, den: 2 };
    let one = Frac { num: 1, den: 1 };
    // next unconsumed breakpoints of each family
    let mut next_a = 1u64; // a = next_a/(n+1), up to n
    let mut next_c = 1u64; // c = next_c/n, up to n-1
    let mut half_done = false;

    let mut lo = Frac { num: 0, den: 1 };
    let mut j = 0usize; // ⌊(n+1)t⌋ on the current piece
    let mut m = 1usize; // min(n, ⌊nt⌋+1) on the current piece
    let mut sup = 0.0f64;

    loop {
        let mut hi = one;
        if next_a <= nn {
            hi = Frac { num: next_a, den: nn + 1 };
        }
        if next_c < nn {
            let c = Frac { num: next_c, den: nn };
            if c.cmp(hi) == Ordering::Less {
                hi = c;
            }
        }
        if !half_done && half.cmp(hi) == Ordering::Less {
            hi = half;
        }

        if j >= 1 && j < n {
            let z = ps.z_at(j).abs();
            let q = if hi.cmp(half) != Ordering::Greater {
                q_weight_unchecked(lo.value())
            } else {
                q_weight_unchecked(hi.value())
            };
            let s = sigma[m - 1];
            let term = if s > 0.0 {
                z / (s * q)
            } else if z == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            sup = sup.max(term);
        }

        if hi.cmp(one) == Ordering::Equal {
            break;
        }
        // consume every breakpoint that coincides with `hi`
        if next_a <= nn && (Frac { num: next_a, den: nn + 1 }).cmp(hi) == Ordering::Equal {
            next_a += 1;
            j += 1;
        }
        if next_c < nn && (Frac { num: next_c, den: nn }).cmp(hi) == Ordering::Equal {
            next_c += 1;
            m += 1;
        }
        if !half_done && half.cmp(hi) != Ordering::Greater {
            half_done = true;
        }
        lo = hi;
    }
    Ok(sup)
}
