// SPDX-License-Identifier: MIT OR Apache-2.0

//! Symmetric law with density `c·(log|x|)^{α−1}/|x|³` on `|x| ≥ e`.
//!
//! With `V = log|X|`, `V` has density proportional to `v^{α−1} e^{−2v}` on
//! `[1, ∞)`, a Gamma(α, rate 2) law truncated below at 1. Its survival
//! function is `Q(α, 2v)/Q(α, 2)` with `Q` the regularized upper incomplete
//! gamma function.

use crate::{Error, Result};
use statrs::function::gamma::{gamma_ur, ln_gamma};

const NODE_STEP: f64 = 1.0 / 32.0;
/// Smallest `ln w` the sampler can request is `ln 2^{-53}`.
const LN_SURVIVAL_FLOOR: f64 = -38.0;
const NEWTON_REL_TOL: f64 = 1e-13;

/// Normalizing constant `c_α` of the density.
pub(crate) fn normalizing_constant(alpha: f64) -> f64 {
    // ∫_{|x|≥e} (log|x|)^{α−1}|x|^{−3} dx = 2·2^{−α}·Γ(α)·Q(α, 2)
    let ln_mass = std::f64::consts::LN_2 * (1.0 - alpha) + ln_gamma(alpha) + gamma_ur(alpha, 2.0).ln();
    (-ln_mass).exp()
}

/// Inverse-CDF table for `V = log|X|`.
#[derive(Clone, Debug)]
pub(crate) struct LogPowTable {
    alpha: f64,
    ln_gamma_alpha: f64,
    ln_q_at_one: f64,
    /// `ln S(v_i)` at `v_i = 1 + i·NODE_STEP`, strictly decreasing.
    ln_survival: Vec<f64>,
}

impl LogPowTable {
    pub(crate) fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Model(format!("logpow needs α > 0, got {alpha}")));
        }
        let ln_q_at_one = gamma_ur(alpha, 2.0).ln();
        let mut table = Self {
            alpha,
            ln_gamma_alpha: ln_gamma(alpha),
            ln_q_at_one,
            ln_survival: vec![0.0],
        };
        let mut i = 1usize;
        loop {
            let v = 1.0 + i as f64 * NODE_STEP;
            let ln_s = table.ln_survival_at(v);
            if !ln_s.is_finite() {
                return Err(Error::Numerical(format!(
                    "incomplete gamma underflow building logpow({alpha}) table at v={v}"
                )));
            }
            table.ln_survival.push(ln_s);
            if ln_s < LN_SURVIVAL_FLOOR {
                break;
            }
            i += 1;
        }
        Ok(table)
    }

    pub(crate) fn ln_survival_at(&self, v: f64) -> f64 {
        gamma_ur(self.alpha, 2.0 * v).ln() - self.ln_q_at_one
    }

    /// `d/dv ln S(v)`, always negative.
    fn ln_survival_slope(&self, v: f64) -> f64 {
        let x = 2.0 * v;
        let ln_density = std::f64::consts::LN_2 + (self.alpha - 1.0) * x.ln() - x - self.ln_gamma_alpha;
        -(ln_density - gamma_ur(self.alpha, x).ln()).exp()
    }

    /// `v` with `ln S(v) = ln_w`, for `ln_w ∈ [LN_SURVIVAL_FLOOR, 0]`.
    pub(crate) fn inverse(&self, ln_w: f64) -> f64 {
        if ln_w >= 0.0 {
            return 1.0;
        }
        // first node with ln S below the target
        let hi_idx = self.ln_survival.partition_point(|&s| s >= ln_w);
        let hi_idx = hi_idx.min(self.ln_survival.len() - 1);
        let lo_idx = hi_idx - 1;
        let (mut lo, mut hi) = (
            1.0 + lo_idx as f64 * NODE_STEP,
            1.0 + hi_idx as f64 * NODE_STEP,
        );
        let (s_lo, s_hi) = (self.ln_survival[lo_idx], self.ln_survival[hi_idx]);
        let mut v = if s_lo > s_hi {
            lo + (hi - lo) * (s_lo - ln_w) / (s_lo - s_hi)
        } else {
            0.5 * (lo + hi)
        };
        for _ in 0..100 {
            let g = self.ln_survival_at(v) - ln_w;
            if g > 0.0 {
                lo = v;
            } else {
                hi = v;
            }
            let step = g / self.ln_survival_slope(v);
            let mut next = v - step;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let done = (next - v).abs() <= NEWTON_REL_TOL * v || hi - lo <= NEWTON_REL_TOL * v;
            v = next;
            if done {
                break;
            }
        }
        v
    }
}
