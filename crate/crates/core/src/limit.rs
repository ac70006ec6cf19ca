// SPDX-License-Identifier: MIT OR Apache-2.0

//! Darling–Erdős normalization and the Gumbel limit laws.
//!
//! All logarithms of `n` go through [`guarded_log`], `log x := log(max(e, x))`,
//! at every level of nesting. As a consequence `a(n) = √2` for `n ≤ 15`.
//!
//! p-values produced here are asymptotic. At practical sample sizes the
//! iterated-log convergence is slow; finite-sample critical values come from
//! [`crate::harness::calibrate`].

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

/// `ln(max(e, x))`. Always at least 1.
pub fn guarded_log(x: f64) -> f64 {
    if x > E {
        x.ln()
    } else {
        1.0
    }
}

/// `guarded_log ∘ guarded_log`.
pub fn guarded_loglog(x: f64) -> f64 {
    guarded_log(guarded_log(x))
}

/// Scaling `a(n)` and centering `b(n)` for maxima of `n` standardized terms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormConstants {
    pub n: f64,
    pub a_n: f64,
    pub b_n: f64,
}

impl NormConstants {
    /// `a(n) = (2 LL n)^{1/2}`, `b(n) = 2 LL n + ½ L(LL n) − ½ log π`.
    ///
    /// `n` is a real so that horizons such as `10^8` can be passed directly.
    pub fn new(n: f64) -> Self {
        let ll = guarded_loglog(n);
        Self {
            n,
            a_n: (2.0 * ll).sqrt(),
            b_n: 2.0 * ll + 0.5 * guarded_log(ll) - 0.5 * PI.ln(),
        }
    }

    pub fn for_count(n: usize) -> Self {
        Self::new(n as f64)
    }

    /// `a(n)·max − b(n)`. Infinite maxima stay infinite.
    pub fn normalize(&self, max: f64) -> f64 {
        self.a_n * max - self.b_n
    }

    /// Inverse of [`normalize`](Self::normalize): the raw maximum at which
    /// the normalized statistic equals `t`.
    pub fn raw_threshold(&self, t: f64) -> f64 {
        (t + self.b_n) / self.a_n
    }
}

/// One-sided (`max T`) or two-sided (`max |T|`) scanning.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sides {
    One,
    #[default]
    Two,
}

impl fmt::Display for Sides {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sides::One => "one",
            Sides::Two => "two",
        })
    }
}

impl FromStr for Sides {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one" | "one-sided" => Ok(Sides::One),
            "two" | "two-sided" => Ok(Sides::Two),
            other => Err(Error::Usage(format!("unknown sides {other:?}; expected one|two"))),
        }
    }
}

/// Gumbel law `exp(−e^{−t})` (one-sided) or `exp(−2e^{−t})` (two-sided).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GumbelLaw {
    pub sides: Sides,
}

impl GumbelLaw {
    pub const ONE_SIDED: GumbelLaw = GumbelLaw { sides: Sides::One };
    pub const TWO_SIDED: GumbelLaw = GumbelLaw { sides: Sides::Two };

    pub fn new(sides: Sides) -> Self {
        Self { sides }
    }

    fn multiplicity(&self) -> f64 {
        match self.sides {
            Sides::One => 1.0,
            Sides::Two => 2.0,
        }
    }

    pub fn cdf(&self, t: f64) -> f64 {
        (-self.multiplicity() * (-t).exp()).exp()
    }

    /// Upper tail probability. `+∞` maps to 0.
    pub fn pvalue(&self, normalized: f64) -> f64 {
        if normalized == f64::INFINITY {
            return 0.0;
        }
        -(-self.multiplicity() * (-normalized).exp()).exp_m1()
    }

    /// The `t` with `pvalue(t) = alpha`.
    pub fn critical(&self, alpha: f64) -> Result<f64> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        Ok(-(-(-alpha).ln_1p() / self.multiplicity()).ln())
    }
}

/// Weight `q(t) = (t · LL(1/t))^{1/2}` on `(0, 1/2]`, mirrored on `[1/2, 1)`.
pub fn q_weight(t: f64) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Domain(format!("q(t) needs 0 < t < 1, got {t}")));
    }
    Ok(q_weight_unchecked(t))
}

pub(crate) fn q_weight_unchecked(t: f64) -> f64 {
    let s = if t <= 0.5 { t } else { 1.0 - t };
    (s * guarded_loglog(1.0 / s)).sqrt()
}
