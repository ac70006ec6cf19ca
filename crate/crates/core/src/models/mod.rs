// SPDX-License-Identifier: MIT OR Apache-2.0

//! Sampling laws in the domain of attraction of the normal law.
//!
//! | model          | `l(x) = E X² 1{|X| ≤ x}`                  | variance |
//! |----------------|-------------------------------------------|----------|
//! | `normal:μ,σ`   | `σ²(erf(z/√2) − 2zφ(z))`, `z = x/σ`       | finite   |
//! | `student:ν`    | quadrature, `ν > 2`                        | finite   |
//! | `pareto2`      | `2 log x` for `x ≥ 1`                      | infinite |
//! | `logpow:α`     | `(2c_α/α)((log x)^α − 1)` for `x ≥ e`      | infinite |
//!
//! Every model is symmetric about its mean, so `l` is centered exactly.

mod diag;
mod logpow;

pub use diag::{
    epsilon_diag, eta_n, lfun_ratio, slow_var_diag, truncated_second_moment, SlowVarDiag,
};

use crate::rng::seeded_rng;
use crate::stats::Sample;
use crate::{Error, Result};
use logpow::LogPowTable;
use rand::Rng;
use rand_distr::{Distribution, Normal, StudentT};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

pub const MODEL_GRAMMAR: &str = "normal:MEAN,SD | student:DF | pareto2 | logpow:ALPHA";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum TailModel {
    Normal { mean: f64, sd: f64 },
    /// Student t with `df > 2` degrees of freedom.
    Student { df: f64 },
    /// `P(|X| > x) = x^{−2}` for `x ≥ 1`, random sign.
    Pareto2,
    /// Density `∝ (log|x|)^{α−1}/|x|³` on `|x| ≥ e`.
    LogPow { alpha: f64 },
}

impl TailModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            TailModel::Normal { mean, sd } => {
                if !mean.is_finite() || !(sd > 0.0 && sd.is_finite()) {
                    return Err(Error::Model(format!(
                        "normal needs finite mean and sd > 0, got {mean}, {sd}"
                    )));
                }
            }
            TailModel::Student { df } => {
                if !(df > 2.0 && df.is_finite()) {
                    return Err(Error::Model(format!("student needs df > 2, got {df}")));
                }
            }
            TailModel::Pareto2 => {}
            TailModel::LogPow { alpha } => {
                if !(alpha > 0.0 && alpha.is_finite()) {
                    return Err(Error::Model(format!("logpow needs α > 0, got {alpha}")));
                }
            }
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        match *self {
            TailModel::Normal { mean, .. } => mean,
            _ => 0.0,
        }
    }

    pub fn has_finite_variance(&self) -> bool {
        matches!(self, TailModel::Normal { .. } | TailModel::Student { .. })
    }

    /// `b = inf{x ≥ 1 : l(x) > 0}`.
    pub fn support_floor(&self) -> f64 {
        match self {
            TailModel::LogPow { .. } => std::f64::consts::E,
            _ => 1.0,
        }
    }

    /// Prepares a reusable sampler (builds the inverse-CDF table for `logpow`).
    pub fn sampler(&self) -> Result<Sampler> {
        self.validate()?;
        let inner = match *self {
            TailModel::Normal { mean, sd } => {
                SamplerKind::Normal(Normal::new(mean, sd).map_err(|e| Error::Model(e.to_string()))?)
            }
            TailModel::Student { df } => {
                SamplerKind::Student(StudentT::new(df).map_err(|e| Error::Model(e.to_string()))?)
            }
            TailModel::Pareto2 => SamplerKind::Pareto2,
            TailModel::LogPow { alpha } => SamplerKind::LogPow(LogPowTable::new(alpha)?),
        };
        Ok(Sampler { model: *self, inner })
    }

    /// `n` i.i.d. draws, a pure function of `(self, n, seed)`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Sample> {
        if n == 0 {
            return Err(Error::Usage("sample size must be at least 1".into()));
        }
        let sampler = self.sampler()?;
        let mut rng = seeded_rng(seed);
        let values = sampler.draw(&mut rng, n);
        Ok(Sample::new(values)?.with_source(format!("{self} seed={seed}")))
    }
}

#[derive(Clone, Debug)]
enum SamplerKind {
    Normal(Normal<f64>),
    Student(StudentT<f64>),
    Pareto2,
    LogPow(LogPowTable),
}

/// A validated model ready to draw from any RNG.
#[derive(Clone, Debug)]
pub struct Sampler {
    model: TailModel,
    inner: SamplerKind,
}

impl Sampler {
    pub fn model(&self) -> TailModel {
        self.model
    }

    pub fn draw_one<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.inner {
            SamplerKind::Normal(d) => d.sample(rng),
            SamplerKind::Student(d) => d.sample(rng),
            SamplerKind::Pareto2 => {
                let w = 1.0 - rng.random::<f64>();
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                sign / w.sqrt()
            }
            SamplerKind::LogPow(table) => {
                let w = 1.0 - rng.random::<f64>();
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                sign * table.inverse(w.ln()).exp()
            }
        }
    }

    pub fn fill<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        for x in out {
            *x = self.draw_one(rng);
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        self.fill(rng, &mut out);
        out
    }
}

impl fmt::Display for TailModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TailModel::Normal { mean, sd } => write!(f, "normal:{mean},{sd}"),
            TailModel::Student { df } => write!(f, "student:{df}"),
            TailModel::Pareto2 => f.write_str("pareto2"),
            TailModel::LogPow { alpha } => write!(f, "logpow:{alpha}"),
        }
    }
}

impl FromStr for TailModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let usage = || Error::Usage(format!("invalid model {s:?}; expected {MODEL_GRAMMAR}"));
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| usage());
        let (name, args) = match s.split_once(':') {
            Some((name, args)) => (name.trim(), Some(args)),
            None => (s.trim(), None),
        };
        let model = match (name, args) {
            ("normal", None) => TailModel::Normal { mean: 0.0, sd: 1.0 },
            ("normal", Some(args)) => {
                let (m, sd) = args.split_once(',').ok_or_else(usage)?;
                TailModel::Normal {
                    mean: num(m)?,
                    sd: num(sd)?,
                }
            }
            ("student", Some(df)) => TailModel::Student { df: num(df)? },
            ("pareto2", None) => TailModel::Pareto2,
            ("logpow", Some(a)) => TailModel::LogPow { alpha: num(a)? },
            _ => return Err(usage()),
        };
        model.validate()?;
        Ok(model)
    }
}

impl From<TailModel> for String {
    fn from(m: TailModel) -> String {
        m.to_string()
    }
}

impl TryFrom<String> for TailModel {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}
