// SPDX-License-Identifier: MIT OR Apache-2.0

//! Reproducible Monte Carlo experiments: null calibration, Gumbel fit,
//! power and localization, and the σ̂ vs σ̃ normalizer comparison.
//!
//! Replication `r` draws its sample from ChaCha stream `r` of `base_seed`
//! (see [`crate::rng`]), and outcomes are collected in replication order, so
//! every report is a pure function of its [`ExperimentConfig`] apart from
//! `runtime_secs`. Replication 0 sees exactly the sample returned by
//! [`TailModel::sample`]`(n, base_seed)`.

mod report;

pub use report::{
    read_raw_csv, write_raw_csv, CalibrationTable, ComparisonReport, ExperimentReport, Localization,
    RepValue, REPORT_SCHEMA,
};

use crate::limit::{GumbelLaw, Sides};
use crate::models::{Sampler, TailModel};
use crate::rng::replication_rng;
use crate::stats::{scan, PrefixSums, ScanResult, StatKind};
use crate::summary::{ks_distance, pearson, quantile_rows, sorted_copy};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::time::Instant;

/// Probabilities reported as `empirical_quantiles` unless overridden.
pub const DEFAULT_PROBS: [f64; 9] = [0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99];

/// A single mean shift: observations with 0-based index `≥ ⌊kstar_frac·n⌋`
/// get `delta` added.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Change {
    pub kstar_frac: f64,
    pub delta: f64,
}

impl Change {
    /// `k* = ⌊kstar_frac·n⌋`, the number of unshifted observations.
    pub fn kstar(&self, n: usize) -> usize {
        (self.kstar_frac * n as f64).floor() as usize
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: TailModel,
    pub n: usize,
    pub reps: usize,
    pub stat_kind: StatKind,
    pub sides: Sides,
    pub alpha: f64,
    pub base_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub change: Option<Change>,
    /// Raw-maximum threshold, typically a quantile from [`calibrate`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibrated_threshold: Option<f64>,
}

impl ExperimentConfig {
    /// Two-sided `T_{k,n}` scan at `α = 0.05`, no change.
    pub fn new(model: TailModel, n: usize, reps: usize, base_seed: u64) -> Self {
        Self {
            model,
            n,
            reps,
            stat_kind: StatKind::Tkn,
            sides: Sides::Two,
            alpha: 0.05,
            base_seed,
            change: None,
            calibrated_threshold: None,
        }
    }

    pub fn with_change(mut self, kstar_frac: f64, delta: f64) -> Self {
        self.change = Some(Change { kstar_frac, delta });
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.reps == 0 {
            return Err(Error::Usage("reps must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Usage(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        let min_n = if self.stat_kind == StatKind::Tkn { 4 } else { 2 };
        if self.n < min_n {
            return Err(Error::Usage(format!(
                "{} scan needs n ≥ {min_n}, got {}",
                self.stat_kind, self.n
            )));
        }
        if let Some(c) = self.change {
            if !(c.kstar_frac > 0.0 && c.kstar_frac < 1.0) {
                return Err(Error::Usage(format!(
                    "kstar_frac must lie in (0, 1), got {}",
                    c.kstar_frac
                )));
            }
            if !c.delta.is_finite() {
                return Err(Error::Usage(format!("delta must be finite, got {}", c.delta)));
            }
        }
        if let Some(t) = self.calibrated_threshold {
            if t.is_nan() {
                return Err(Error::Usage("calibrated threshold is NaN".into()));
            }
        }
        Ok(())
    }

    /// Lower-case hex SHA-256 of the compact JSON encoding.
    pub fn hash(&self) -> Result<String> {
        let json = serde_json::to_vec(self)?;
        Ok(hex_digest(&json))
    }

    fn require_null(&self, op: &str) -> Result<()> {
        match self.change {
            Some(_) => Err(Error::Usage(format!("{op} runs under the null; drop the change"))),
            None => Ok(()),
        }
    }
}

pub(crate) fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// What one replication produced.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Outcome {
    Value(RepValue),
    Degenerate,
}

fn draw(cfg: &ExperimentConfig, sampler: &Sampler, rep: u64) -> Vec<f64> {
    let mut rng = replication_rng(cfg.base_seed, rep);
    let mut x = sampler.draw(&mut rng, cfg.n);
    if let Some(c) = cfg.change {
        if c.delta != 0.0 {
            for v in &mut x[c.kstar(cfg.n)..] {
                *v += c.delta;
            }
        }
    }
    x
}

fn scan_values(values: &[f64], kind: StatKind, sides: Sides) -> Result<Option<ScanResult>> {
    let ps = PrefixSums::new(values)?;
    match scan(&ps, kind, sides) {
        Ok(r) => Ok(Some(r)),
        Err(Error::DegenerateData(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn rep_value(rep: u64, r: &ScanResult) -> RepValue {
    RepValue {
        rep,
        raw: r.max_value,
        normalized: r.normalized,
        argmax_k: r.argmax_k,
    }
}

/// Runs every replication in parallel, in replication order.
fn replicate<T, F>(cfg: &ExperimentConfig, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, &[f64]) -> Result<T> + Sync,
{
    let sampler = cfg.model.sampler()?;
    (0..cfg.reps as u64)
        .into_par_iter()
        .map(|rep| f(rep, &draw(cfg, &sampler, rep)))
        .collect()
}

fn outcomes(cfg: &ExperimentConfig) -> Result<Vec<Outcome>> {
    replicate(cfg, |rep, x| {
        Ok(match scan_values(x, cfg.stat_kind, cfg.sides)? {
            Some(r) => Outcome::Value(rep_value(rep, &r)),
            None => Outcome::Degenerate,
        })
    })
}

/// Scans `reps` null samples and summarizes the (normalized when a Gumbel
/// limit exists, raw otherwise) maxima.
pub fn run_null(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    cfg.require_null("run_null")?;
    let start = Instant::now();
    let out = outcomes(cfg)?;
    summarize(cfg, out, start)
}

/// As [`run_null`] with the configured shift applied, plus localization of
/// `k̂ = argmax`. With `delta = 0` the report equals the null report.
pub fn run_power(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    if cfg.change.is_none() {
        return Err(Error::Usage("run_power needs a change (kstar_frac, delta)".into()));
    }
    let start = Instant::now();
    let out = outcomes(cfg)?;
    summarize(cfg, out, start)
}

pub(crate) fn summarize(cfg: &ExperimentConfig, out: Vec<Outcome>, start: Instant) -> Result<ExperimentReport> {
    let mut values = Vec::with_capacity(out.len());
    let mut degenerate_reps = Vec::new();
    for (rep, o) in out.into_iter().enumerate() {
        match o {
            Outcome::Value(v) => values.push(v),
            Outcome::Degenerate => degenerate_reps.push(rep as u64),
        }
    }
    let gumbel = cfg.stat_kind.has_gumbel_limit();
    let reported: Vec<f64> = values
        .iter()
        .map(|v| if gumbel { v.normalized.unwrap_or(v.raw) } else { v.raw })
        .collect();
    let rate = |hits: usize| {
        if values.is_empty() {
            f64::NAN
        } else {
            hits as f64 / values.len() as f64
        }
    };

    let law = GumbelLaw::new(cfg.sides);
    let (critical, asymptotic, ks) = if gumbel && !values.is_empty() {
        let crit = law.critical(cfg.alpha)?;
        let hits = reported.iter().filter(|&&t| t > crit).count();
        (Some(crit), Some(rate(hits)), Some(ks_distance(&reported, |t| law.cdf(t))))
    } else {
        (None, None, None)
    };
    let calibrated = cfg
        .calibrated_threshold
        .filter(|_| !values.is_empty())
        .map(|thr| rate(values.iter().filter(|v| v.raw > thr).count()));

    let localization = match cfg.change {
        Some(c) if cfg.stat_kind != StatKind::Weighted && !values.is_empty() => {
            let kstar = c.kstar(cfg.n);
            let errs: Vec<f64> = values
                .iter()
                .map(|v| v.argmax_k.abs_diff(kstar) as f64 / cfg.n as f64)
                .collect();
            Some(Localization {
                kstar,
                mean_abs_error: errs.iter().sum::<f64>() / errs.len() as f64,
                quantiles: quantile_rows(&errs, &[0.5, 0.9, 0.95]),
            })
        }
        _ => None,
    };

    Ok(ExperimentReport {
        schema: REPORT_SCHEMA,
        tool_version: crate::TOOL_VERSION.into(),
        config_hash: cfg.hash()?,
        config: cfg.clone(),
        generator: crate::rng::GENERATOR.into(),
        reps_completed: values.len(),
        degenerate_count: degenerate_reps.len(),
        degenerate_reps,
        normalized: gumbel,
        empirical_quantiles: if reported.is_empty() {
            Vec::new()
        } else {
            quantile_rows(&reported, &DEFAULT_PROBS)
        },
        critical_value: critical,
        rejection_rate_asymptotic: asymptotic,
        rejection_rate_calibrated: calibrated,
        ks_to_gumbel: ks,
        localization,
        runtime_secs: start.elapsed().as_secs_f64(),
        values: Some(values),
    })
}

/// Empirical quantiles of the raw maximum under the null: finite-sample
/// critical values.
pub fn calibrate(cfg: &ExperimentConfig, probs: &[f64]) -> Result<CalibrationTable> {
    cfg.validate()?;
    cfg.require_null("calibrate")?;
    crate::bridge::check_probs(probs)?;
    let out = outcomes(cfg)?;
    let raw: Vec<f64> = out
        .iter()
        .filter_map(|o| match o {
            Outcome::Value(v) => Some(v.raw),
            Outcome::Degenerate => None,
        })
        .collect();
    if raw.is_empty() {
        return Err(Error::DegenerateData("every replication was degenerate".into()));
    }
    Ok(CalibrationTable {
        schema: REPORT_SCHEMA,
        tool_version: crate::TOOL_VERSION.into(),
        config_hash: cfg.hash()?,
        config: cfg.clone(),
        generator: crate::rng::GENERATOR.into(),
        reps_completed: raw.len(),
        degenerate_count: out.len() - raw.len(),
        quantiles: quantile_rows(&raw, probs),
    })
}

/// Paired `σ̂`- and `σ̃`-normalized maxima on the same samples.
///
/// `stat_kind` in the config is ignored; both scans use `sides`.
pub fn compare_normalizers(cfg: &ExperimentConfig) -> Result<ComparisonReport> {
    cfg.validate()?;
    cfg.require_null("compare_normalizers")?;
    if cfg.n < 4 {
        return Err(Error::Usage(format!("comparison needs n ≥ 4, got {}", cfg.n)));
    }
    let start = Instant::now();
    let pairs = replicate(cfg, |rep, x| {
        let hat = scan_values(x, StatKind::Hat, cfg.sides)?;
        let tkn = scan_values(x, StatKind::Tkn, cfg.sides)?;
        Ok(match (hat, tkn) {
            (Some(h), Some(t)) => Some((rep_value(rep, &h), rep_value(rep, &t))),
            _ => None,
        })
    })?;
    let degenerate_count = pairs.iter().filter(|p| p.is_none()).count();
    let (hat, tkn): (Vec<RepValue>, Vec<RepValue>) = pairs.into_iter().flatten().unzip();
    if hat.is_empty() {
        return Err(Error::DegenerateData("every replication was degenerate".into()));
    }
    let h: Vec<f64> = hat.iter().map(|v| v.normalized.unwrap_or(v.raw)).collect();
    let t: Vec<f64> = tkn.iter().map(|v| v.normalized.unwrap_or(v.raw)).collect();
    let law = GumbelLaw::new(cfg.sides);
    Ok(ComparisonReport {
        schema: REPORT_SCHEMA,
        tool_version: crate::TOOL_VERSION.into(),
        config_hash: cfg.hash()?,
        config: cfg.clone(),
        generator: crate::rng::GENERATOR.into(),
        reps_completed: h.len(),
        degenerate_count,
        pearson: pearson(&h, &t),
        spearman: pearson(&ranks(&h), &ranks(&t)),
        ks_hat: ks_distance(&h, |x| law.cdf(x)),
        ks_tkn: ks_distance(&t, |x| law.cdf(x)),
        quantiles_hat: quantile_rows(&h, &DEFAULT_PROBS),
        quantiles_tkn: quantile_rows(&t, &DEFAULT_PROBS),
        hat,
        tkn,
        runtime_secs: start.elapsed().as_secs_f64(),
    })
}

/// Mid-ranks (ties share their average rank).
fn ranks(x: &[f64]) -> Vec<f64> {
    let sorted = sorted_copy(x);
    x.iter()
        .map(|v| {
            let lo = sorted.partition_point(|s| s < v);
            let hi = sorted.partition_point(|s| s <= v);
            (lo + hi + 1) as f64 / 2.0
        })
        .collect()
}
