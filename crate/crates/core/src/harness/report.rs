// SPDX-License-Identifier: MIT OR Apache-2.0

use super::ExperimentConfig;
use crate::summary::QuantileRow;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

pub const REPORT_SCHEMA: u32 = 1;

/// One replication's maximum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepValue {
    pub rep: u64,
    #[serde(with = "crate::serde_f64")]
    pub raw: f64,
    #[serde(default, with = "crate::serde_f64::option")]
    pub normalized: Option<f64>,
    pub argmax_k: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Localization {
    pub kstar: usize,
    /// Mean of `|k̂ − k*|/n`.
    pub mean_abs_error: f64,
    pub quantiles: Vec<QuantileRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema: u32,
    pub tool_version: String,
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub generator: String,
    pub reps_completed: usize,
    pub degenerate_count: usize,
    pub degenerate_reps: Vec<u64>,
    /// Whether quantiles and KS refer to `a(n)·max − b(n)` (true) or the
    /// raw maximum (statistics without a Gumbel limit).
    pub normalized: bool,
    pub empirical_quantiles: Vec<QuantileRow>,
    pub critical_value: Option<f64>,
    pub rejection_rate_asymptotic: Option<f64>,
    pub rejection_rate_calibrated: Option<f64>,
    pub ks_to_gumbel: Option<f64>,
    pub localization: Option<Localization>,
    pub runtime_secs: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<RepValue>>,
}

fn check_unit(name: &str, v: Option<f64>) -> Result<()> {
    match v {
        Some(x) if !(0.0..=1.0).contains(&x) => {
            Err(Error::InvalidData(format!("{name} = {x} outside [0, 1]")))
        }
        _ => Ok(()),
    }
}

fn check_header(schema: u32, hash: &str, cfg: &ExperimentConfig) -> Result<()> {
    if schema != REPORT_SCHEMA {
        return Err(Error::InvalidData(format!("unsupported schema {schema}")));
    }
    cfg.validate()?;
    if hash != cfg.hash()? {
        return Err(Error::InvalidData("config_hash does not match config".into()));
    }
    Ok(())
}

fn check_quantiles(rows: &[QuantileRow]) -> Result<()> {
    let ok = rows.windows(2).all(|w| {
        w[0].prob <= w[1].prob && (w[0].value <= w[1].value || w[0].value.is_nan() || w[1].value.is_nan())
    });
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidData("quantile table is not monotone".into()))
    }
}

impl ExperimentReport {
    pub fn validate(&self) -> Result<()> {
        check_header(self.schema, &self.config_hash, &self.config)?;
        if self.reps_completed + self.degenerate_count != self.config.reps
            || self.degenerate_reps.len() != self.degenerate_count
        {
            return Err(Error::InvalidData("replication counts do not add up".into()));
        }
        check_unit("rejection_rate_asymptotic", self.rejection_rate_asymptotic)?;
        check_unit("rejection_rate_calibrated", self.rejection_rate_calibrated)?;
        check_unit("ks_to_gumbel", self.ks_to_gumbel)?;
        check_quantiles(&self.empirical_quantiles)?;
        if let Some(v) = &self.values {
            if v.len() != self.reps_completed {
                return Err(Error::InvalidData("per-replication values do not match reps_completed".into()));
            }
        }
        Ok(())
    }

    pub fn without_values(mut self) -> Self {
        self.values = None;
        self
    }

    /// `(rep, raw max)` rows for [`write_raw_csv`].
    pub fn raw_rows(&self) -> Vec<(u64, f64)> {
        self.values
            .iter()
            .flatten()
            .map(|v| (v.rep, v.raw))
            .collect()
    }

    pub fn to_json_pretty(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Finite-sample critical values of the raw maximum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTable {
    pub schema: u32,
    pub tool_version: String,
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub generator: String,
    pub reps_completed: usize,
    pub degenerate_count: usize,
    pub quantiles: Vec<QuantileRow>,
}

impl CalibrationTable {
    pub fn validate(&self) -> Result<()> {
        check_header(self.schema, &self.config_hash, &self.config)?;
        check_quantiles(&self.quantiles)
    }

    /// The raw-maximum quantile at `prob`, if tabulated.
    pub fn threshold(&self, prob: f64) -> Option<f64> {
        self.quantiles.iter().find(|r| r.prob == prob).map(|r| r.value)
    }

    /// CSV `prob,value` preceded by `#` metadata lines.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let c = &self.config;
        writeln!(w, "# model={}", c.model)?;
        writeln!(w, "# n={}", c.n)?;
        writeln!(w, "# reps={}", c.reps)?;
        writeln!(w, "# stat={}", c.stat_kind)?;
        writeln!(w, "# sides={}", c.sides)?;
        writeln!(w, "# seed={}", c.base_seed)?;
        writeln!(w, "# reps_completed={}", self.reps_completed)?;
        writeln!(w, "# degenerate={}", self.degenerate_count)?;
        writeln!(w, "# config_hash={}", self.config_hash)?;
        writeln!(w, "# generator={}", self.generator)?;
        writeln!(w, "# tool={}", self.tool_version)?;
        writeln!(w, "prob,value")?;
        for r in &self.quantiles {
            writeln!(w, "{},{}", r.prob, r.value)?;
        }
        Ok(())
    }
}

/// Paired maxima of the `σ̂`- and `σ̃`-normalized scans.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub schema: u32,
    pub tool_version: String,
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub generator: String,
    pub reps_completed: usize,
    pub degenerate_count: usize,
    #[serde(with = "crate::serde_f64")]
    pub pearson: f64,
    #[serde(with = "crate::serde_f64")]
    pub spearman: f64,
    pub ks_hat: f64,
    pub ks_tkn: f64,
    pub quantiles_hat: Vec<QuantileRow>,
    pub quantiles_tkn: Vec<QuantileRow>,
    pub hat: Vec<RepValue>,
    pub tkn: Vec<RepValue>,
    pub runtime_secs: f64,
}

impl ComparisonReport {
    pub fn validate(&self) -> Result<()> {
        check_header(self.schema, &self.config_hash, &self.config)?;
        check_unit("ks_hat", Some(self.ks_hat))?;
        check_unit("ks_tkn", Some(self.ks_tkn))?;
        if self.pearson.abs() > 1.0 + 1e-12 || self.spearman.abs() > 1.0 + 1e-12 {
            return Err(Error::InvalidData("correlation outside [-1, 1]".into()));
        }
        if self.hat.len() != self.reps_completed
            || self.tkn.len() != self.reps_completed
            || self.hat.iter().zip(&self.tkn).any(|(h, t)| h.rep != t.rep)
        {
            return Err(Error::InvalidData("paired values are misaligned".into()));
        }
        check_quantiles(&self.quantiles_hat)?;
        check_quantiles(&self.quantiles_tkn)
    }
}

/// Writes `rep,value` rows.
pub fn write_raw_csv<W: Write>(rows: &[(u64, f64)], mut w: W) -> Result<()> {
    writeln!(w, "rep,value")?;
    for (rep, v) in rows {
        writeln!(w, "{rep},{v}")?;
    }
    Ok(())
}

/// Reads the `value` column of a `rep,value` dump; `#` lines are comments.
///
/// A `prob,value` quantile table is refused: it cannot give a Monte Carlo
/// p-value.
pub fn read_raw_csv<R: Read>(r: R) -> Result<Vec<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(r);
    let headers = rdr.headers()?.clone();
    let cols: Vec<&str> = headers.iter().collect();
    if cols.first() == Some(&"prob") {
        return Err(Error::Usage(
            "calibration file is a quantile table; pass a `rep,value` dump from `amoc simulate`".into(),
        ));
    }
    if cols != ["rep", "value"] {
        return Err(Error::Usage(format!(
            "calibration file must have header `rep,value`, found `{}`",
            cols.join(",")
        )));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let v: f64 = rec[1].parse().map_err(|_| Error::Parse {
            line,
            message: format!("not a number: {:?}", &rec[1]),
        })?;
        if v.is_nan() {
            return Err(Error::Parse {
                line,
                message: "NaN in calibration values".into(),
            });
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err(Error::InvalidData("calibration file has no values".into()));
    }
    Ok(out)
}
