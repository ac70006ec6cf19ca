// SPDX-License-Identifier: MIT OR Apache-2.0

//! Change-in-mean statistics over a single ordered sample.
//!
//! Everything here is computed from [`PrefixSums`], so every per-`k` value is
//! O(1) and every scan is O(n).

mod prefix;
mod scan;
mod weighted;

pub use prefix::PrefixSums;
pub use scan::{gamma_max, scan, scan_hat, scan_tkn, ScanResult, StatKind};
pub use weighted::weighted_supnorm;

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// An ordered series of finite observations `X_1, …, X_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    values: Vec<f64>,
    /// Where the values came from (file path, model string, ...).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_finite(&values)?;
        Ok(Self {
            values,
            source: None,
        })
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = Some(source.into());
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn prefix_sums(&self) -> Result<PrefixSums> {
        PrefixSums::new(&self.values)
    }
}

pub(crate) fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::InvalidData(format!(
            "observation {} is not finite ({})",
            i + 1,
            values[i]
        ))),
        None => Ok(()),
    }
}
