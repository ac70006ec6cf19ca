// SPDX-License-Identifier: MIT OR Apache-2.0

use crate::harness::REPORT_SCHEMA;
use crate::limit::Sides;
use crate::stats::StatKind;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Reject,
    Retain,
}

impl Decision {
    /// 1 for reject, 0 for retain.
    pub fn exit_code(self) -> i32 {
        match self {
            Decision::Reject => 1,
            Decision::Retain => 0,
        }
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decision::Reject => "reject",
            Decision::Retain => "retain",
        })
    }
}

/// Outcome of `amoc test` on one series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub schema: u32,
    pub tool_version: String,
    pub input: String,
    pub input_fingerprint: String,
    pub n: usize,
    pub stat_kind: StatKind,
    pub sides: Sides,
    #[serde(with = "crate::serde_f64")]
    pub max_value: f64,
    /// 0 for the weighted statistic, which has no single maximizing `k`.
    pub argmax_k: usize,
    pub a_n: Option<f64>,
    pub b_n: Option<f64>,
    #[serde(with = "crate::serde_f64::option")]
    pub normalized: Option<f64>,
    pub p_asymptotic: Option<f64>,
    pub p_calibrated: Option<f64>,
    pub calibration_reps: Option<usize>,
    pub alpha: f64,
    pub decision: Decision,
}

impl TestReport {
    /// The calibrated p-value when present, else the asymptotic one.
    pub fn operative_p(&self) -> Option<f64> {
        self.p_calibrated.or(self.p_asymptotic)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidData(m));
        if self.schema != REPORT_SCHEMA {
            return bad(format!("unsupported schema {}", self.schema));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha {} outside (0, 1)", self.alpha));
        }
        for p in [self.p_asymptotic, self.p_calibrated].into_iter().flatten() {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("p-value {p} outside [0, 1]"));
            }
        }
        if self.p_calibrated.is_some() != self.calibration_reps.is_some() {
            return bad("p_calibrated and calibration_reps must appear together".into());
        }
        let Some(p) = self.operative_p() else {
            return bad("report carries no p-value".into());
        };
        let expect = if p < self.alpha { Decision::Reject } else { Decision::Retain };
        if expect != self.decision {
            return bad(format!("decision {} inconsistent with p = {p}", self.decision));
        }
        Ok(())
    }
}
