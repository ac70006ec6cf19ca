// SPDX-License-Identifier: MIT OR Apache-2.0

use super::{weighted_supnorm, PrefixSums};
use crate::limit::{GumbelLaw, NormConstants, Sides};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Which maximal statistic a scan computes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StatKind {
    /// `max |Γ_n(k)|`, unnormalized.
    Gamma,
    /// `Γ_n(k)/σ̂_{k,n}` over `1 ≤ k < n`.
    Hat,
    /// `T_{k,n}` over `2 ≤ k ≤ n−2`.
    #[default]
    Tkn,
    /// Weighted sup-norm of `Z_n/σ̂` with weight `q`.
    Weighted,
}

impl StatKind {
    /// Whether the Darling–Erdős normalization applies.
    pub fn has_gumbel_limit(self) -> bool {
        matches!(self, StatKind::Hat | StatKind::Tkn)
    }
}

impl fmt::Display for StatKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StatKind::Gamma => "gamma",
            StatKind::Hat => "hat",
            StatKind::Tkn => "tkn",
            StatKind::Weighted => "weighted",
        })
    }
}

impl FromStr for StatKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gamma" => Ok(StatKind::Gamma),
            "hat" => Ok(StatKind::Hat),
            "tkn" => Ok(StatKind::Tkn),
            "weighted" => Ok(StatKind::Weighted),
            other => Err(Error::Usage(format!(
                "unknown statistic {other:?}; expected tkn|hat|gamma|weighted"
            ))),
        }
    }
}

/// Outcome of a scan over all candidate change points.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanResult {
    pub stat_kind: StatKind,
    /// `Two` means the maximum is over absolute values.
    pub sides: Sides,
    /// Candidate index of `values[0]`.
    pub first_k: usize,
    pub values: Vec<f64>,
    pub max_value: f64,
    /// Smallest `k` attaining `max_value`.
    pub argmax_k: usize,
    pub constants: Option<NormConstants>,
    /// `a(n)·max − b(n)`.
    pub normalized: Option<f64>,
    pub p_one_sided: Option<f64>,
    pub p_two_sided: Option<f64>,
    /// Candidates whose variance estimate was exactly zero.
    pub degenerate_ks: Vec<usize>,
}

impl ScanResult {
    /// `(k, value)` pairs.
    pub fn per_k(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.first_k + i, v))
    }

    /// Asymptotic p-value for the law matching `sides`.
    pub fn p_value(&self) -> Option<f64> {
        match self.sides {
            Sides::One => self.p_one_sided,
            Sides::Two => self.p_two_sided,
        }
    }

    fn from_values(
        stat_kind: StatKind,
        sides: Sides,
        first_k: usize,
        values: Vec<f64>,
        degenerate_ks: Vec<usize>,
        n: usize,
    ) -> Self {
        let fold = |v: f64| match sides {
            Sides::One => v,
            Sides::Two => v.abs(),
        };
        let mut max_value = f64::NEG_INFINITY;
        let mut argmax_k = first_k;
        for (i, &v) in values.iter().enumerate() {
            if fold(v) > max_value {
                max_value = fold(v);
                argmax_k = first_k + i;
            }
        }
        let mut out = Self {
            stat_kind,
            sides,
            first_k,
            values,
            max_value,
            argmax_k,
            constants: None,
            normalized: None,
            p_one_sided: None,
            p_two_sided: None,
            degenerate_ks,
        };
        if stat_kind.has_gumbel_limit() {
            let c = NormConstants::for_count(n);
            let t = c.normalize(max_value);
            out.constants = Some(c);
            out.normalized = Some(t);
            out.p_one_sided = Some(GumbelLaw::ONE_SIDED.pvalue(t));
            out.p_two_sided = Some(GumbelLaw::TWO_SIDED.pvalue(t));
        }
        out
    }
}

/// `Γ_n = max_{1≤k<n} |Γ_n(k)|`. No normalization: `Γ_n` diverges under the
/// null, so the p-value fields stay empty.
pub fn gamma_max(ps: &PrefixSums) -> Result<ScanResult> {
    let n = ps.n();
    if n < 2 {
        return Err(Error::InvalidData(format!("Γ scan needs n ≥ 2, got {n}")));
    }
    let values = (1..n).map(|k| ps.gamma(k)).collect::<Result<Vec<_>>>()?;
    Ok(ScanResult::from_values(
        StatKind::Gamma,
        Sides::Two,
        1,
        values,
        Vec::new(),
        n,
    ))
}

/// Scan `T_{k,n}` over `2 ≤ k ≤ n−2`.
pub fn scan_tkn(ps: &PrefixSums, sides: Sides) -> Result<ScanResult> {
    let n = ps.n();
    if n < 4 {
        return Err(Error::InvalidData(format!("T scan needs n ≥ 4, got {n}")));
    }
    reject_constant(ps)?;
    let mut degenerate = Vec::new();
    let mut values = Vec::with_capacity(n - 3);
    for k in 2..=n - 2 {
        if ps.sigma_tilde_sq(k)? == 0.0 {
            degenerate.push(k);
        }
        values.push(ps.t_stat(k)?);
    }
    Ok(ScanResult::from_values(StatKind::Tkn, sides, 2, values, degenerate, n))
}

/// Scan the `σ̂`-normalized statistic over `1 ≤ k < n`.
pub fn scan_hat(ps: &PrefixSums, sides: Sides) -> Result<ScanResult> {
    let n = ps.n();
    if n < 2 {
        return Err(Error::InvalidData(format!("σ̂ scan needs n ≥ 2, got {n}")));
    }
    reject_constant(ps)?;
    let mut degenerate = Vec::new();
    let mut values = Vec::with_capacity(n - 1);
    for k in 1..n {
        if ps.sigma_hat_sq(k)? == 0.0 {
            degenerate.push(k);
        }
        values.push(ps.hat_stat(k)?);
    }
    Ok(ScanResult::from_values(StatKind::Hat, sides, 1, values, degenerate, n))
}

/// Dispatch on [`StatKind`].
///
/// The weighted statistic has no per-`k` profile; its result carries the
/// supremum as `max_value` with `argmax_k = 0` and an empty `values`.
pub fn scan(ps: &PrefixSums, kind: StatKind, sides: Sides) -> Result<ScanResult> {
    match kind {
        StatKind::Gamma => gamma_max(ps),
        StatKind::Hat => scan_hat(ps, sides),
        StatKind::Tkn => scan_tkn(ps, sides),
        StatKind::Weighted => {
            let sup = weighted_supnorm(ps)?;
            Ok(ScanResult {
                stat_kind: StatKind::Weighted,
                sides: Sides::Two,
                first_k: 0,
                values: Vec::new(),
                max_value: sup,
                argmax_k: 0,
                constants: None,
                normalized: None,
                p_one_sided: None,
                p_two_sided: None,
                degenerate_ks: Vec::new(),
            })
        }
    }
}

pub(super) fn reject_constant(ps: &PrefixSums) -> Result<()> {
    if ps.is_constant() {
        Err(Error::DegenerateData(
            "all observations are equal; the self-normalized statistics are undefined".into(),
        ))
    } else {
        Ok(())
    }
}
