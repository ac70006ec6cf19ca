// SPDX-License-Identifier: MIT OR Apache-2.0

//! Truncated second moment `l(x)` and the slow-variation diagnostics built
//! on it.

use super::logpow::normalizing_constant;
use super::TailModel;
use crate::limit::guarded_loglog;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use libm::erf;
use statrs::function::gamma::ln_gamma;
use std::f64::consts::{E, PI};

const QUAD_TOL: f64 = 1e-12;
const ETA_REL_TOL: f64 = 1e-9;

/// `l(x)`, `ε(x)` and `l(x²)/l(x)` at one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlowVarDiag {
    pub x: f64,
    pub l_of_x: f64,
    pub eps_of_x: f64,
    pub ratio_l_x2_over_l_x: f64,
}

/// Density of `X − μ` at `x > 0`.
pub(crate) fn centered_density(model: &TailModel, x: f64) -> f64 {
    match *model {
        TailModel::Normal { sd, .. } => {
            let z = x / sd;
            (-0.5 * z * z).exp() / (sd * (2.0 * PI).sqrt())
        }
        TailModel::Student { df } => student_pdf(df, x),
        TailModel::Pareto2 => {
            if x >= 1.0 {
                x.powi(-3)
            } else {
                0.0
            }
        }
        TailModel::LogPow { alpha } => {
            if x >= E {
                normalizing_constant(alpha) * x.ln().powf(alpha - 1.0) / x.powi(3)
            } else {
                0.0
            }
        }
    }
}

fn student_pdf(df: f64, t: f64) -> f64 {
    let ln_c = ln_gamma(0.5 * (df + 1.0)) - ln_gamma(0.5 * df) - 0.5 * (df * PI).ln();
    (ln_c - 0.5 * (df + 1.0) * (t * t / df).ln_1p()).exp()
}

/// `l` as a function of `log x`, for the models with closed forms in `log x`.
fn l_of_log(model: &TailModel, log_x: f64) -> Option<f64> {
    match *model {
        TailModel::Pareto2 => Some(if log_x > 0.0 { 2.0 * log_x } else { 0.0 }),
        TailModel::LogPow { alpha } => Some(if log_x >= 1.0 {
            2.0 * normalizing_constant(alpha) / alpha * (log_x.powf(alpha) - 1.0)
        } else {
            0.0
        }),
        _ => None,
    }
}

/// `∫_0^x u² f(u) du` on geometric pieces `[b, 10b], [10b, 100b], …` above
/// the support floor `b` (plus `[0, 1]` for laws supported near zero).
fn half_second_moment_quadrature(model: &TailModel, x: f64) -> f64 {
    let integrand = |u: f64| u * u * centered_density(model, u);
    let mut total = 0.0;
    let (mut lo, mut hi) = match model {
        TailModel::Pareto2 | TailModel::LogPow { .. } => {
            let b = model.support_floor();
            if x <= b {
                return 0.0;
            }
            (b, (10.0 * b).min(x))
        }
        _ => (0.0, 1.0f64.min(x)),
    };
    loop {
        total += quadrature::double_exponential::integrate(integrand, lo, hi, QUAD_TOL).integral;
        if hi >= x {
            break;
        }
        lo = hi;
        hi = (hi * 10.0).min(x);
    }
    total
}

/// `l(x) = E (X−μ)² 1{|X−μ| ≤ x}`.
pub fn truncated_second_moment(model: &TailModel, x: f64) -> Result<f64> {
    model.validate()?;
    if x.is_nan() || x <= 0.0 {
        return Err(Error::Domain(format!("l(x) needs x > 0, got {x}")));
    }
    if let Some(l) = l_of_log(model, x.ln()) {
        return Ok(l);
    }
    Ok(match *model {
        TailModel::Normal { sd, .. } => {
            let z = x / sd;
            let phi = (-0.5 * z * z).exp() / (2.0 * PI).sqrt();
            sd * sd * (erf(z / std::f64::consts::SQRT_2) - 2.0 * z * phi)
        }
        _ => 2.0 * half_second_moment_quadrature(model, x),
    })
}

/// `ε(x) = x·l′(x)/l(x)`, using `l′(x) = 2x² f(x)` for symmetric laws.
pub fn epsilon_diag(model: &TailModel, x: f64) -> Result<f64> {
    let l = truncated_second_moment(model, x)?;
    if l <= 0.0 {
        return Err(Error::Domain(format!("l({x}) = 0 for {model}")));
    }
    Ok(match *model {
        TailModel::Pareto2 => 1.0 / x.ln(),
        TailModel::LogPow { alpha } => {
            let lx = x.ln();
            alpha * lx.powf(alpha - 1.0) / (lx.powf(alpha) - 1.0)
        }
        _ => 2.0 * x.powi(3) * centered_density(model, x) / l,
    })
}

/// `l(x²)/l(x)`.
pub fn lfun_ratio(model: &TailModel, x: f64) -> Result<f64> {
    let l = truncated_second_moment(model, x)?;
    if l <= 0.0 {
        return Err(Error::Domain(format!("l({x}) = 0 for {model}")));
    }
    let lx = x.ln();
    let l_sq = match (l_of_log(model, 2.0 * lx), l_of_log(model, lx)) {
        (Some(num), Some(den)) => return Ok(num / den),
        _ => truncated_second_moment(model, x * x)?,
    };
    Ok(l_sq / l)
}

pub fn slow_var_diag(model: &TailModel, x: f64) -> Result<SlowVarDiag> {
    Ok(SlowVarDiag {
        x,
        l_of_x: truncated_second_moment(model, x)?,
        eps_of_x: epsilon_diag(model, x)?,
        ratio_l_x2_over_l_x: lfun_ratio(model, x)?,
    })
}

/// Truncation level `η_n = inf{s ≥ b+1 : l(s)/s² ≤ (LL n)⁴/n}`, found by
/// bisection on `[b+1, n²]` to relative tolerance `1e−9`. The returned point
/// satisfies the inequality.
pub fn eta_n(model: &TailModel, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!("η_n needs n ≥ 2, got {n}")));
    }
    let target = guarded_loglog(n as f64).powi(4) / n as f64;
    let below = |s: f64| -> Result<bool> { Ok(truncated_second_moment(model, s)? / (s * s) <= target) };

    let mut lo = model.support_floor() + 1.0;
    let mut hi = (n as f64) * (n as f64);
    if hi <= lo {
        hi = lo;
    }
    if below(lo)? {
        return Ok(lo);
    }
    if !below(hi)? {
        return Err(Error::Numerical(format!(
            "l(s)/s² never drops below {target:e} on [{lo}, {hi}] for {model}"
        )));
    }
    while hi - lo > ETA_REL_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if below(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    const NORMAL: TailModel = TailModel::Normal { mean: 0.0, sd: 1.0 };

    #[test]
    fn empirical_truncated_moment_matches() {
        let m = 1_000_000;
        for model in all_models() {
            let x = model.sample(m, 99).unwrap().into_values();
            let mu = model.mean();
            for cut in [2.0, 10.0, 100.0] {
                let terms: Vec<f64> = x
                    .iter()
                    .map(|v| {
                        let d = v - mu;
                        if d.abs() <= cut { d * d } else { 0.0 }
                    })
                    .collect();
                let mean = terms.iter().sum::<f64>() / m as f64;
                let var = terms.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
                let se = (var / m as f64).sqrt();
                let exact = truncated_second_moment(&model, cut).unwrap();
                assert!(
                    (mean - exact).abs() <= 5.0 * se || (se == 0.0 && exact == 0.0),
                    "{model} x={cut}: {mean} vs {exact} (se {se})"
                );
            }
        }
    }

    fn all_models() -> Vec<TailModel> {
        vec![
            NORMAL,
            TailModel::Normal { mean: 3.0, sd: 2.0 },
            TailModel::Student { df: 3.0 },
            TailModel::Student { df: 7.5 },
            TailModel::Pareto2,
            TailModel::LogPow { alpha: 0.5 },
            TailModel::LogPow { alpha: 2.0 },
        ]
    }

    #[test]
    fn pareto2_l_values() {
        assert!((truncated_second_moment(&TailModel::Pareto2, E).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(truncated_second_moment(&TailModel::Pareto2, 1.0).unwrap(), 0.0);
        assert_eq!(truncated_second_moment(&TailModel::Pareto2, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn normal_l_matches_high_precision() {
        // mpmath quadrature
        let l2 = truncated_second_moment(&NORMAL, 2.0).unwrap();
        assert!((l2 - 0.738_535_870_050_889_4).abs() < 1e-13, "{l2}");
        let l10 = truncated_second_moment(&NORMAL, 10.0).unwrap();
        assert!((l10 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn closed_forms_agree_with_quadrature() {
        for model in all_models() {
            for x in [2.0, 3.5, 10.0, 100.0, 1e4] {
                let closed = truncated_second_moment(&model, x).unwrap();
                let quad = 2.0 * half_second_moment_quadrature(&model, x);
                assert!((closed - quad).abs() < 1e-8 * (1.0 + closed), "{model} x={x}: {closed} vs {quad}");
            }
        }
    }

    #[test]
    fn logpow_l_at_e_cubed() {
        // mpmath: (2c/α)(3^α − 1)
        for (alpha, expect) in [
            (0.5, 25.674_226_347_914_61),
            (1.0, 29.556_224_395_722_6),
            (2.0, 39.408_299_194_296_8),
        ] {
            let l = truncated_second_moment(&TailModel::LogPow { alpha }, 3f64.exp()).unwrap();
            assert!((l - expect).abs() < 1e-10 * expect, "α={alpha}: {l}");
        }
    }

    #[test]
    fn student_variance_limit() {
        // Var t_ν = ν/(ν−2)
        let l = truncated_second_moment(&TailModel::Student { df: 7.5 }, 1e6).unwrap();
        assert!((l - 7.5 / 5.5).abs() < 1e-8);
    }

    #[test]
    fn l_is_monotone() {
        for model in all_models() {
            let mut prev = 0.0;
            for i in 0..100 {
                let x = 0.1 * 1.12f64.powi(i);
                let l = truncated_second_moment(&model, x).unwrap();
                assert!(l >= prev - 1e-12, "{model} x={x}");
                assert!(l >= 0.0);
                prev = l;
            }
        }
    }

    #[test]
    fn pareto2_epsilon() {
        let e = epsilon_diag(&TailModel::Pareto2, E * E).unwrap();
        assert!((e - 0.5).abs() < 1e-15);
        assert!(matches!(epsilon_diag(&TailModel::Pareto2, 1.0), Err(Error::Domain(_))));
        assert!(matches!(
            epsilon_diag(&TailModel::LogPow { alpha: 1.0 }, 2.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn epsilon_matches_central_difference() {
        for model in all_models() {
            for x in [5.0, 20.0, 300.0] {
                let h = 1e-5 * x;
                let lp = truncated_second_moment(&model, x + h).unwrap();
                let lm = truncated_second_moment(&model, x - h).unwrap();
                let l = truncated_second_moment(&model, x).unwrap();
                let fd = x * (lp - lm) / (2.0 * h) / l;
                let an = epsilon_diag(&model, x).unwrap();
                assert!((fd - an).abs() < 1e-5 * (1.0 + an.abs()) + 1e-7, "{model} x={x}: {fd} vs {an}");
            }
        }
    }

    #[test]
    fn normal_epsilon_vanishes() {
        assert!(epsilon_diag(&NORMAL, 10.0).unwrap().abs() < 0.01);
    }

    #[test]
    fn ratios() {
        for x in [1.5, E, 10.0, 1e3, 1e100] {
            assert_eq!(lfun_ratio(&TailModel::Pareto2, x).unwrap(), 2.0);
        }
        let r = lfun_ratio(&NORMAL, 10.0).unwrap();
        assert!((1.0..=1.0001).contains(&r), "{r}");
        // with C₀ = 1 the bound is 2^{C₀} = 2
        assert!(lfun_ratio(&TailModel::Pareto2, 50.0).unwrap() <= 2.0);
    }

    #[test]
    fn logpow_slowly_varying_shape() {
        // l(x)/(log x)^α = (2c/α)(1 − (log x)^{−α}) increases to 2c/α
        let alpha = 2.0;
        let model = TailModel::LogPow { alpha };
        let limit = 2.0 * normalizing_constant(alpha) / alpha;
        let ratio = |lx: f64| {
            let x = lx.exp();
            2.0 * half_second_moment_quadrature(&model, x) / lx.powf(alpha)
        };
        let (r10, r20) = (ratio(10.0), ratio(20.0));
        assert!(r10 > 0.0 && r10 < r20 && r20 < limit);
        assert!((r20 - r10).abs() / r20 < 0.01);
        for alpha in [0.5, 1.0] {
            let m = TailModel::LogPow { alpha };
            let lim = 2.0 * normalizing_constant(alpha) / alpha;
            let at = |lx: f64| truncated_second_moment(&m, lx.exp()).unwrap() / lx.powf(alpha);
            assert!(at(10.0) < at(20.0) && at(20.0) < at(200.0) && at(200.0) < lim);
        }
    }

    #[test]
    fn slow_var_struct() {
        let d = slow_var_diag(&TailModel::Pareto2, 100.0).unwrap();
        assert!((d.l_of_x - 2.0 * 100f64.ln()).abs() < 1e-12);
        assert!((d.eps_of_x * 100f64.ln() - 1.0).abs() < 1e-12);
        assert_eq!(d.ratio_l_x2_over_l_x, 2.0);
    }

    /// Plain bisection on `2 log s / s² = r`, written out separately.
    fn pareto_eta_oracle(n: f64) -> f64 {
        let ll = n.ln().ln().max(1.0);
        let r = ll.powi(4) / n;
        let (mut lo, mut hi) = (2.0f64, n * n);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if 2.0 * mid.ln() / (mid * mid) > r {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }

    #[test]
    fn eta_pareto2() {
        let eta = eta_n(&TailModel::Pareto2, 1_000_000).unwrap();
        // mpmath findroot: 512.3312944807657
        assert!((eta - 512.331_294_480_765_7).abs() < 1e-9 * eta * 2.0);
        assert!((eta - pareto_eta_oracle(1e6)).abs() < 2e-9 * eta);
    }

    #[test]
    fn eta_defining_property_and_monotone() {
        for model in all_models() {
            let mut prev = 0.0;
            for n in [1_000usize, 10_000, 100_000, 1_000_000] {
                let eta = eta_n(&model, n).unwrap();
                let target = guarded_loglog(n as f64).powi(4) / n as f64;
                let g = |s: f64| truncated_second_moment(&model, s).unwrap() / (s * s);
                assert!(g(eta) <= target, "{model} n={n}");
                let tol = 2.0 * ETA_REL_TOL * eta;
                if eta - tol > model.support_floor() + 1.0 {
                    assert!(g(eta - tol) > target, "{model} n={n}");
                }
                assert!(eta >= prev, "{model} n={n}");
                prev = eta;
            }
        }
    }
}
