// SPDX-License-Identifier: MIT OR Apache-2.0

use super::check_finite;
use crate::{Error, Result};

/// Cumulative sums `S_0..S_n` and cumulative squares `V_0..V_n`.
///
/// Both sequences are accumulated with Neumaier compensation. The
/// statistics are computed from a second pair of sequences built from the
/// observations minus their mean, so that a large common offset does not
/// cancel away the digits of `V_k − S_k²/k`. Segment sums of squares are
/// clamped at zero.
#[derive(Clone, Debug, PartialEq)]
pub struct PrefixSums {
    s: Vec<f64>,
    v: Vec<f64>,
    cs: Vec<f64>,
    cv: Vec<f64>,
    constant: bool,
}

const ROUNDING_FLOOR: f64 = 1e-14;

#[derive(Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

fn accumulate(values: impl ExactSizeIterator<Item = f64>) -> (Vec<f64>, Vec<f64>) {
    let mut s = Vec::with_capacity(values.len() + 1);
    let mut v = Vec::with_capacity(values.len() + 1);
    s.push(0.0);
    v.push(0.0);
    let (mut acc_s, mut acc_v) = (Neumaier::default(), Neumaier::default());
    for x in values {
        acc_s.add(x);
        acc_v.add(x * x);
        s.push(acc_s.value());
        v.push(acc_v.value());
    }
    (s, v)
}

impl PrefixSums {
    pub fn new(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidData("empty sample (n = 0)".into()));
        }
        check_finite(values)?;

        let (s, v) = accumulate(values.iter().copied());
        let shift = s[values.len()] / values.len() as f64;
        let (cs, cv) = accumulate(values.iter().map(|&x| x - shift));
        let constant = values.iter().all(|&x| x == values[0]);
        Ok(Self { s, v, cs, cv, constant })
    }

    pub fn n(&self) -> usize {
        self.s.len() - 1
    }

    /// `S_0..S_n`.
    pub fn sums(&self) -> &[f64] {
        &self.s
    }

    /// `V_0..V_n`.
    pub fn squares(&self) -> &[f64] {
        &self.v
    }

    /// True when all observations are identical.
    pub fn is_constant(&self) -> bool {
        self.constant
    }

    /// Sum of squared deviations about the segment mean for `X_{lo+1..=hi}`.
    ///
    /// Values below the rounding resolution of `V_hi − V_lo` are reported as
    /// exactly zero, so constant segments stay degenerate.
    pub fn segment_ss(&self, lo: usize, hi: usize) -> f64 {
        debug_assert!(lo < hi && hi <= self.n());
        if hi - lo == 1 {
            return 0.0;
        }
        let len = (hi - lo) as f64;
        let sum = self.cs[hi] - self.cs[lo];
        let sq = self.cv[hi] - self.cv[lo];
        let raw = sq - sum * sum / len;
        debug_assert!(
            raw >= -1e-9 * self.cv[self.n()].max(f64::MIN_POSITIVE),
            "segment sum of squares {raw} far below zero"
        );
        if raw <= ROUNDING_FLOOR * sq {
            0.0
        } else {
            raw
        }
    }

    /// Difference of the means before and after `k`.
    fn mean_gap(&self, k: usize) -> f64 {
        let n = self.n();
        self.cs[k] / k as f64 - (self.cs[n] - self.cs[k]) / (n - k) as f64
    }

    /// `Z_n` at the integer index `j = ⌊(n+1)t⌋`.
    pub(crate) fn z_at(&self, j: usize) -> f64 {
        let n = self.n();
        let nf = n as f64;
        (self.cs[j] - j as f64 * self.cs[n] / nf) / nf.sqrt()
    }

    /// Standardized mean difference `Γ_n(k)`, `1 ≤ k < n`.
    pub fn gamma(&self, k: usize) -> Result<f64> {
        let n = self.n();
        if k < 1 || k >= n {
            return Err(Error::index(k, 1, n.saturating_sub(1)));
        }
        let frac = k as f64 / n as f64;
        Ok((n as f64 * frac * (1.0 - frac)).sqrt() * self.mean_gap(k))
    }

    /// Pooled variance `σ̂²_{k,n}` for `1 ≤ k ≤ n`; `k = n` is the plain
    /// (biased) sample variance.
    pub fn sigma_hat_sq(&self, k: usize) -> Result<f64> {
        let n = self.n();
        if k < 1 || k > n {
            return Err(Error::index(k, 1, n));
        }
        let ss = if k == n {
            self.segment_ss(0, n)
        } else {
            self.segment_ss(0, k) + self.segment_ss(k, n)
        };
        Ok(ss / n as f64)
    }

    /// `σ̃²_{k,n}`, the variance of the mean difference built from the two
    /// unbiased segment variances, `2 ≤ k ≤ n−2`.
    pub fn sigma_tilde_sq(&self, k: usize) -> Result<f64> {
        let n = self.n();
        if n < 4 || k < 2 || k > n - 2 {
            return Err(Error::index(k, 2, n.saturating_sub(2)));
        }
        let (kf, rf) = (k as f64, (n - k) as f64);
        Ok(self.segment_ss(0, k) / (kf * (kf - 1.0)) + self.segment_ss(k, n) / (rf * (rf - 1.0)))
    }

    /// The self-normalized two-sample statistic `T_{k,n}`, `2 ≤ k ≤ n−2`.
    ///
    /// A zero denominator gives `0` for a zero numerator and a signed
    /// infinity otherwise.
    pub fn t_stat(&self, k: usize) -> Result<f64> {
        let var = self.sigma_tilde_sq(k)?;
        Ok(self_normalize(self.mean_gap(k), var))
    }

    /// `σ̂`-normalized statistic `(1/σ̂_{k,n})·(n²/(k(n−k)))^{1/2}·Z_n(k/(n+1))`,
    /// `1 ≤ k < n`.
    pub fn hat_stat(&self, k: usize) -> Result<f64> {
        let n = self.n();
        if k < 1 || k >= n {
            return Err(Error::index(k, 1, n.saturating_sub(1)));
        }
        let var = self.sigma_hat_sq(k)?;
        let nf = n as f64;
        let scale = nf / (k as f64 * (n - k) as f64).sqrt();
        Ok(self_normalize(scale * self.z_at(k), var))
    }

    /// Tied-down partial sum process `Z_n(t)`, `0 ≤ t ≤ 1`.
    pub fn z(&self, t: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Domain(format!("Z_n(t) needs 0 ≤ t ≤ 1, got {t}")));
        }
        if t == 1.0 {
            return Ok(0.0);
        }
        let n = self.n();
        Ok(self.z_at(floor_scaled(n + 1, t).min(n)))
    }
}

fn self_normalize(numerator: f64, variance: f64) -> f64 {
    if variance > 0.0 {
        numerator / variance.sqrt()
    } else if numerator == 0.0 {
        0.0
    } else {
        numerator.signum() * f64::INFINITY
    }
}

/// `⌊m·t⌋`, snapping products that land within rounding error of an integer.
///
/// `t = k/(n+1)` computed in floating point can multiply back to `k − ε`.
pub(crate) fn floor_scaled(m: usize, t: f64) -> usize {
    let x = m as f64 * t;
    let r = x.round();
    let j = if (x - r).abs() <= 8.0 * f64::EPSILON * x.max(1.0) {
        r
    } else {
        x.floor()
    };
    j.max(0.0) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(v: &[f64]) -> PrefixSums {
        PrefixSums::new(v).unwrap()
    }

    #[test]
    fn small_prefix_sums() {
        let p = ps(&[1.0, 2.0, 3.0]);
        assert_eq!(p.sums(), &[0.0, 1.0, 3.0, 6.0]);
        assert_eq!(p.squares(), &[0.0, 1.0, 5.0, 14.0]);
    }

    #[test]
    fn empty_is_invalid() {
        assert!(matches!(PrefixSums::new(&[]), Err(Error::InvalidData(_))));
    }

    #[test]
    fn non_finite_is_invalid() {
        assert!(matches!(
            PrefixSums::new(&[1.0, f64::NEG_INFINITY]),
            Err(Error::InvalidData(_))
        ));
    }

    #[test]
    fn constant_series() {
        let c = 2.5;
        let p = ps(&[c; 9]);
        for k in 0..=9 {
            assert_eq!(p.sums()[k], k as f64 * c);
            assert_eq!(p.squares()[k], k as f64 * c * c);
        }
        assert!(p.is_constant());
    }

    #[test]
    fn compensation_keeps_small_terms() {
        let mut v = vec![1e16];
        v.extend(std::iter::repeat_n(1.0, 1000));
        let p = ps(&v);
        assert_eq!(p.sums()[1001], 1e16 + 1000.0);
    }

    #[test]
    fn gamma_examples() {
        let p = ps(&[0.0, 0.0, 1.0, 1.0]);
        assert!((p.gamma(2).unwrap() + 1.0).abs() < 1e-15);
        let c = ps(&[3.0; 6]);
        for k in 1..6 {
            assert_eq!(c.gamma(k).unwrap(), 0.0);
        }
        assert!(matches!(p.gamma(0), Err(Error::Index { .. })));
        assert!(matches!(p.gamma(4), Err(Error::Index { .. })));
    }

    #[test]
    fn sigma_hat_examples() {
        let p = ps(&[0.0, 2.0, 1.0, 3.0]);
        assert!((p.sigma_hat_sq(2).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(ps(&[0.0, 0.0, 1.0, 1.0]).sigma_hat_sq(2).unwrap(), 0.0);
        // k = n: plain variance of {0,2,1,3} about 1.5 is 5/4
        assert!((p.sigma_hat_sq(4).unwrap() - 1.25).abs() < 1e-15);
        assert!(p.sigma_hat_sq(0).is_err());
        assert!(p.sigma_hat_sq(5).is_err());
    }

    #[test]
    fn sigma_hat_location_shift() {
        let x = [0.3, -1.2, 2.2, 0.7, 1.1];
        let y: Vec<f64> = x.iter().map(|v| v + 4.0).collect();
        let (p, q) = (ps(&x), ps(&y));
        for k in 1..=5 {
            let (a, b) = (p.sigma_hat_sq(k).unwrap(), q.sigma_hat_sq(k).unwrap());
            assert!((a - b).abs() < 1e-12, "k={k}: {a} vs {b}");
        }
    }

    #[test]
    fn sigma_tilde_examples() {
        let p = ps(&[0.0, 2.0, 1.0, 3.0]);
        assert!((p.sigma_tilde_sq(2).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(ps(&[1.0; 8]).sigma_tilde_sq(4).unwrap(), 0.0);
        assert!(matches!(p.sigma_tilde_sq(1), Err(Error::Index { .. })));
        assert!(matches!(p.sigma_tilde_sq(3), Err(Error::Index { .. })));
        assert!(ps(&[1.0, 2.0, 3.0]).sigma_tilde_sq(2).is_err());
    }

    #[test]
    fn t_stat_examples() {
        let p = ps(&[0.0, 2.0, 1.0, 3.0]);
        let t = p.t_stat(2).unwrap();
        assert!((t + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn t_stat_degenerate_denominator() {
        // perfect level shift between two constant segments
        let p = ps(&[0.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        assert_eq!(p.t_stat(3).unwrap(), f64::NEG_INFINITY);
        let q = ps(&[1.0, 1.0, 1.0, 0.0, 0.0, 0.0]);
        assert_eq!(q.t_stat(3).unwrap(), f64::INFINITY);
        assert_eq!(ps(&[2.0; 6]).t_stat(3).unwrap(), 0.0);
    }

    #[test]
    fn hat_stat_example() {
        let p = ps(&[0.0, 2.0, 1.0, 3.0]);
        assert!((p.z(0.4).unwrap() + 0.5).abs() < 1e-15);
        assert!((p.hat_stat(2).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn z_examples() {
        let p = ps(&[1.0, 3.0]);
        assert_eq!(p.z(1.0).unwrap(), 0.0);
        let z = p.z(1.0 / 3.0).unwrap();
        assert!((z + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        let q = ps(&[0.5, -1.0, 4.0, 2.0, 7.0]);
        assert_eq!(q.z(0.0).unwrap(), 0.0);
        assert_eq!(q.z(1.0 / 6.0 - 1e-9).unwrap(), 0.0);
        assert!(matches!(q.z(1.5), Err(Error::Domain(_))));
        assert!(matches!(q.z(-0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn z_at_rational_points_snaps() {
        let n = 97;
        let data: Vec<f64> = (0..n).map(|i| ((i * 37) % 11) as f64).collect();
        let p = ps(&data);
        for k in 0..n {
            let t = k as f64 / (n + 1) as f64;
            assert_eq!(p.z(t).unwrap(), p.z_at(k), "k={k}");
        }
    }

    #[test]
    fn floor_scaled_basic() {
        assert_eq!(floor_scaled(10, 0.35), 3);
        assert_eq!(floor_scaled(3, 1.0 / 3.0), 1);
        assert_eq!(floor_scaled(49, 48.0 / 49.0), 48);
        assert_eq!(floor_scaled(7, 0.0), 0);
    }
}
