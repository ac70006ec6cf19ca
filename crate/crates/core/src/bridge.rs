// SPDX-License-Identifier: MIT OR Apache-2.0

//! Brownian bridge paths and the two sup functionals whose laws the scan
//! statistics approach:
//!
//! - `sup_{0<t<1} |B(t)|/q(t)`, the limit of the weighted sup-norm statistic;
//! - `sup_{1/T ≤ t ≤ 1−1/T} B(t)/√(t(1−t))`, which after `a(T)·sup − b(T)`
//!   tends to the Gumbel law `exp(−e^{−t})`.
//!
//! Both are dominated by the path near the endpoints, so grids are refined
//! geometrically towards 0 and 1. Paths are exact at grid points: Gaussian
//! increments of a Wiener path `W`, then `B(t) = W(t) − t·W(1)`.
//!
//! Grid maxima are below the continuous supremum. The bias is studied
//! empirically with [`refinement_study`], not corrected.

use crate::limit::{q_weight_unchecked, NormConstants};
use crate::rng::{replication_rng, seeded_rng, GENERATOR};
use crate::summary::{quantile_rows, QuantileRow};
use crate::{Error, Result};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

pub const DEFAULT_POINTS_PER_OCTAVE: usize = 64;

/// Sorted times `0 = t_0 < … < t_m = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct BridgeGrid {
    times: Vec<f64>,
    step_sd: Vec<f64>,
}

impl BridgeGrid {
    fn from_times(mut times: Vec<f64>) -> Self {
        times.push(0.0);
        times.push(1.0);
        times.retain(|t| (0.0..=1.0).contains(t));
        times.sort_by(f64::total_cmp);
        times.dedup();
        let step_sd = times.windows(2).map(|w| (w[1] - w[0]).sqrt()).collect();
        Self { times, step_sd }
    }

    /// Uniform grid `i/grid_size` plus `refine_factor` dyadic points
    /// `2^{−j}/grid_size` next to each endpoint.
    pub fn uniform_dyadic(grid_size: usize, refine_factor: usize) -> Result<Self> {
        if grid_size < 2 {
            return Err(Error::Usage(format!("grid size must be ≥ 2, got {grid_size}")));
        }
        let g = grid_size as f64;
        let mut times: Vec<f64> = (1..grid_size).map(|i| i as f64 / g).collect();
        for j in 1..=refine_factor.min(1000) {
            let t = 0.5f64.powi(j as i32) / g;
            times.push(t);
            times.push(1.0 - t);
        }
        Ok(Self::from_times(times))
    }

    /// Uniform grid plus a geometric sequence from `t_min` up to `1/2` with
    /// `points_per_octave` points per factor of two, mirrored at `1/2`.
    pub fn endpoint_refined(grid_size: usize, t_min: f64, points_per_octave: usize) -> Result<Self> {
        if grid_size < 2 {
            return Err(Error::Usage(format!("grid size must be ≥ 2, got {grid_size}")));
        }
        if !(t_min > 0.0 && t_min < 0.5) {
            return Err(Error::Domain(format!("refinement floor must lie in (0, 1/2), got {t_min}")));
        }
        if points_per_octave == 0 {
            return Err(Error::Usage("points per octave must be ≥ 1".into()));
        }
        let g = grid_size as f64;
        let mut times: Vec<f64> = (1..grid_size).map(|i| i as f64 / g).collect();
        let ratio = 2f64.powf(1.0 / points_per_octave as f64);
        let octaves = (0.5 / t_min).log2();
        let steps = (octaves * points_per_octave as f64).ceil() as i32;
        for i in 0..=steps {
            let t = (t_min * ratio.powi(i)).min(0.5);
            times.push(t);
            times.push(1.0 - t);
        }
        Ok(Self::from_times(times))
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Fills `out` (same length as the grid) with one bridge path.
    pub fn fill_path<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.times.len());
        out[0] = 0.0;
        let mut w = 0.0;
        for (i, sd) in self.step_sd.iter().enumerate() {
            let z: f64 = rng.sample(StandardNormal);
            w += sd * z;
            out[i + 1] = w;
        }
        let w1 = w;
        for (b, &t) in out.iter_mut().zip(&self.times) {
            *b -= t * w1;
        }
        let last = out.len() - 1;
        out[last] = 0.0;
    }
}

/// A bridge sampled on a grid; `values[0] = values[last] = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct BridgePath {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl BridgePath {
    pub fn sample<R: Rng + ?Sized>(grid: &BridgeGrid, rng: &mut R) -> Self {
        let mut values = vec![0.0; grid.len()];
        grid.fill_path(rng, &mut values);
        Self {
            grid: grid.times.clone(),
            values,
        }
    }

    /// The path at the grid points it shares with `grid`.
    pub fn restrict(&self, grid: &BridgeGrid) -> Option<BridgePath> {
        let mut values = Vec::with_capacity(grid.len());
        for &t in grid.times() {
            let i = self.grid.binary_search_by(|s| s.total_cmp(&t)).ok()?;
            values.push(self.values[i]);
        }
        Some(BridgePath {
            grid: grid.times.clone(),
            values,
        })
    }
}

/// Bridge on the uniform-plus-dyadic grid, seeded.
pub fn simulate_bridge(grid_size: usize, refine_factor: usize, seed: u64) -> Result<BridgePath> {
    let grid = BridgeGrid::uniform_dyadic(grid_size, refine_factor)?;
    Ok(BridgePath::sample(&grid, &mut seeded_rng(seed)))
}

fn weighted_sup(times: &[f64], values: &[f64]) -> f64 {
    times
        .iter()
        .zip(values)
        .filter(|(&t, _)| t > 0.0 && t < 1.0)
        .map(|(&t, &b)| b.abs() / q_weight_unchecked(t))
        .fold(0.0, f64::max)
}

fn de_sup(times: &[f64], values: &[f64], horizon: f64) -> f64 {
    let floor = (1.0 / horizon) * (1.0 - 1e-12);
    times
        .iter()
        .zip(values)
        .filter(|(&t, _)| t >= floor && 1.0 - t >= floor)
        .map(|(&t, &b)| b / (t * (1.0 - t)).sqrt())
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `max |B(t)|/q(t)` over interior grid points.
pub fn weighted_sup_functional(path: &BridgePath) -> f64 {
    weighted_sup(&path.grid, &path.values)
}

/// `max B(t)/√(t(1−t))` over grid points in `[1/T, 1−1/T]`.
pub fn de_sup_functional(path: &BridgePath, horizon: f64) -> f64 {
    de_sup(&path.grid, &path.values, horizon)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BridgeFunctional {
    WeightedSupQ,
    DarlingErdos,
}

impl BridgeFunctional {
    pub fn evaluate(self, path: &BridgePath, horizon: f64) -> f64 {
        match self {
            BridgeFunctional::WeightedSupQ => weighted_sup_functional(path),
            BridgeFunctional::DarlingErdos => de_sup_functional(path, horizon),
        }
    }

    fn evaluate_raw(self, times: &[f64], values: &[f64], horizon: f64) -> f64 {
        match self {
            BridgeFunctional::WeightedSupQ => weighted_sup(times, values),
            BridgeFunctional::DarlingErdos => de_sup(times, values, horizon),
        }
    }
}

impl fmt::Display for BridgeFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BridgeFunctional::WeightedSupQ => "weighted_sup_q",
            BridgeFunctional::DarlingErdos => "darling_erdos",
        })
    }
}

impl FromStr for BridgeFunctional {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weighted_sup_q" => Ok(BridgeFunctional::WeightedSupQ),
            "darling_erdos" => Ok(BridgeFunctional::DarlingErdos),
            other => Err(Error::Usage(format!(
                "unknown functional {other:?}; expected weighted_sup_q|darling_erdos"
            ))),
        }
    }
}

/// Monte Carlo setup for a limit functional.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitConfig {
    pub functional: BridgeFunctional,
    pub reps: usize,
    pub grid_size: usize,
    /// `T`: the grid is refined down to `1/T` and, for the Darling–Erdős
    /// functional, the supremum runs over `[1/T, 1−1/T]`.
    pub horizon: f64,
    pub points_per_octave: usize,
    pub seed: u64,
}

impl LimitConfig {
    pub fn new(functional: BridgeFunctional, reps: usize, grid_size: usize, horizon: f64, seed: u64) -> Self {
        Self {
            functional,
            reps,
            grid_size,
            horizon,
            points_per_octave: DEFAULT_POINTS_PER_OCTAVE,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.reps < 100 {
            return Err(Error::Usage(format!("limit simulations need reps ≥ 100, got {}", self.reps)));
        }
        let min_horizon = match self.functional {
            BridgeFunctional::DarlingErdos => 10.0,
            BridgeFunctional::WeightedSupQ => 2.0 + f64::EPSILON,
        };
        if !(self.horizon >= min_horizon && self.horizon.is_finite()) {
            return Err(Error::Usage(format!(
                "horizon must be ≥ {min_horizon} for {}, got {}",
                self.functional, self.horizon
            )));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<BridgeGrid> {
        BridgeGrid::endpoint_refined(self.grid_size, 1.0 / self.horizon, self.points_per_octave)
    }
}

/// Functional values of `reps` independent paths, in replication order.
///
/// Path `r` uses ChaCha stream `r`, so the output does not depend on the
/// number of worker threads.
pub fn simulate_functional(cfg: &LimitConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    Ok(simulate_on(&grid, cfg, |times, values| {
        vec![cfg.functional.evaluate_raw(times, values, cfg.horizon)]
    })
    .into_iter()
    .map(|v| v[0])
    .collect())
}

fn simulate_on<F>(grid: &BridgeGrid, cfg: &LimitConfig, eval: F) -> Vec<Vec<f64>>
where
    F: Fn(&[f64], &[f64]) -> Vec<f64> + Sync,
{
    (0..cfg.reps as u64)
        .into_par_iter()
        .map_init(
            || vec![0.0; grid.len()],
            |buf, r| {
                let mut rng = replication_rng(cfg.seed, r);
                grid.fill_path(&mut rng, buf);
                eval(grid.times(), buf)
            },
        )
        .collect()
}

/// Monte Carlo quantiles of a limit functional.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitQuantiles {
    pub config: LimitConfig,
    pub quantiles: Vec<QuantileRow>,
}

impl LimitQuantiles {
    /// CSV `prob,value` with `#`-prefixed metadata lines.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let c = &self.config;
        writeln!(w, "# functional={}", c.functional)?;
        writeln!(w, "# reps={}", c.reps)?;
        writeln!(w, "# grid={}", c.grid_size)?;
        writeln!(w, "# horizon={}", c.horizon)?;
        writeln!(w, "# points_per_octave={}", c.points_per_octave)?;
        writeln!(w, "# seed={}", c.seed)?;
        writeln!(w, "# generator={GENERATOR}")?;
        writeln!(w, "prob,value")?;
        for row in &self.quantiles {
            writeln!(w, "{},{}", row.prob, row.value)?;
        }
        Ok(())
    }
}

pub fn limit_quantiles(cfg: &LimitConfig, probs: &[f64]) -> Result<LimitQuantiles> {
    check_probs(probs)?;
    let values = simulate_functional(cfg)?;
    Ok(LimitQuantiles {
        config: cfg.clone(),
        quantiles: quantile_rows(&values, probs),
    })
}

pub(crate) fn check_probs(probs: &[f64]) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::Usage("at least one probability is required".into()));
    }
    match probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        Some(p) => Err(Error::Usage(format!("probabilities must lie in [0, 1], got {p}"))),
        None => Ok(()),
    }
}

/// `a(T)·sup − b(T)` for Darling–Erdős functional values.
pub fn normalize_de(values: &[f64], horizon: f64) -> Vec<f64> {
    let c = NormConstants::new(horizon);
    values.iter().map(|&v| c.normalize(v)).collect()
}

/// Paired functional values on a grid and on the grid with twice the uniform
/// resolution, from the same paths.
#[derive(Clone, Debug, PartialEq)]
pub struct RefinementStudy {
    pub coarse: Vec<f64>,
    pub fine: Vec<f64>,
}

/// Simulates on the `2·grid_size` grid and also evaluates each path on its
/// `grid_size` subgrid, so the difference isolates discretization error.
pub fn refinement_study(cfg: &LimitConfig) -> Result<RefinementStudy> {
    cfg.validate()?;
    let coarse_grid = cfg.grid()?;
    let fine_cfg = LimitConfig {
        grid_size: 2 * cfg.grid_size,
        ..cfg.clone()
    };
    let fine_grid = fine_cfg.grid()?;
    let index: Vec<usize> = coarse_grid
        .times()
        .iter()
        .map(|t| {
            fine_grid
                .times()
                .binary_search_by(|s| s.total_cmp(t))
                .map_err(|_| Error::Numerical(format!("coarse grid point {t} missing from fine grid")))
        })
        .collect::<Result<_>>()?;
    let pairs = simulate_on(&fine_grid, &fine_cfg, |times, values| {
        let sub_t: Vec<f64> = index.iter().map(|&i| times[i]).collect();
        let sub_v: Vec<f64> = index.iter().map(|&i| values[i]).collect();
        vec![
            cfg.functional.evaluate_raw(&sub_t, &sub_v, cfg.horizon),
            cfg.functional.evaluate_raw(times, values, cfg.horizon),
        ]
    });
    Ok(RefinementStudy {
        coarse: pairs.iter().map(|p| p[0]).collect(),
        fine: pairs.iter().map(|p| p[1]).collect(),
    })
}
