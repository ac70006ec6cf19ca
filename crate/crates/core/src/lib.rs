// SPDX-License-Identifier: MIT OR Apache-2.0

//! Offline detection of a single change in the mean, using self-normalized
//! Darling–Erdős maxima with Gumbel calibration.
//!
//! The crate is split into:
//!
//! - [`stats`]: prefix sums and the O(n) scan statistics (`Γ_n(k)`,
//!   `σ̂`-normalized, `T_{k,n}`, weighted sup-norm).
//! - [`limit`]: normalizing constants `a(n)`, `b(n)`, the one- and two-sided
//!   Gumbel laws and the `q(t)` weight.
//! - [`models`]: seeded samplers for laws in the domain of attraction of the
//!   normal law, with truncated-second-moment diagnostics.
//! - [`bridge`]: Brownian bridge paths and their limit functionals.
//! - [`harness`]: reproducible Monte Carlo experiments.
//! - [`cli`]: file ingestion and report types behind the `amoc` binary.

#![forbid(unsafe_code)]

pub mod bridge;
pub mod cli;
mod error;
pub mod harness;
pub mod limit;
pub mod models;
pub mod rng;
mod serde_f64;
pub mod stats;
pub mod summary;

pub use error::{Error, Result};
pub use limit::{GumbelLaw, NormConstants, Sides};
pub use stats::{PrefixSums, Sample, ScanResult, StatKind};

/// Version string echoed into every report.
pub const TOOL_VERSION: &str = concat!("amoc ", env!("CARGO_PKG_VERSION"));
