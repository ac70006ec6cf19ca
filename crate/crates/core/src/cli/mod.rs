// SPDX-License-Identifier: MIT OR Apache-2.0

//! Command-line front end: argument definitions and command execution for
//! the `amoc` binary.
//!
//! Exit codes: 0 retain (or success), 1 reject, 2 usage, 3 data, 4 numerical.

mod input;
mod report;

pub use input::{parse_series, read_series, SeriesFile};
pub use report::{Decision, TestReport};

use crate::bridge::{limit_quantiles, BridgeFunctional, LimitConfig, DEFAULT_POINTS_PER_OCTAVE};
use crate::harness::{
    calibrate, compare_normalizers, read_raw_csv, run_null, run_power, write_raw_csv, ExperimentConfig,
    REPORT_SCHEMA,
};
use crate::limit::Sides;
use crate::models::TailModel;
use crate::stats::{scan, StatKind};
use crate::{Error, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(name = "amoc", version, about = "Self-normalized tests for at most one change in the mean")]
pub struct Cli {
    /// Worker threads for Monte Carlo commands (results do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test a series for a single change in the mean.
    Test(TestArgs),
    /// Null Monte Carlo: per-replication maxima as `rep,value` CSV.
    Simulate(SimulateArgs),
    /// Finite-sample critical values of the raw maximum.
    Calibrate(CalibrateArgs),
    /// Rejection rate and localization under a mean shift.
    Power(PowerArgs),
    /// Quantiles of a Brownian bridge limit functional.
    Limit(LimitArgs),
    /// Paired σ̂- and σ̃-normalized maxima on the same samples.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct SidesArgs {
    /// Maximize |T| (default).
    #[arg(long, conflicts_with = "one_sided")]
    pub two_sided: bool,
    /// Maximize T itself.
    #[arg(long)]
    pub one_sided: bool,
}

impl SidesArgs {
    pub fn sides(&self) -> Sides {
        if self.one_sided {
            Sides::One
        } else {
            Sides::Two
        }
    }
}

#[derive(Debug, Args)]
pub struct TestArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// 1-based CSV column.
    #[arg(long)]
    pub column: Option<usize>,
    #[arg(long, default_value = "tkn")]
    pub stat: StatKind,
    #[command(flatten)]
    pub sides: SidesArgs,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// `rep,value` dump of null maxima (from `amoc simulate`).
    #[arg(long)]
    pub calibration: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// normal:MEAN,SD | student:DF | pareto2 | logpow:ALPHA
    #[arg(long)]
    pub model: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub reps: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value = "tkn")]
    pub stat: StatKind,
    #[command(flatten)]
    pub sides: SidesArgs,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
}

impl ExperimentArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let model: TailModel = self.model.parse()?;
        let cfg = ExperimentConfig {
            stat_kind: self.stat,
            sides: self.sides.sides(),
            alpha: self.alpha,
            ..ExperimentConfig::new(model, self.n, self.reps, self.seed)
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub experiment: ExperimentArgs,
    /// `rep,value` CSV destination (stdout if absent).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Also write the JSON experiment report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Include per-replication values in the JSON report.
    #[arg(long)]
    pub per_rep: bool,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[command(flatten)]
    pub experiment: ExperimentArgs,
    #[arg(long, value_delimiter = ',', required = true)]
    pub probs: Vec<f64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PowerArgs {
    #[command(flatten)]
    pub experiment: ExperimentArgs,
    /// Shift starts after observation ⌊kstar_frac·n⌋.
    #[arg(long)]
    pub kstar_frac: f64,
    #[arg(long)]
    pub delta: f64,
    /// Raw-maximum threshold, e.g. a value from `amoc calibrate`.
    #[arg(long)]
    pub calibrated_threshold: Option<f64>,
    /// JSON report destination (stdout if absent).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Also write `rep,value` raw maxima here.
    #[arg(long)]
    pub raw: Option<PathBuf>,
    #[arg(long)]
    pub per_rep: bool,
}

#[derive(Debug, Args)]
pub struct LimitArgs {
    #[arg(long)]
    pub functional: BridgeFunctional,
    #[arg(long)]
    pub reps: usize,
    /// Uniform grid size; endpoint refinement is added on top.
    #[arg(long)]
    pub grid: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_delimiter = ',', required = true)]
    pub probs: Vec<f64>,
    /// T: refinement floor 1/T, and the Darling–Erdős range [1/T, 1−1/T].
    #[arg(long, default_value_t = 1e6)]
    pub horizon: f64,
    #[arg(long, default_value_t = DEFAULT_POINTS_PER_OCTAVE)]
    pub points_per_octave: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub model: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub reps: usize,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub sides: SidesArgs,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command, returning
/// the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: Cli) -> Result<i32> {
    match cli.threads {
        Some(0) => Err(Error::Usage("--threads must be at least 1".into())),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Usage(e.to_string()))?
            .install(|| dispatch(cli.command)),
        None => dispatch(cli.command),
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Test(a) => {
            let report = cmd_test(&a)?;
            emit_json(a.output.as_deref(), &report)?;
            eprintln!(
                "amoc test: {} (p = {})",
                report.decision,
                report.operative_p().unwrap_or(f64::NAN)
            );
            Ok(report.decision.exit_code())
        }
        Command::Simulate(a) => cmd_simulate(&a).map(|_| 0),
        Command::Calibrate(a) => cmd_calibrate(&a).map(|_| 0),
        Command::Power(a) => cmd_power(&a).map(|_| 0),
        Command::Limit(a) => cmd_limit(&a).map(|_| 0),
        Command::Compare(a) => cmd_compare(&a).map(|_| 0),
    }
}

fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
        }
    }
    Ok(())
}

fn emit_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    emit(path, s.as_bytes())
}

/// Gamma and weighted maxima are always over absolute values.
fn effective_sides(kind: StatKind, sides: Sides) -> Sides {
    match kind {
        StatKind::Gamma | StatKind::Weighted => Sides::Two,
        StatKind::Hat | StatKind::Tkn => sides,
    }
}

/// Runs the selected scan on the input file.
pub fn cmd_test(a: &TestArgs) -> Result<TestReport> {
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        return Err(Error::Usage(format!("--alpha must lie in (0, 1), got {}", a.alpha)));
    }
    if a.calibration.is_none() && !a.stat.has_gumbel_limit() {
        return Err(Error::Usage(format!(
            "--stat {} has no asymptotic law; pass --calibration",
            a.stat
        )));
    }
    let series = read_series(&a.input, a.column)?;
    let n = series.sample.len();
    let min_n = if a.stat == StatKind::Tkn { 4 } else { 2 };
    if n < min_n {
        return Err(Error::Usage(format!("--stat {} needs at least {min_n} observations, got {n}", a.stat)));
    }
    let sides = effective_sides(a.stat, a.sides.sides());
    let calibration = a
        .calibration
        .as_deref()
        .map(|p| load_calibration(p, n, a.stat, sides))
        .transpose()?;
    let result = scan(&series.sample.prefix_sums()?, a.stat, sides)?;
    let p_calibrated = calibration.as_ref().map(|null| {
        let hits = null.iter().filter(|&&v| v >= result.max_value).count();
        (1 + hits) as f64 / (null.len() + 1) as f64
    });
    let p_asymptotic = result.p_value();
    let p = p_calibrated
        .or(p_asymptotic)
        .ok_or_else(|| Error::Numerical("no p-value available".into()))?;
    let report = TestReport {
        schema: REPORT_SCHEMA,
        tool_version: crate::TOOL_VERSION.into(),
        input: a.input.display().to_string(),
        input_fingerprint: series.fingerprint,
        n,
        stat_kind: a.stat,
        sides,
        max_value: result.max_value,
        argmax_k: result.argmax_k,
        a_n: result.constants.map(|c| c.a_n),
        b_n: result.constants.map(|c| c.b_n),
        normalized: result.normalized,
        p_asymptotic,
        p_calibrated,
        calibration_reps: calibration.map(|c| c.len()),
        alpha: a.alpha,
        decision: if p < a.alpha { Decision::Reject } else { Decision::Retain },
    };
    report.validate()?;
    Ok(report)
}

/// Reads a `rep,value` dump and checks its `# n=`, `# stat=`, `# sides=`
/// metadata (when present) against the test being run.
fn load_calibration(path: &Path, n: usize, stat: StatKind, sides: Sides) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    for line in text.lines().take_while(|l| l.starts_with('#')) {
        let Some((key, value)) = line.trim_start_matches('#').trim().split_once('=') else {
            continue;
        };
        let expected = match key {
            "n" => n.to_string(),
            "stat" => stat.to_string(),
            "sides" => sides.to_string(),
            _ => continue,
        };
        if value != expected {
            return Err(Error::Usage(format!(
                "calibration file was made with {key}={value}, this test has {key}={expected}"
            )));
        }
    }
    read_raw_csv(text.as_bytes())
}

fn raw_dump(cfg: &ExperimentConfig, hash: &str, rows: &[(u64, f64)]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    writeln!(buf, "# model={}", cfg.model)?;
    writeln!(buf, "# n={}", cfg.n)?;
    writeln!(buf, "# reps={}", cfg.reps)?;
    writeln!(buf, "# stat={}", cfg.stat_kind)?;
    writeln!(buf, "# sides={}", effective_sides(cfg.stat_kind, cfg.sides))?;
    writeln!(buf, "# seed={}", cfg.base_seed)?;
    if let Some(c) = cfg.change {
        writeln!(buf, "# kstar_frac={}", c.kstar_frac)?;
        writeln!(buf, "# delta={}", c.delta)?;
    }
    writeln!(buf, "# config_hash={hash}")?;
    writeln!(buf, "# generator={}", crate::rng::GENERATOR)?;
    writeln!(buf, "# tool={}", crate::TOOL_VERSION)?;
    write_raw_csv(rows, &mut buf)?;
    Ok(buf)
}

fn echo(cmd: &str, hash: &str, seed: u64) {
    eprintln!("amoc {cmd}: config_hash={hash} seed={seed}");
}

pub fn cmd_simulate(a: &SimulateArgs) -> Result<()> {
    let cfg = a.experiment.config()?;
    let report = run_null(&cfg)?;
    echo("simulate", &report.config_hash, cfg.base_seed);
    emit(a.output.as_deref(), &raw_dump(&cfg, &report.config_hash, &report.raw_rows())?)?;
    if let Some(path) = &a.report {
        let report = if a.per_rep { report } else { report.without_values() };
        emit_json(Some(path), &report)?;
    }
    Ok(())
}

pub fn cmd_calibrate(a: &CalibrateArgs) -> Result<()> {
    let cfg = a.experiment.config()?;
    let table = calibrate(&cfg, &a.probs)?;
    echo("calibrate", &table.config_hash, cfg.base_seed);
    let mut buf = Vec::new();
    table.write_csv(&mut buf)?;
    emit(a.output.as_deref(), &buf)
}

pub fn cmd_power(a: &PowerArgs) -> Result<()> {
    let mut cfg = a.experiment.config()?.with_change(a.kstar_frac, a.delta);
    cfg.calibrated_threshold = a.calibrated_threshold;
    let report = run_power(&cfg)?;
    echo("power", &report.config_hash, cfg.base_seed);
    if let Some(path) = &a.raw {
        emit(Some(path), &raw_dump(&cfg, &report.config_hash, &report.raw_rows())?)?;
    }
    let report = if a.per_rep { report } else { report.without_values() };
    emit_json(a.output.as_deref(), &report)
}

pub fn cmd_limit(a: &LimitArgs) -> Result<()> {
    let cfg = LimitConfig {
        points_per_octave: a.points_per_octave,
        ..LimitConfig::new(a.functional, a.reps, a.grid, a.horizon, a.seed)
    };
    let q = limit_quantiles(&cfg, &a.probs)?;
    eprintln!("amoc limit: functional={} seed={}", cfg.functional, cfg.seed);
    let mut buf = Vec::new();
    q.write_csv(&mut buf)?;
    emit(a.output.as_deref(), &buf)
}

pub fn cmd_compare(a: &CompareArgs) -> Result<()> {
    let model: TailModel = a.model.parse()?;
    let cfg = ExperimentConfig {
        sides: a.sides.sides(),
        ..ExperimentConfig::new(model, a.n, a.reps, a.seed)
    };
    let report = compare_normalizers(&cfg)?;
    echo("compare", &report.config_hash, cfg.base_seed);
    emit_json(a.output.as_deref(), &report)
}
