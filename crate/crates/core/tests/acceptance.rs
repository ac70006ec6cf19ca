// SPDX-License-Identifier: MIT OR Apache-2.0

//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! ```bash
//! cargo test --release -p amoc --test acceptance
//! ```

use amoc::bridge::{normalize_de, simulate_functional, BridgeFunctional, LimitConfig};
use amoc::harness::{calibrate, run_null, run_power, ExperimentConfig};
use amoc::limit::{GumbelLaw, NormConstants};
use amoc::models::{epsilon_diag, lfun_ratio, TailModel};
use amoc::rng::replication_rng;
use amoc::stats::{scan, scan_hat, scan_tkn, weighted_supnorm, StatKind};
use amoc::summary::{ks_distance, mean_se};
use amoc::{PrefixSums, Sides};
use serde_json::Value;
use std::process::Command;
use std::time::{Duration, Instant};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn normal(sd: f64) -> TailModel {
    TailModel::Normal { mean: 0.0, sd }
}

/// Random samples of mixed shapes, reproducible.
fn samples(count: usize, sizes: &[usize], seed: u64) -> Vec<Vec<f64>> {
    let models = [normal(1.0), TailModel::Student { df: 3.0 }, TailModel::Pareto2, normal(25.0)];
    (0..count)
        .map(|i| {
            let model = models[i % models.len()];
            let n = sizes[i % sizes.len()];
            let mut rng = replication_rng(seed, i as u64);
            model.sampler().unwrap().draw(&mut rng, n)
        })
        .collect()
}

fn segment(x: &[f64]) -> (f64, f64) {
    let m = x.iter().sum::<f64>() / x.len() as f64;
    (m, x.iter().map(|v| (v - m).powi(2)).sum())
}

fn brute_t(x: &[f64], k: usize) -> f64 {
    let n = x.len();
    let ((m1, ss1), (m2, ss2)) = (segment(&x[..k]), segment(&x[k..]));
    (m1 - m2) / (ss1 / (k * (k - 1)) as f64 + ss2 / ((n - k) * (n - k - 1)) as f64).sqrt()
}

fn brute_hat(x: &[f64], k: usize) -> f64 {
    let n = x.len();
    let nf = n as f64;
    let ((_, ss1), (_, ss2)) = (segment(&x[..k]), segment(&x[k..]));
    let s_k: f64 = x[..k].iter().sum();
    let s_n: f64 = x.iter().sum();
    let z = (s_k - k as f64 * s_n / nf) / nf.sqrt();
    nf / (k as f64 * (n - k) as f64).sqrt() * z / ((ss1 + ss2) / nf).sqrt()
}

fn criterion_1() -> Outcome {
    let mut worst: f64 = 0.0;
    for x in samples(100, &[10, 50, 200], 1) {
        let ps = PrefixSums::new(&x).unwrap();
        let t = scan_tkn(&ps, Sides::One).unwrap();
        for (k, v) in t.per_k() {
            worst = worst.max((v - brute_t(&x, k)).abs());
        }
        let h = scan_hat(&ps, Sides::One).unwrap();
        for (k, v) in h.per_k() {
            worst = worst.max((v - brute_hat(&x, k)).abs());
        }
    }
    outcome(worst <= 1e-10, format!("max abs diff {worst:.2e} (limit 1e-10)"))
}

fn criterion_2() -> Outcome {
    let mut worst: f64 = 0.0;
    for x in samples(100, &[10, 50, 200, 1000], 2) {
        let ps = PrefixSums::new(&x).unwrap();
        let n = x.len();
        let nf = n as f64;
        for k in 2..=n - 2 {
            let d = k as f64 * (n - k) as f64;
            let z = ps.z(k as f64 / (nf + 1.0)).unwrap();
            let rhs = (nf / d).sqrt() * (nf * nf / d).sqrt() * z / ps.sigma_tilde_sq(k).unwrap().sqrt();
            let t = ps.t_stat(k).unwrap();
            worst = worst.max((t - rhs).abs() / t.abs());
        }
    }
    outcome(worst <= 1e-10, format!("max rel diff {worst:.2e} (limit 1e-10)"))
}

fn criterion_3() -> Outcome {
    let mut worst: f64 = 0.0;
    let xs = samples(50, &[10, 50, 200], 3);
    for (i, x) in xs.iter().enumerate() {
        let mut rng = replication_rng(33, i as u64);
        use rand::Rng;
        let a = 10f64.powf(rng.random_range(-2.0..2.0));
        let b = rng.random_range(-1e3..1e3);
        let y: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        let (px, py) = (PrefixSums::new(x).unwrap(), PrefixSums::new(&y).unwrap());
        let (tx, ty) = (
            scan(&px, StatKind::Tkn, Sides::Two).unwrap(),
            scan(&py, StatKind::Tkn, Sides::Two).unwrap(),
        );
        // Relative in the sup norm of the profile, and exactly for the maximum.
        let sup = tx.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (u, w) in tx.values.iter().zip(&ty.values) {
            worst = worst.max((u - w).abs() / sup);
        }
        worst = worst.max((tx.max_value - ty.max_value).abs() / tx.max_value);
        if tx.argmax_k != ty.argmax_k {
            worst = f64::INFINITY;
        }
        let (wx, wy) = (weighted_supnorm(&px).unwrap(), weighted_supnorm(&py).unwrap());
        worst = worst.max((wx - wy).abs() / wx);
    }
    outcome(worst <= 1e-9, format!("max rel diff {worst:.2e} (limit 1e-9)"))
}

fn criterion_4() -> Outcome {
    let (n, k, reps) = (50usize, 20usize, 100_000u64);
    let sampler = normal(2.0).sampler().unwrap();
    let vals: Vec<f64> = (0..reps)
        .map(|r| {
            let x = sampler.draw(&mut replication_rng(4, r), n);
            let ps = PrefixSums::new(&x).unwrap();
            (k * (n - k)) as f64 / n as f64 * ps.sigma_tilde_sq(k).unwrap()
        })
        .collect();
    let (mean, se) = mean_se(&vals);
    outcome(
        (mean - 4.0).abs() <= 3.0 * se,
        format!("mean {mean:.5}, se {se:.5}, |mean-4|/se = {:.2}", (mean - 4.0).abs() / se),
    )
}

fn criterion_5() -> Outcome {
    // 50-digit recomputation with guarded logs at every level.
    let (a_ref, b_ref) = (2.291633441227462, 5.179218886027321);
    let c = NormConstants::new(1e6);
    let (da, db) = ((c.a_n - a_ref).abs(), (c.b_n - b_ref).abs());
    let guarded = (1..=15).all(|n| NormConstants::for_count(n).a_n == 2f64.sqrt());
    outcome(
        da <= 1e-12 && db <= 1e-12 && guarded,
        format!("|da| {da:.1e}, |db| {db:.1e}, a(n)=sqrt2 for n<=15: {guarded}"),
    )
}

fn criterion_6() -> Outcome {
    let mut worst: f64 = 0.0;
    for law in [GumbelLaw::ONE_SIDED, GumbelLaw::TWO_SIDED] {
        for alpha in [0.2, 0.1, 0.05, 0.01] {
            let c = law.critical(alpha).unwrap();
            worst = worst.max((law.pvalue(c) - alpha).abs());
            worst = worst.max((law.cdf(c) - (1.0 - alpha)).abs());
        }
    }
    let mut two: f64 = 0.0;
    for i in 0..=1000 {
        let t = -5.0 + 15.0 * i as f64 / 1000.0;
        two = two.max((GumbelLaw::TWO_SIDED.cdf(t) - (-2.0 * (-t).exp()).exp()).abs());
    }
    outcome(
        worst <= 1e-12 && two <= 1e-15,
        format!("round-trip err {worst:.1e}, two-sided law err {two:.1e}"),
    )
}

fn criterion_7() -> Outcome {
    let horizon = 1e8;
    let cfg = LimitConfig {
        points_per_octave: 4096,
        ..LimitConfig::new(BridgeFunctional::DarlingErdos, 5000, 4096, horizon, 7)
    };
    let sups = simulate_functional(&cfg).unwrap();
    let norm = normalize_de(&sups, horizon);
    let ks = ks_distance(&norm, |t| GumbelLaw::ONE_SIDED.cdf(t));
    let (mean, _) = mean_se(&norm);
    outcome(ks <= 0.05, format!("KS {ks:.4} (limit 0.05), mean {mean:.3} vs Gumbel 0.577"))
}

fn criterion_8() -> Outcome {
    let m = TailModel::Pareto2;
    let mut worst: f64 = 0.0;
    for i in 0..=900 {
        let x = (1.0 + 9.0 * i as f64 / 900.0).exp();
        worst = worst.max(epsilon_diag(&m, x).unwrap() * x.ln());
    }
    let exact = [3.0, 10.0, 1e3, 1e6, 1e12].iter().all(|&x| lfun_ratio(&m, x).unwrap() == 2.0);
    outcome(
        worst <= 1.0 + 1e-4 && exact,
        format!("max eps*log x {worst:.6}, l(x^2)/l(x) == 2: {exact}"),
    )
}

fn criterion_9() -> (Outcome, Outcome) {
    let model = normal(1.0);
    let null = run_null(&ExperimentConfig::new(model, 10_000, 2000, 9)).unwrap();
    let rate = null.rejection_rate_asymptotic.unwrap();
    let asym = outcome(
        (0.01..=0.15).contains(&rate),
        format!("asymptotic rejection rate {rate:.4} (band [0.01, 0.15])"),
    );
    let table = calibrate(&ExperimentConfig::new(model, 10_000, 4000, 90), &[0.95]).unwrap();
    let cfg = ExperimentConfig {
        calibrated_threshold: table.threshold(0.95),
        ..ExperimentConfig::new(model, 10_000, 2000, 91)
    };
    let cal = run_null(&cfg).unwrap().rejection_rate_calibrated.unwrap();
    let se = (0.05f64 * 0.95 / 2000.0).sqrt();
    let calibrated = outcome(
        (cal - 0.05).abs() <= 3.0 * se,
        format!("calibrated rejection rate {cal:.4} (0.05 ± {:.4})", 3.0 * se),
    );
    (asym, calibrated)
}

fn criterion_10() -> Outcome {
    let cfg = ExperimentConfig::new(normal(1.0), 1000, 1000, 10).with_change(0.5, 1.0);
    let r = run_power(&cfg).unwrap();
    let power = r.rejection_rate_asymptotic.unwrap();
    let loc = r.localization.as_ref().unwrap();
    outcome(
        power >= 0.95 && loc.mean_abs_error <= 0.05 && loc.kstar == 500,
        format!("power {power:.4}, mean |k^-k*|/n {:.4}", loc.mean_abs_error),
    )
}

fn amoc(args: &[&str]) -> Vec<u8> {
    let o = Command::new(env!("CARGO_BIN_EXE_amoc")).args(args).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    o.stdout
}

/// JSON reports carry a wall-clock runtime; everything else must match.
fn without_runtime(bytes: &[u8]) -> Vec<u8> {
    match serde_json::from_slice::<Value>(bytes) {
        Ok(Value::Object(mut map)) => {
            map.remove("runtime_secs");
            serde_json::to_vec(&map).unwrap()
        }
        _ => bytes.to_vec(),
    }
}

fn criterion_11() -> Outcome {
    let commands: [&[&str]; 5] = [
        &["simulate", "--model", "student:3", "--n", "2000", "--reps", "300", "--seed", "11"],
        &["calibrate", "--model", "logpow:1.5", "--n", "1000", "--reps", "300", "--seed", "11", "--probs", "0.5,0.95"],
        &[
            "power", "--model", "pareto2", "--n", "1000", "--reps", "200", "--seed", "11", "--kstar-frac", "0.3",
            "--delta", "0.5", "--per-rep",
        ],
        &["limit", "--functional", "darling_erdos", "--reps", "300", "--grid", "1024", "--seed", "11", "--probs", "0.5,0.9"],
        &["compare", "--model", "normal:1,2", "--n", "1000", "--reps", "200", "--seed", "11"],
    ];
    let mut mismatched = Vec::new();
    for cmd in commands {
        let mut runs = Vec::new();
        for threads in ["1", "1", "4", "7"] {
            let mut args = vec!["--threads", threads];
            args.extend_from_slice(cmd);
            runs.push(without_runtime(&amoc(&args)));
        }
        if runs.windows(2).any(|w| w[0] != w[1]) {
            mismatched.push(cmd[0]);
        }
    }
    outcome(
        mismatched.is_empty(),
        format!("5 commands x 4 runs (threads 1,1,4,7); mismatched: {mismatched:?}"),
    )
}

fn main() {
    let mut failed = 0;
    let mut report = |id: &str, name: &str, limit: Duration, run: &mut dyn FnMut() -> Vec<Outcome>| {
        let start = Instant::now();
        let outs = run();
        let took = start.elapsed();
        for (i, o) in outs.iter().enumerate() {
            let label = if outs.len() > 1 {
                format!("{id}{}", (b'a' + i as u8) as char)
            } else {
                id.to_string()
            };
            let pass = o.pass && took <= limit;
            if !pass {
                failed += 1;
            }
            println!(
                "criterion {label:<3} {:<4} {name}: {} [{:.2}s, limit {}s]",
                if pass { "PASS" } else { "FAIL" },
                o.detail,
                took.as_secs_f64(),
                limit.as_secs()
            );
        }
    };
    let s = Duration::from_secs;
    report("1", "brute-force oracle equivalence", s(10), &mut || vec![criterion_1()]);
    report("2", "T via tied-down partial sums", s(5), &mut || vec![criterion_2()]);
    report("3", "affine invariance", s(5), &mut || vec![criterion_3()]);
    report("4", "unbiased variance estimate", s(60), &mut || vec![criterion_4()]);
    report("5", "normalizing constants", s(1), &mut || vec![criterion_5()]);
    report("6", "Gumbel laws", s(1), &mut || vec![criterion_6()]);
    report("7", "bridge Darling-Erdos Gumbel fit", s(600), &mut || vec![criterion_7()]);
    report("8", "pareto2 slow variation", s(1), &mut || vec![criterion_8()]);
    report("9", "null size, asymptotic and calibrated", s(900), &mut || {
        let (a, b) = criterion_9();
        vec![a, b]
    });
    report("10", "power and localization", s(300), &mut || vec![criterion_10()]);
    report("11", "determinism across runs and threads", s(120), &mut || vec![criterion_11()]);
    println!("acceptance: {} criteria failed", failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
