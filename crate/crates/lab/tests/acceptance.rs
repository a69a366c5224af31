//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs under `cargo test`; on its own with
//! `cargo test --release -p fpa-lab --test acceptance`.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use fpa_core::distributions::{Cdf, DistributionSpec};
use fpa_core::dp::{
    enumerate_policy_value, solve_value_table_with, BaseRow, DpConfig, TinyInstance, ValueMeasure,
};
use fpa_core::estimation::{
    censored_cdf_eval, cox_fit, dkw_radius, zeng_estimate, CensoredCdfEstimate, CensoredSample,
    CoxTarget, EmpiricalCdf, KernelKind, KernelSpec, ESTIMATE_GRID_POINTS,
};
use fpa_core::policies::PolicySpec;
use fpa_core::regret::{example1_report, thm2_bound};
use fpa_core::rng::RngStream;
use fpa_lab::{run_sweep, AuctionSection, BudgetRule, ExperimentSpec, SweepOutput, SweepSection};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(elapsed: Duration, limit_secs: u64) -> bool {
    elapsed < Duration::from_secs(limit_secs)
}

// 1. benchmark utilities
fn example1() -> Outcome {
    let start = Instant::now();
    let r = example1_report(1_000_000, 2024).expect("enough samples");
    let took = start.elapsed();
    let first = (r.first_best_per_round - 0.4506).abs() <= 0.002;
    let half = (r.half_value_per_round - 0.26).abs() <= 0.002;
    let sep = r.first_best_per_round - r.half_value_per_round >= 0.18;
    outcome(
        first && half && sep && r.budget_slack() && within(took, 10),
        format!(
            "first best {:.5}, half value {:.5}, payment {:.5}, {:.2?}",
            r.first_best_per_round, r.half_value_per_round, r.half_value_payment_per_round, took
        ),
    )
}

fn random_atoms(rng: &mut RngStream, count: usize, snap: Option<f64>) -> Vec<(f64, f64)> {
    let mut points: Vec<f64> = (0..count)
        .map(|_| {
            let u = rng.uniform();
            match snap {
                // every other instance puts rival bids on the grid to exercise ties
                Some(step) => (u / step).floor() * step,
                None => u,
            }
        })
        .collect();
    points.sort_by(f64::total_cmp);
    points.dedup();
    let weights: Vec<f64> = points.iter().map(|_| 0.1 + rng.uniform()).collect();
    let total: f64 = weights.iter().sum();
    points
        .into_iter()
        .zip(weights)
        .map(|(p, w)| (p, w / total))
        .collect()
}

// 2. recursion against exhaustive search
fn dp_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = RngStream::new(99, 0);
    let mut worst: f64 = 0.0;
    for case in 0..20 {
        let step = if case % 2 == 0 { 0.25 } else { 0.5 };
        let n = (1.0 / step) as usize;
        let value_count = 1 + (rng.uniform() * 3.0) as usize;
        let values = random_atoms(&mut rng, value_count, None);
        let rival_count = 1 + (rng.uniform() * 3.0) as usize;
        let rivals = random_atoms(&mut rng, rival_count, (case % 4 < 2).then_some(step));
        let horizon = 1 + (rng.uniform() * 4.0) as usize;
        let budget = step * (rng.uniform() * 7.0).floor();
        let lambda = 0.95 * rng.uniform();

        let (ms, ps): (Vec<f64>, Vec<f64>) = rivals.iter().copied().unzip();
        let f = DistributionSpec::atoms(ms, ps).expect("normalized atoms");
        let g = ValueMeasure::from_atoms(values.clone()).expect("valid atoms");
        let cfg = DpConfig::new(lambda, 1.0, step).expect("valid grid");
        let table =
            solve_value_table_with(&f, &g, 1, horizon as u64 + 1, budget, &cfg, &BaseRow::Zero)
                .expect("table solves");
        let inst = TinyInstance {
            rival_atoms: rivals,
            value_atoms: values,
            bids: (0..=n).map(|k| k as f64 * step).collect(),
            horizon,
            budget,
            lambda,
        };
        let brute = enumerate_policy_value(&inst).expect("small enough");
        worst = worst.max((table.value(budget, 1) - brute).abs());
    }
    let took = start.elapsed();
    outcome(
        worst <= 1e-9 && within(took, 30),
        format!("max gap {worst:.2e} over 20 instances, {took:.2?}"),
    )
}

// 3. any two base rows lead to value functions within lambda^(t0 - tau) / (1 - lambda)
fn contraction() -> Outcome {
    let start = Instant::now();
    let mut rng = RngStream::new(5, 0);
    let mut worst_ratio: f64 = 0.0;
    let mut pass = true;
    for &lambda in &[0.5, 0.9] {
        let cap = 1.0 / (1.0 - lambda);
        for pair in 0..5 {
            let cfg = DpConfig::new(lambda, 1.0, 0.05).unwrap();
            let budget = 0.5 + 2.0 * rng.uniform();
            let cells = cfg.budget_index(budget) + 1;
            let f = DistributionSpec::uniform(0.0, 0.3 + 0.7 * rng.uniform()).unwrap();
            let g = ValueMeasure::from_atoms(random_atoms(&mut rng, 3, None)).unwrap();
            let mut base = || BaseRow::PerBudget((0..cells).map(|_| cap * rng.uniform()).collect());
            let (b1, b2) = (base(), base());
            let t0 = 12 + pair;
            let w1 = solve_value_table_with(&f, &g, 1, t0, budget, &cfg, &b1).unwrap();
            let w2 = solve_value_table_with(&f, &g, 1, t0, budget, &cfg, &b2).unwrap();
            for tau in 1..=t0 {
                let bound = lambda.powi((t0 - tau) as i32) * cap;
                for i in 0..cells {
                    let gap = (w1.value_at_index(i, tau) - w2.value_at_index(i, tau)).abs();
                    pass &= gap <= bound;
                    worst_ratio = worst_ratio.max(gap / bound);
                }
            }
        }
    }
    let took = start.elapsed();
    outcome(
        pass && within(took, 10),
        format!("largest gap / bound {worst_ratio:.4}, {took:.2?}"),
    )
}

// 4. DKW radius coverage
fn dkw_coverage() -> Outcome {
    let start = Instant::now();
    let unit = DistributionSpec::unit_uniform();
    let radius = dkw_radius(500, 0.1).unwrap();
    let mut violations = 0;
    for trial in 0..2000u64 {
        let mut rng = RngStream::new(trial, 7);
        let xs: Vec<f64> = (0..500).map(|_| rng.uniform()).collect();
        let ecdf = EmpiricalCdf::from_values(&xs).unwrap();
        if ecdf.sup_distance(&unit) > radius {
            violations += 1;
        }
    }
    let rate = violations as f64 / 2000.0;
    let took = start.elapsed();
    outcome(
        rate <= 0.12 && within(took, 30),
        format!("violation rate {rate:.4} (radius {radius:.5}), {took:.2?}"),
    )
}

/// Product-limit survival at `x`, written from scratch over distinct event times.
fn kaplan_meier(samples: &[CensoredSample], x: f64) -> f64 {
    let mut times: Vec<f64> = samples
        .iter()
        .filter(|s| s.event && s.y <= x)
        .map(|s| s.y)
        .collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    times
        .iter()
        .map(|&u| {
            let deaths = samples.iter().filter(|s| s.event && s.y == u).count() as f64;
            let at_risk = samples.iter().filter(|s| s.y >= u).count() as f64;
            1.0 - deaths / at_risk
        })
        .product()
}

fn km_reduction() -> (bool, String) {
    let kernel = KernelSpec {
        kind: KernelKind::Gaussian,
        bandwidth_constant: 1e6,
    };
    let mut rng = RngStream::new(31, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let n = 20 + (rng.uniform() * 180.0) as usize;
        let samples: Vec<CensoredSample> = (0..n)
            .map(|_| CensoredSample {
                y: (rng.uniform() * 100.0).round() / 100.0,
                event: rng.uniform() < 0.6,
                features: vec![1.0, 0.5, 0.25, 1.0],
            })
            .collect();
        let beta = cox_fit(&samples, CoxTarget::EventSide).unwrap();
        let gamma = cox_fit(&samples, CoxTarget::CensorSide).unwrap();
        let est = zeng_estimate(&samples, &beta, &gamma, &kernel).unwrap();
        for k in 0..ESTIMATE_GRID_POINTS {
            let x = CensoredCdfEstimate::grid_point(k);
            worst = worst.max((est.values()[k] - kaplan_meier(&samples, x)).abs());
        }
    }
    (worst <= 1e-6, format!("KM gap {worst:.2e}"))
}

fn censored_sup_error(n: usize, seed: u64) -> f64 {
    let truth = DistributionSpec::uniform(0.0, 0.5).unwrap();
    let mut rng = RngStream::new(seed, 3);
    let samples: Vec<CensoredSample> = (0..n)
        .map(|_| {
            let m = 0.5 * rng.uniform();
            let b = 0.6 * rng.uniform();
            let h = vec![rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform()];
            CensoredSample::from_round(b, b.max(m), b >= m, h)
        })
        .collect();
    let beta = cox_fit(&samples, CoxTarget::EventSide).unwrap();
    let gamma = cox_fit(&samples, CoxTarget::CensorSide).unwrap();
    let est = zeng_estimate(&samples, &beta, &gamma, &KernelSpec::default()).unwrap();
    (0..ESTIMATE_GRID_POINTS)
        .map(|k| {
            let b = k as f64 / (ESTIMATE_GRID_POINTS - 1) as f64;
            (censored_cdf_eval(&est, b) - truth.cdf(b)).abs()
        })
        .fold(0.0, f64::max)
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

// 5. censored estimator
fn censored_estimator() -> Outcome {
    let start = Instant::now();
    let (km_ok, km_detail) = km_reduction();
    let medians: Vec<f64> = [512, 2048, 8192]
        .iter()
        .map(|&n| {
            median(
                (0..50)
                    .map(|rep| censored_sup_error(n, 1000 + rep))
                    .collect(),
            )
        })
        .collect();
    let decreasing = medians.windows(2).all(|w| w[1] < w[0]);
    let took = start.elapsed();
    outcome(
        km_ok && decreasing && medians[2] <= 0.05 && within(took, 300),
        format!(
            "{km_detail}; median sup error {:.4} / {:.4} / {:.4} at n = 512 / 2048 / 8192, {took:.2?}",
            medians[0], medians[1], medians[2]
        ),
    )
}

const SWEEP_HORIZONS: [u64; 5] = [512, 1024, 2048, 4096, 8192];

fn example1_auction() -> AuctionSection {
    AuctionSection {
        rival: DistributionSpec::uniform(0.0, 0.5).unwrap(),
        value: DistributionSpec::uniform(0.4, 1.0).unwrap(),
        lambda: 0.9,
        c1: 1.0,
        bid_grid_step: 0.01,
        budget: BudgetRule::Proportional { beta: 0.5 },
        feedback: None,
        horizon: None,
    }
}

fn threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn regret_sweep() -> &'static (SweepOutput, Duration) {
    static SWEEP: OnceLock<(SweepOutput, Duration)> = OnceLock::new();
    SWEEP.get_or_init(|| {
        let spec = ExperimentSpec {
            auction: example1_auction(),
            policies: vec![
                PolicySpec::FullFeedback {
                    known_value_law: false,
                    recompute_every: 1,
                },
                PolicySpec::Censored {
                    kernel: KernelSpec::default(),
                },
            ],
            sweep: SweepSection {
                horizons: SWEEP_HORIZONS.to_vec(),
                replications: 50,
                seed: 20240601,
                out_dir: None,
            },
        };
        let start = Instant::now();
        let out = run_sweep(&spec, threads()).expect("sweep runs");
        (out, start.elapsed())
    })
}

fn means(out: &SweepOutput, policy: &str) -> Vec<f64> {
    let rep = out.report(policy).expect("policy in sweep");
    SWEEP_HORIZONS
        .iter()
        .map(|&t| rep.mean_at(t).unwrap())
        .collect()
}

fn fmt_means(ms: &[f64]) -> String {
    ms.iter()
        .map(|m| format!("{m:.3}"))
        .collect::<Vec<_>>()
        .join(" / ")
}

// 6. full-feedback regret growth
fn full_feedback_scaling() -> Outcome {
    let (out, took) = regret_sweep();
    let rep = out.report("full_feedback").unwrap();
    let ms = means(out, "full_feedback");
    let under_bound = SWEEP_HORIZONS
        .iter()
        .zip(&ms)
        .all(|(&t, &m)| m <= thm2_bound(t, 0.9).unwrap());
    let Some(fit) = rep.slope else {
        return outcome(false, format!("no slope fit; means {}", fmt_means(&ms)));
    };
    outcome(
        fit.slope <= 0.65 && under_bound && within(*took, 20 * 60),
        format!(
            "slope {:.3} [{:.3}, {:.3}], means {}, sweep {took:.1?}",
            fit.slope,
            fit.ci_low,
            fit.ci_high,
            fmt_means(&ms)
        ),
    )
}

// 7. censored-feedback regret growth
fn censored_scaling() -> Outcome {
    let (out, took) = regret_sweep();
    let rep = out.report("censored").unwrap();
    let ms = means(out, "censored");
    let full = means(out, "full_feedback");
    let ordered = ms.iter().zip(&full).all(|(c, f)| c >= f);
    let Some(fit) = rep.slope else {
        return outcome(false, format!("no slope fit; means {}", fmt_means(&ms)));
    };
    outcome(
        fit.slope <= 0.72 && ordered && within(*took, 60 * 60),
        format!(
            "slope {:.3} [{:.3}, {:.3}], means {}, above full feedback at every T: {ordered}",
            fit.slope,
            fit.ci_low,
            fit.ci_high,
            fmt_means(&ms)
        ),
    )
}

const DETERMINISM_CONFIG: &str = r#"
[auction]
rival = { kind = "uniform", lo = 0.0, hi = 0.5 }
value = { kind = "uniform", lo = 0.4, hi = 1.0 }
lambda = 0.9

[[policies]]
kind = "full_feedback"

[[policies]]
kind = "censored"

[[policies]]
kind = "half_value"

[sweep]
horizons = [64, 128, 256]
replications = 6
seed = 77
"#;

fn sweep_files(config: &Path, out: &Path, threads: usize) -> Result<Vec<Vec<u8>>, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_fpa-lab"))
        .args(["sweep", "--threads", &threads.to_string(), "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .env_remove("FPA_LAB_OUT")
        .output()
        .map_err(|e| e.to_string())?;
    if !status.status.success() {
        return Err(String::from_utf8_lossy(&status.stderr).into_owned());
    }
    ["regret.csv", "summary.csv"]
        .iter()
        .map(|f| std::fs::read(out.join(f)).map_err(|e| e.to_string()))
        .collect()
}

// 8. byte-identical sweeps
fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.toml");
    std::fs::write(&config, DETERMINISM_CONFIG).unwrap();
    let runs: Result<Vec<_>, String> = [(1, "a"), (1, "b"), (8, "c")]
        .iter()
        .map(|&(threads, name)| sweep_files(&config, &dir.path().join(name), threads))
        .collect();
    match runs {
        Ok(runs) => {
            let same = runs[0] == runs[1] && runs[0] == runs[2];
            let bytes: usize = runs[0].iter().map(Vec::len).sum();
            outcome(
                same,
                format!("3 sweeps (threads 1, 1, 8), {bytes} bytes each, identical: {same}"),
            )
        }
        Err(e) => outcome(false, format!("sweep failed: {e}")),
    }
}

type Check = fn() -> Outcome;

fn main() -> ExitCode {
    let criteria: [(&str, Check); 8] = [
        ("benchmark utilities", example1),
        ("recursion matches exhaustive search", dp_equivalence),
        ("base-row contraction", contraction),
        ("DKW coverage", dkw_coverage),
        ("censored estimator", censored_estimator),
        ("full-feedback regret scaling", full_feedback_scaling),
        ("censored-feedback regret scaling", censored_scaling),
        ("sweep determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} {}. {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
