//! Replicated regret experiments.

use fpa_core::auction::run_auction;
use fpa_core::policies::PolicySpec;
use fpa_core::regret::{coupled_regret, thm1_bound, thm2_bound};
use fpa_core::rng::replication_seed;
use rayon::prelude::*;

use crate::config::{AuctionSection, ExperimentSpec};
use crate::error::Result;
use crate::slope::{fit_slope, SlopeFit};

#[derive(Debug, Clone, PartialEq)]
pub struct RegretRow {
    pub horizon: u64,
    pub policy: String,
    pub rep: u64,
    pub regret: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HorizonSummary {
    pub horizon: u64,
    pub replications: u64,
    pub mean: f64,
    /// `None` with a single replication.
    pub std_error: Option<f64>,
    pub thm1_bound: Option<f64>,
    pub thm2_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegretReport {
    pub policy: String,
    pub horizons: Vec<HorizonSummary>,
    /// Fit of mean regret against `T`; present with three or more horizons
    /// of positive mean regret.
    pub slope: Option<SlopeFit>,
}

impl RegretReport {
    pub fn mean_at(&self, horizon: u64) -> Option<f64> {
        self.horizons
            .iter()
            .find(|h| h.horizon == horizon)
            .map(|h| h.mean)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    /// Sorted by horizon, then policy order of the spec, then replication.
    pub rows: Vec<RegretRow>,
    pub reports: Vec<RegretReport>,
}

impl SweepOutput {
    pub fn report(&self, policy: &str) -> Option<&RegretReport> {
        self.reports.iter().find(|r| r.policy == policy)
    }
}

/// Regret of every policy of `spec` at every horizon and replication.
///
/// Replication `r` runs on seed `seed ^ r` at every horizon, and the oracle
/// run of a (horizon, replication) pair is shared by all policies. Work is
/// spread over `threads` workers; the output does not depend on it.
pub fn run_sweep(spec: &ExperimentSpec, threads: usize) -> Result<SweepOutput> {
    spec.validate()?;
    let reps = spec.sweep.replications;
    let tasks: Vec<(u64, u64)> = spec
        .sweep
        .horizons
        .iter()
        .flat_map(|&t| (0..reps).map(move |r| (t, r)))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()?;
    let results: Vec<Vec<f64>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(t, r)| {
                replicate(
                    &spec.auction,
                    &spec.policies,
                    t,
                    replication_seed(spec.sweep.seed, r),
                )
            })
            .collect::<Result<_>>()
    })?;

    let mut rows = Vec::with_capacity(tasks.len() * spec.policies.len());
    for (&(t, rep), regrets) in tasks.iter().zip(&results) {
        for (p, &regret) in spec.policies.iter().zip(regrets) {
            rows.push(RegretRow {
                horizon: t,
                policy: p.label().to_string(),
                rep,
                regret,
            });
        }
    }
    let reports = spec
        .policies
        .iter()
        .map(|p| summarize(p.label(), &rows, &spec.sweep.horizons, spec.auction.lambda))
        .collect();
    Ok(SweepOutput { rows, reports })
}

/// Regret report of a single `policy` on the instance of `auction`.
pub fn measure_regret(
    auction: &AuctionSection,
    policy: &PolicySpec,
    horizons: &[u64],
    reps: u64,
    seed: u64,
    threads: usize,
) -> Result<RegretReport> {
    let spec = ExperimentSpec {
        auction: auction.clone(),
        policies: vec![policy.clone()],
        sweep: crate::config::SweepSection {
            horizons: horizons.to_vec(),
            replications: reps,
            seed,
            out_dir: None,
        },
    };
    let out = run_sweep(&spec, threads)?;
    Ok(out.reports.into_iter().next().expect("one policy"))
}

fn replicate(
    auction: &AuctionSection,
    policies: &[PolicySpec],
    horizon: u64,
    seed: u64,
) -> Result<Vec<f64>> {
    let oracle_cfg = auction.auction_config(&PolicySpec::Oracle, horizon, seed);
    let mut oracle = PolicySpec::Oracle.build(&oracle_cfg, auction.c1)?;
    let oracle_run = run_auction(&oracle_cfg, oracle.as_mut())?;
    let mut out = Vec::with_capacity(policies.len());
    for p in policies {
        let regret = if *p == PolicySpec::Oracle {
            0.0
        } else {
            let cfg = auction.auction_config(p, horizon, seed);
            let mut learner = p.build(&cfg, auction.c1)?;
            let run = run_auction(&cfg, learner.as_mut())?;
            coupled_regret(&oracle_run, &run, &cfg.rival)?
        };
        log::debug!(
            "T = {horizon}, seed = {seed}, {}: regret {regret}",
            p.label()
        );
        out.push(regret);
    }
    Ok(out)
}

fn summarize(policy: &str, rows: &[RegretRow], horizons: &[u64], lambda: f64) -> RegretReport {
    let summaries: Vec<HorizonSummary> = horizons
        .iter()
        .map(|&t| {
            let xs: Vec<f64> = rows
                .iter()
                .filter(|r| r.horizon == t && r.policy == policy)
                .map(|r| r.regret)
                .collect();
            let n = xs.len() as f64;
            let mean = xs.iter().sum::<f64>() / n;
            let std_error = (xs.len() > 1).then(|| {
                let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
                (var / n).sqrt()
            });
            HorizonSummary {
                horizon: t,
                replications: xs.len() as u64,
                mean,
                std_error,
                thm1_bound: thm1_bound(t, lambda).ok(),
                thm2_bound: thm2_bound(t, lambda).ok(),
            }
        })
        .collect();
    let slope = if summaries.len() >= 3 {
        let pts: Vec<(f64, f64)> = summaries
            .iter()
            .map(|h| (h.horizon as f64, h.mean))
            .collect();
        match fit_slope(&pts) {
            Ok(fit) => Some(fit),
            Err(e) => {
                log::warn!("no slope for {policy}: {e}");
                None
            }
        }
    } else {
        None
    };
    RegretReport {
        policy: policy.to_string(),
        horizons: summaries,
        slope,
    }
}
