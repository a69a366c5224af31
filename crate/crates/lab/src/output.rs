//! CSV files written by the lab.

use std::io::Write;

use fpa_core::auction::SimResult;
use fpa_core::regret::{thm1_bound, thm2_bound};
use serde::Serialize;

use crate::error::Result;
use crate::sweep::{RegretReport, RegretRow};

#[derive(Serialize)]
struct RegretLine<'a> {
    #[serde(rename = "T")]
    horizon: u64,
    policy: &'a str,
    rep: u64,
    regret: f64,
}

/// Columns `T, policy, rep, regret`.
pub fn write_regret_csv<W: Write>(out: W, rows: &[RegretRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(RegretLine {
            horizon: r.horizon,
            policy: &r.policy,
            rep: r.rep,
            regret: r.regret,
        })?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct SummaryLine<'a> {
    policy: &'a str,
    #[serde(rename = "T")]
    horizon: u64,
    reps: u64,
    mean_regret: f64,
    std_error: Option<f64>,
    thm1_bound: Option<f64>,
    thm2_bound: Option<f64>,
    slope: Option<f64>,
    slope_ci_low: Option<f64>,
    slope_ci_high: Option<f64>,
}

/// One line per (policy, horizon); the slope columns repeat the policy's fit.
pub fn write_summary_csv<W: Write>(out: W, reports: &[RegretReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for rep in reports {
        for h in &rep.horizons {
            w.serialize(SummaryLine {
                policy: &rep.policy,
                horizon: h.horizon,
                reps: h.replications,
                mean_regret: h.mean,
                std_error: h.std_error,
                thm1_bound: h.thm1_bound,
                thm2_bound: h.thm2_bound,
                slope: rep.slope.map(|s| s.slope),
                slope_ci_low: rep.slope.map(|s| s.ci_low),
                slope_ci_high: rep.slope.map(|s| s.ci_high),
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Columns `t, v, b, m, won, r, c, o, remaining_budget`.
pub fn write_rounds_csv<W: Write>(out: W, result: &SimResult) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in &result.rounds {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct BoundLine {
    #[serde(rename = "T")]
    horizon: u64,
    lambda: f64,
    thm1_bound: f64,
    thm2_bound: f64,
}

pub fn write_bounds_csv<W: Write>(out: W, horizons: &[u64], lambda: f64) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for &t in horizons {
        w.serialize(BoundLine {
            horizon: t,
            lambda,
            thm1_bound: thm1_bound(t, lambda)?,
            thm2_bound: thm2_bound(t, lambda)?,
        })?;
    }
    w.flush()?;
    Ok(())
}
