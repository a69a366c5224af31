use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::planner::Planner;
use super::{BiddingPolicy, RivalEstimate};
use crate::auction::Feedback;
use crate::dp::{DpConfig, ValueMeasure};
use crate::error::{Error, Result};
use crate::estimation::{
    cox_fit, zeng_estimate, CensoredSample, CoxFit, CoxTarget, EmpiricalCdf, KernelSpec,
    FEATURE_DIM,
};

/// Doubling phases: phase `i >= 1` has length `2^i` and ends at round
/// `2^(i+1) - 2`, so the boundaries are 2, 6, 14, 30, ...
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PhaseSchedule;

impl PhaseSchedule {
    /// Last round of phase `i`.
    pub fn end(&self, i: u32) -> u64 {
        (1u64 << (i + 1)) - 2
    }

    /// Phase containing round `t >= 1`.
    pub fn phase_of(&self, t: u64) -> u32 {
        let mut i = 1;
        while self.end(i) < t {
            i += 1;
        }
        i
    }

    pub fn is_boundary(&self, t: u64) -> bool {
        t >= 2 && (t + 2).is_power_of_two()
    }

    /// Boundaries in `1..=horizon`.
    pub fn boundaries(&self, horizon: u64) -> Vec<u64> {
        (1..)
            .map(|i| self.end(i))
            .take_while(|&e| e <= horizon)
            .collect()
    }
}

/// Plug-in DP bidder for censored feedback.
///
/// Rival bids enter through `max(b, m)` only. At the end of every phase the
/// policy refits both Cox models on all rounds so far and replaces its rival
/// CDF by the kernel-smoothed product-limit estimate; inside a phase the
/// estimate is frozen. Round covariates are the previous bid, the previous
/// observation, the remaining budget fraction and the running win rate.
#[derive(Debug, Clone)]
pub struct CensoredPolicy {
    planner: Planner,
    kernel: KernelSpec,
    schedule: PhaseSchedule,
    initial_budget: f64,
    budget: f64,
    samples: Vec<CensoredSample>,
    values: EmpiricalCdf,
    rival_estimate: RivalEstimate,
    version: u64,
    pending: Option<Vec<f64>>,
    last: Option<(f64, f64)>,
    wins: u64,
    fits: Option<(CoxFit, CoxFit)>,
}

impl CensoredPolicy {
    pub fn new(budget: f64, dp: DpConfig, kernel: KernelSpec) -> Self {
        Self {
            planner: Planner::new(dp),
            kernel,
            schedule: PhaseSchedule,
            initial_budget: budget,
            budget,
            samples: Vec::new(),
            values: EmpiricalCdf::new(),
            rival_estimate: RivalEstimate::Prior,
            version: 0,
            pending: None,
            last: None,
            wins: 0,
            fits: None,
        }
    }

    pub fn rival_estimate(&self) -> &RivalEstimate {
        &self.rival_estimate
    }

    pub fn samples(&self) -> &[CensoredSample] {
        &self.samples
    }

    /// Latest Cox fits on the event and censoring sides.
    pub fn fits(&self) -> Option<&(CoxFit, CoxFit)> {
        self.fits.as_ref()
    }

    fn features(&self) -> Vec<f64> {
        let done = self.samples.len();
        match self.last {
            None => vec![0.0; FEATURE_DIM],
            Some((b, o)) => vec![
                b,
                o,
                if self.initial_budget > 0.0 {
                    self.budget / self.initial_budget
                } else {
                    0.0
                },
                self.wins as f64 / done as f64,
            ],
        }
    }

    /// Refits the rival CDF from every round so far. Only valid right after
    /// the last round of a phase.
    pub fn phase_end(&mut self) -> Result<()> {
        let done = self.samples.len() as u64;
        if !self.schedule.is_boundary(done) {
            return Err(Error::Schedule(done));
        }
        let beta = cox_fit(&self.samples, CoxTarget::EventSide)?;
        let gamma = cox_fit(&self.samples, CoxTarget::CensorSide)?;
        let estimate = match zeng_estimate(&self.samples, &beta, &gamma, &self.kernel) {
            Ok(e) => e,
            // scores too spread for any kernel weight to survive: fall back to
            // the unsmoothed product-limit curve
            Err(Error::Internal(_)) => {
                let zero = CoxFit::zero(FEATURE_DIM);
                zeng_estimate(&self.samples, &zero, &zero, &self.kernel)?
            }
            Err(e) => return Err(e),
        };
        self.rival_estimate = RivalEstimate::Censored(estimate);
        self.fits = Some((beta, gamma));
        self.version += 1;
        Ok(())
    }
}

impl BiddingPolicy for CensoredPolicy {
    fn name(&self) -> &str {
        "censored"
    }

    fn bid(&mut self, t: u64, v: f64) -> Result<f64> {
        if self.pending.is_some() {
            return Err(Error::Internal(format!(
                "round {t} bid before the previous round was observed"
            )));
        }
        self.values.insert(v)?;
        self.pending = Some(self.features());
        let seen = &self.values;
        self.planner.bid(
            t,
            v,
            self.budget,
            &self.rival_estimate,
            self.version,
            1,
            || ValueMeasure::from_ecdf(seen),
        )
    }

    fn observe(&mut self, feedback: &Feedback) -> Result<()> {
        let features = self.pending.take().ok_or_else(|| {
            Error::Internal(format!("round {} observed without a bid", feedback.t))
        })?;
        let o = feedback.observation.highest_bid(feedback.bid);
        self.samples.push(CensoredSample::from_round(
            feedback.bid,
            o,
            feedback.won,
            features,
        ));
        self.last = Some((feedback.bid, o));
        if feedback.won {
            self.wins += 1;
        }
        self.budget = (self.budget - feedback.payment).max(0.0);
        if self.schedule.is_boundary(self.samples.len() as u64) {
            self.phase_end()?;
        }
        Ok(())
    }

    fn remaining_budget(&self) -> f64 {
        self.budget
    }
}
