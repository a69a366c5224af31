use super::planner::Planner;
use super::{BiddingPolicy, RivalEstimate};
use crate::auction::{Feedback, Observation};
use crate::distributions::DistributionSpec;
use crate::dp::{DpConfig, ValueMeasure};
use crate::error::{Error, Result};
use crate::estimation::EmpiricalCdf;

/// Plug-in DP bidder fed by the empirical CDF of revealed rival bids.
///
/// Until the first rival bid arrives it plans with `F(b) = b`. The value law
/// is either known or replaced by the empirical CDF of observed values.
#[derive(Debug, Clone)]
pub struct FullFeedbackPolicy {
    planner: Planner,
    budget: f64,
    rival_estimate: RivalEstimate,
    values: EmpiricalCdf,
    known_values: Option<ValueMeasure>,
    version: u64,
    recompute_every: u64,
}

impl FullFeedbackPolicy {
    pub fn new(
        budget: f64,
        dp: DpConfig,
        known_value: Option<DistributionSpec>,
        recompute_every: u64,
    ) -> Self {
        Self {
            planner: Planner::new(dp),
            budget,
            rival_estimate: RivalEstimate::Prior,
            values: EmpiricalCdf::new(),
            known_values: known_value.as_ref().map(ValueMeasure::from_spec),
            version: 0,
            recompute_every: recompute_every.max(1),
        }
    }

    pub fn rival_estimate(&self) -> &RivalEstimate {
        &self.rival_estimate
    }

    /// Number of value tables solved so far.
    pub fn table_solves(&self) -> u64 {
        self.planner.solves()
    }
}

impl BiddingPolicy for FullFeedbackPolicy {
    fn name(&self) -> &str {
        "full_feedback"
    }

    fn bid(&mut self, t: u64, v: f64) -> Result<f64> {
        let known = &self.known_values;
        let seen = &self.values;
        self.planner.bid(
            t,
            v,
            self.budget,
            &self.rival_estimate,
            self.version,
            self.recompute_every,
            || match known {
                Some(g) => g.clone(),
                None => ValueMeasure::from_ecdf(seen),
            },
        )
    }

    fn observe(&mut self, feedback: &Feedback) -> Result<()> {
        let Observation::Full { m } = feedback.observation else {
            return Err(Error::Mode(
                "full-feedback policy received a censored observation".into(),
            ));
        };
        if !matches!(self.rival_estimate, RivalEstimate::Empirical(_)) {
            self.rival_estimate = RivalEstimate::Empirical(EmpiricalCdf::new());
        }
        if let RivalEstimate::Empirical(e) = &mut self.rival_estimate {
            e.insert(m)?;
        }
        if self.known_values.is_none() {
            self.values.insert(feedback.value)?;
        }
        self.version += 1;
        self.budget = (self.budget - feedback.payment).max(0.0);
        Ok(())
    }

    fn remaining_budget(&self) -> f64 {
        self.budget
    }
}
