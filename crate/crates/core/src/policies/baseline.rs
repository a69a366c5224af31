use super::planner::Planner;
use super::BiddingPolicy;
use crate::auction::Feedback;
use crate::distributions::DistributionSpec;
use crate::dp::{DpConfig, ValueMeasure};
use crate::error::Result;

/// Bids with the true `F` and `G`; the benchmark regret is measured against.
#[derive(Debug, Clone)]
pub struct OraclePolicy {
    rival: DistributionSpec,
    values: ValueMeasure,
    planner: Planner,
    budget: f64,
}

impl OraclePolicy {
    pub fn new(
        rival: DistributionSpec,
        value: &DistributionSpec,
        budget: f64,
        dp: DpConfig,
    ) -> Self {
        Self {
            rival,
            values: ValueMeasure::from_spec(value),
            planner: Planner::new(dp),
            budget,
        }
    }

    pub fn dp_config(&self) -> &DpConfig {
        self.planner.config()
    }
}

impl BiddingPolicy for OraclePolicy {
    fn name(&self) -> &str {
        "oracle"
    }

    fn bid(&mut self, t: u64, v: f64) -> Result<f64> {
        let values = &self.values;
        self.planner
            .bid(t, v, self.budget, &self.rival, 0, 1, || values.clone())
    }

    fn observe(&mut self, feedback: &Feedback) -> Result<()> {
        self.budget = (self.budget - feedback.payment).max(0.0);
        Ok(())
    }

    fn remaining_budget(&self) -> f64 {
        self.budget
    }
}

/// Bids half the value, capped by the budget.
#[derive(Debug, Clone)]
pub struct HalfValuePolicy {
    budget: f64,
}

impl HalfValuePolicy {
    pub fn new(budget: f64) -> Self {
        Self { budget }
    }
}

impl BiddingPolicy for HalfValuePolicy {
    fn name(&self) -> &str {
        "half_value"
    }

    fn bid(&mut self, _t: u64, v: f64) -> Result<f64> {
        Ok((0.5 * v).clamp(0.0, 1.0).min(self.budget))
    }

    fn observe(&mut self, feedback: &Feedback) -> Result<()> {
        self.budget = (self.budget - feedback.payment).max(0.0);
        Ok(())
    }

    fn remaining_budget(&self) -> f64 {
        self.budget
    }
}
