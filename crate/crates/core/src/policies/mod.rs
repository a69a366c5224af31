//! Bidding policies and the configuration that builds them.

mod baseline;
mod censored;
mod full;
mod planner;

use alloc::boxed::Box;
use alloc::format;

use serde::{Deserialize, Serialize};

use crate::auction::{AuctionConfig, Feedback, FeedbackMode};
use crate::distributions::Cdf;
use crate::dp::DpConfig;
use crate::error::{Error, Result};
use crate::estimation::{CensoredCdfEstimate, EmpiricalCdf, KernelSpec};

pub use baseline::{HalfValuePolicy, OraclePolicy};
pub use censored::{CensoredPolicy, PhaseSchedule};
pub use full::FullFeedbackPolicy;

/// A bidder driven by the auction engine.
///
/// The engine calls `bid` then `observe` once per round, in round order,
/// and never shows the rival bid of a won round under censored feedback.
pub trait BiddingPolicy {
    fn name(&self) -> &str;

    /// Bid for round `t` given the value `v`; must lie in
    /// `[0, min(1, remaining_budget())]`.
    fn bid(&mut self, t: u64, v: f64) -> Result<f64>;

    fn observe(&mut self, feedback: &Feedback) -> Result<()>;

    fn remaining_budget(&self) -> f64;

    fn halted(&self) -> bool {
        self.remaining_budget() <= 0.0
    }
}

/// Current belief about the rival-bid CDF.
#[derive(Debug, Clone, PartialEq)]
pub enum RivalEstimate {
    /// `F(b) = b`, used before any data arrives.
    Prior,
    Empirical(EmpiricalCdf),
    Censored(CensoredCdfEstimate),
}

impl Cdf for RivalEstimate {
    fn cdf(&self, x: f64) -> f64 {
        match self {
            RivalEstimate::Prior => x.clamp(0.0, 1.0),
            RivalEstimate::Empirical(e) => e.eval(x),
            RivalEstimate::Censored(e) => e.cdf(x),
        }
    }
}

fn default_recompute_every() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicySpec {
    /// Knows both laws and solves the truncated recursion.
    Oracle,
    /// Learns `F` from revealed rival bids.
    FullFeedback {
        /// Use the true value law instead of its empirical estimate.
        #[serde(default)]
        known_value_law: bool,
        /// Rounds between re-solves of the value table.
        #[serde(default = "default_recompute_every")]
        recompute_every: u64,
    },
    /// Learns `F` from censored observations in doubling phases.
    Censored {
        #[serde(default)]
        kernel: KernelSpec,
    },
    /// Bids `min(v / 2, B_t)`.
    HalfValue,
}

impl PolicySpec {
    pub fn label(&self) -> &'static str {
        match self {
            PolicySpec::Oracle => "oracle",
            PolicySpec::FullFeedback { .. } => "full_feedback",
            PolicySpec::Censored { .. } => "censored",
            PolicySpec::HalfValue => "half_value",
        }
    }

    pub fn validate(&self, auction: &AuctionConfig) -> Result<()> {
        match self {
            PolicySpec::FullFeedback {
                recompute_every, ..
            } => {
                if *recompute_every == 0 {
                    return Err(Error::Config("recompute_every must be at least 1".into()));
                }
                if auction.mode != FeedbackMode::Full {
                    return Err(Error::Config(
                        "full_feedback policy needs full feedback".into(),
                    ));
                }
            }
            PolicySpec::Censored { kernel } => {
                if !(kernel.bandwidth_constant > 0.0 && kernel.bandwidth_constant.is_finite()) {
                    return Err(Error::Config(format!(
                        "bandwidth constant {} must be positive",
                        kernel.bandwidth_constant
                    )));
                }
            }
            PolicySpec::Oracle | PolicySpec::HalfValue => {}
        }
        Ok(())
    }

    /// A fresh bidder for one run of `auction`.
    pub fn build(&self, auction: &AuctionConfig, c1: f64) -> Result<Box<dyn BiddingPolicy>> {
        self.validate(auction)?;
        let dp = DpConfig::new(auction.lambda, c1, auction.bid_grid_step)?;
        Ok(match self {
            PolicySpec::Oracle => Box::new(OraclePolicy::new(
                auction.rival.clone(),
                &auction.value,
                auction.budget,
                dp,
            )),
            PolicySpec::FullFeedback {
                known_value_law,
                recompute_every,
            } => {
                let value = known_value_law.then(|| auction.value.clone());
                Box::new(FullFeedbackPolicy::new(
                    auction.budget,
                    dp,
                    value,
                    *recompute_every,
                ))
            }
            PolicySpec::Censored { kernel } => {
                Box::new(CensoredPolicy::new(auction.budget, dp, *kernel))
            }
            PolicySpec::HalfValue => Box::new(HalfValuePolicy::new(auction.budget)),
        })
    }
}
