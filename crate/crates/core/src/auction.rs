//! The repeated first-price auction: settlement, feedback and the round loop.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::policies::BiddingPolicy;
use crate::rng::{RngStream, RIVAL_STREAM, VALUE_STREAM};

/// Slack allowed between a bid and the remaining budget before the engine
/// treats it as overspending.
pub const BUDGET_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeedbackMode {
    /// The highest rival bid is revealed every round.
    Full,
    /// Only `max(b, m)` is revealed.
    Censored,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settlement {
    pub won: bool,
    /// `(v - b) 1{b >= m}`; negative when the bidder overbids her value.
    pub utility: f64,
    /// `b 1{b >= m}`.
    pub payment: f64,
}

/// First-price settlement; ties go to the bidder.
pub fn settle_round(v: f64, b: f64, m: f64) -> Settlement {
    let won = b >= m;
    Settlement {
        won,
        utility: if won { v - b } else { 0.0 },
        payment: if won { b } else { 0.0 },
    }
}

/// What the bidder learns about the rival bid after a round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observation {
    Full {
        m: f64,
    },
    /// `o = max(b, m)`; equals `b` on every won round.
    Censored {
        o: f64,
    },
}

impl Observation {
    /// `max(b, m)` as seen by the bidder.
    pub fn highest_bid(&self, bid: f64) -> f64 {
        match *self {
            Observation::Full { m } => m.max(bid),
            Observation::Censored { o } => o,
        }
    }
}

pub fn make_observation(mode: FeedbackMode, b: f64, m: f64) -> Observation {
    match mode {
        FeedbackMode::Full => Observation::Full { m },
        FeedbackMode::Censored => Observation::Censored { o: b.max(m) },
    }
}

/// Everything a policy is shown after round `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Feedback {
    pub t: u64,
    pub value: f64,
    pub bid: f64,
    pub won: bool,
    pub utility: f64,
    pub payment: f64,
    pub observation: Observation,
}

/// Full trace of one round, including the hidden rival bid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub t: u64,
    pub v: f64,
    pub b: f64,
    pub m: f64,
    pub won: bool,
    pub r: f64,
    pub c: f64,
    pub o: f64,
    pub remaining_budget: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuctionConfig {
    pub horizon: u64,
    pub budget: f64,
    /// Law `F` of the highest rival bid.
    pub rival: DistributionSpec,
    /// Law `G` of the own value.
    pub value: DistributionSpec,
    pub mode: FeedbackMode,
    pub lambda: f64,
    pub seed: u64,
    /// Smallest positive bid of the grid bidders; the run stops once the
    /// remaining budget is below it and `F(0) = 0`.
    #[serde(default = "default_grid_step")]
    pub bid_grid_step: f64,
}

fn default_grid_step() -> f64 {
    0.01
}

impl AuctionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::Config("horizon must be at least 1".into()));
        }
        if !(self.budget > 0.0 && self.budget.is_finite()) {
            return Err(Error::Config(format!(
                "budget must be positive, got {}",
                self.budget
            )));
        }
        if !(0.0..1.0).contains(&self.lambda) {
            return Err(Error::Config(format!(
                "discount factor {} outside [0, 1)",
                self.lambda
            )));
        }
        if !(self.bid_grid_step > 0.0 && self.bid_grid_step <= 1.0) {
            return Err(Error::Config(format!(
                "grid step {} outside (0, 1]",
                self.bid_grid_step
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub rounds: Vec<RoundRecord>,
    /// First round in which the bidder no longer takes part; `T + 1` when
    /// she bids through the horizon.
    pub stop_time: u64,
    pub total_utility: f64,
    /// `sum_t lambda^(t-1) r_t`.
    pub discounted_utility: f64,
}

impl SimResult {
    pub fn total_payment(&self) -> f64 {
        self.rounds.iter().map(|r| r.c).sum()
    }
}

/// Runs `policy` for up to `config.horizon` rounds.
///
/// `v_t` and `m_t` come from two seeded uniform streams by inverse transform,
/// one draw each per round, so every policy run on the same config sees the
/// same values and rival bids.
pub fn run_auction(config: &AuctionConfig, policy: &mut dyn BiddingPolicy) -> Result<SimResult> {
    config.validate()?;
    let mut values = RngStream::new(config.seed, VALUE_STREAM);
    let mut rivals = RngStream::new(config.seed, RIVAL_STREAM);
    let rival_atomless_at_zero = config.rival.cdf_eval(0.0) == 0.0;

    let mut remaining = config.budget;
    let mut rounds = Vec::with_capacity(config.horizon as usize);
    let mut total = 0.0;
    let mut discounted = 0.0;
    let mut discount = 1.0;
    let mut stop_time = config.horizon + 1;

    for t in 1..=config.horizon {
        let v = config.value.sample(&mut values);
        let m = config.rival.sample(&mut rivals);

        let raw = policy.bid(t, v)?;
        if !(0.0..=1.0).contains(&raw) {
            return Err(Error::ContractViolation {
                round: t,
                detail: format!("bid {raw} outside [0, 1]"),
            });
        }
        if raw > remaining + BUDGET_SLACK {
            return Err(Error::ContractViolation {
                round: t,
                detail: format!("bid {raw} exceeds remaining budget {remaining}"),
            });
        }
        let b = raw.min(remaining);

        let s = settle_round(v, b, m);
        remaining -= s.payment;
        if remaining < BUDGET_SLACK {
            remaining = 0.0;
        }
        total += s.utility;
        discounted += discount * s.utility;
        discount *= config.lambda;

        let observation = make_observation(config.mode, b, m);
        rounds.push(RoundRecord {
            t,
            v,
            b,
            m,
            won: s.won,
            r: s.utility,
            c: s.payment,
            o: b.max(m),
            remaining_budget: remaining,
        });
        policy.observe(&Feedback {
            t,
            value: v,
            bid: b,
            won: s.won,
            utility: s.utility,
            payment: s.payment,
            observation,
        })?;

        let exhausted = remaining <= 0.0
            || (remaining < config.bid_grid_step - BUDGET_SLACK && rival_atomless_at_zero);
        if exhausted {
            stop_time = t + 1;
            break;
        }
    }
    Ok(SimResult {
        rounds,
        stop_time,
        total_utility: total,
        discounted_utility: discounted,
    })
}
