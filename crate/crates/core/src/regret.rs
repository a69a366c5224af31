//! Regret against the oracle bidder, the closed-form regret bounds and the
//! two-distribution benchmark example.

use alloc::format;

use crate::auction::{run_auction, AuctionConfig, SimResult};
use crate::distributions::{Cdf, DistributionSpec};
use crate::error::{Error, Result};
use crate::policies::{BiddingPolicy, PolicySpec};
use crate::rng::{RngStream, RIVAL_STREAM, VALUE_STREAM};

/// `R(v, b) = (v - b) F(b)`: expected utility of bidding `b` at value `v`.
pub fn expected_reward(v: f64, b: f64, f: &impl Cdf) -> f64 {
    (v - b) * f.cdf(b)
}

/// Undiscounted regret of `learner` against `oracle` on coupled runs.
///
/// Both runs must share the value stream. Each round contributes
/// `R(v_t, b*_t) - R(v_t, b_t)` with the true `F`; a bidder that has stopped
/// contributes nothing for the remaining rounds.
pub fn coupled_regret(oracle: &SimResult, learner: &SimResult, rival: &impl Cdf) -> Result<f64> {
    let mut regret = 0.0;
    let n = oracle.rounds.len().max(learner.rounds.len());
    for i in 0..n {
        let o = oracle.rounds.get(i);
        let l = learner.rounds.get(i);
        if let (Some(o), Some(l)) = (o, l) {
            if o.v != l.v {
                return Err(Error::Internal(format!(
                    "value streams diverge at round {}",
                    o.t
                )));
            }
        }
        regret += o.map_or(0.0, |r| expected_reward(r.v, r.b, rival));
        regret -= l.map_or(0.0, |r| expected_reward(r.v, r.b, rival));
    }
    Ok(regret)
}

/// Outcome of one replication of a learner against the oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationOutcome {
    pub regret: f64,
    pub oracle: SimResult,
    pub learner: SimResult,
}

/// Runs the oracle and `spec` on `config` with the same seed and returns the
/// regret of the learner.
pub fn measure_replication(
    config: &AuctionConfig,
    spec: &PolicySpec,
    c1: f64,
) -> Result<ReplicationOutcome> {
    let mut oracle = PolicySpec::Oracle.build(config, c1)?;
    let mut learner = spec.build(config, c1)?;
    measure_with(config, oracle.as_mut(), learner.as_mut())
}

/// Same as [`measure_replication`] with ready-made bidders.
pub fn measure_with(
    config: &AuctionConfig,
    oracle: &mut dyn BiddingPolicy,
    learner: &mut dyn BiddingPolicy,
) -> Result<ReplicationOutcome> {
    let oracle = run_auction(config, oracle)?;
    let learner = run_auction(config, learner)?;
    let regret = coupled_regret(&oracle, &learner, &config.rival)?;
    Ok(ReplicationOutcome {
        regret,
        oracle,
        learner,
    })
}

fn check_bound_args(t: u64, lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::Domain(format!(
            "discount factor {lambda} outside (0, 1)"
        )));
    }
    if t < 2 {
        return Err(Error::Domain(format!("horizon {t} below 2")));
    }
    Ok(())
}

fn bound(t: u64, lambda: f64, lead: f64) -> f64 {
    let tf = t as f64;
    let gap = (1.0 - lambda) * (1.0 - lambda);
    let tail = 0.5 * lambda * libm::log(tf / gap) / libm::log(1.0 / lambda);
    (lead * (1.0 + lambda) / gap + 5.0 - lambda) * libm::sqrt(tf) + tail + 1.0
}

/// Regret bound of the full-information bidder with known `F` and `G`
/// (truncation constant 1).
pub fn thm1_bound(t: u64, lambda: f64) -> Result<f64> {
    check_bound_args(t, lambda)?;
    let tf = t as f64;
    Ok(bound(
        t,
        lambda,
        4.0 * libm::sqrt(0.5 * libm::log(2.0 * tf * tf)),
    ))
}

/// Regret bound of the full-feedback learner estimating both `F` and `G`.
pub fn thm2_bound(t: u64, lambda: f64) -> Result<f64> {
    check_bound_args(t, lambda)?;
    let tf = t as f64;
    Ok(bound(
        t,
        lambda,
        6.0 * libm::sqrt(0.5 * libm::log(4.0 * tf * tf)),
    ))
}

/// Reference regret exponent of the censored-feedback learner.
pub const CENSORED_REFERENCE_SLOPE: f64 = 7.0 / 12.0;

pub const EXAMPLE1_MIN_SAMPLES: u64 = 100_000;

/// Monte Carlo estimates for values `U(0.4, 1)` against rival bids `U(0, 0.5)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Example1Report {
    pub samples: u64,
    /// `E[(V - M)^+]`, the per-round utility with no budget and `m` revealed
    /// before bidding.
    pub first_best_per_round: f64,
    /// `E[1{V/2 >= M} V/2]`, the per-round utility of bidding half the value.
    pub half_value_per_round: f64,
    /// Mean payment of the half-value bidder; at most the per-round budget 0.5.
    pub half_value_payment_per_round: f64,
}

impl Example1Report {
    pub fn budget_slack(&self) -> bool {
        self.half_value_payment_per_round <= 0.5
    }
}

/// `E[(V - M)^+] = 0.45 + 1/1800` in closed form.
pub const EXAMPLE1_FIRST_BEST: f64 = 0.45 + 1.0 / 1800.0;
/// `E[V^2 / 2] = 0.26`.
pub const EXAMPLE1_HALF_VALUE: f64 = 0.26;

pub fn example1_report(samples: u64, seed: u64) -> Result<Example1Report> {
    if samples < EXAMPLE1_MIN_SAMPLES {
        return Err(Error::Domain(format!(
            "need at least {EXAMPLE1_MIN_SAMPLES} samples, got {samples}"
        )));
    }
    let values = DistributionSpec::uniform(0.4, 1.0)?;
    let rivals = DistributionSpec::uniform(0.0, 0.5)?;
    let mut vs = RngStream::new(seed, VALUE_STREAM);
    let mut ms = RngStream::new(seed, RIVAL_STREAM);
    let (mut first, mut half, mut pay) = (0.0, 0.0, 0.0);
    for _ in 0..samples {
        let v = values.sample(&mut vs);
        let m = rivals.sample(&mut ms);
        first += (v - m).max(0.0);
        let b = 0.5 * v;
        if b >= m {
            half += v - b;
            pay += b;
        }
    }
    let n = samples as f64;
    Ok(Example1Report {
        samples,
        first_best_per_round: first / n,
        half_value_per_round: half / n,
        half_value_payment_per_round: pay / n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::auction::FeedbackMode;

    #[test]
    fn expected_reward_examples() {
        let unit = DistributionSpec::unit_uniform();
        assert_eq!(expected_reward(1.0, 0.5, &unit), 0.25);
        assert_eq!(expected_reward(0.7, 0.7, &unit), 0.0);
        let f = DistributionSpec::uniform(0.0, 0.5).unwrap();
        assert!((expected_reward(0.8, 0.4, &f) - 0.32).abs() < 1e-15);
    }

    #[test]
    fn bound_example() {
        // lambda = 0.5, T = 1e4 written out term by term
        let want = (4.0 * (0.5 * (2e8f64).ln()).sqrt() * (1.5 / 0.25) + 4.5) * 100.0
            + 0.25 * (1e4f64 / 0.25).log2()
            + 1.0;
        let got = thm1_bound(10_000, 0.5).unwrap();
        assert!((got - want).abs() < 1e-9 * want, "{got} vs {want}");
    }

    #[test]
    fn bounds_order_and_grow() {
        for &lambda in &[0.1, 0.5, 0.9, 0.99] {
            let mut prev = 0.0;
            for t in [2u64, 10, 100, 1000, 100_000] {
                let a = thm1_bound(t, lambda).unwrap();
                let b = thm2_bound(t, lambda).unwrap();
                assert!(b >= a && a > prev);
                prev = a;
            }
        }
        assert!(thm1_bound(100, 0.0).is_err());
        assert!(thm2_bound(100, 1.0).is_err());
        assert!(thm1_bound(1, 0.5).is_err());
    }

    #[test]
    fn example1_closed_forms() {
        // E[(V - M)^+] by a fine midpoint rule on the square
        let n = 2000;
        let mut s = 0.0;
        for i in 0..n {
            let v = 0.4 + 0.6 * (i as f64 + 0.5) / n as f64;
            for j in 0..n {
                let m = 0.5 * (j as f64 + 0.5) / n as f64;
                s += (v - m).max(0.0);
            }
        }
        s /= (n * n) as f64;
        assert!((s - EXAMPLE1_FIRST_BEST).abs() < 1e-6);
        let r = example1_report(200_000, 3).unwrap();
        assert!((r.first_best_per_round - EXAMPLE1_FIRST_BEST).abs() < 0.003);
        assert!((r.half_value_per_round - EXAMPLE1_HALF_VALUE).abs() < 0.003);
        assert!(r.budget_slack());
        assert!(example1_report(10, 3).is_err());
    }

    #[test]
    fn oracle_against_itself() {
        let cfg = AuctionConfig {
            horizon: 200,
            budget: 100.0,
            rival: DistributionSpec::uniform(0.0, 0.5).unwrap(),
            value: DistributionSpec::uniform(0.4, 1.0).unwrap(),
            mode: FeedbackMode::Full,
            lambda: 0.9,
            seed: 8,
            bid_grid_step: 0.01,
        };
        let out = measure_replication(&cfg, &PolicySpec::Oracle, 1.0).unwrap();
        assert_eq!(out.regret, 0.0);
        let cfg = AuctionConfig {
            rival: DistributionSpec::uniform(0.3, 0.8).unwrap(),
            ..cfg
        };
        let out = measure_replication(&cfg, &PolicySpec::HalfValue, 1.0).unwrap();
        assert!(out.regret > 0.0 && out.regret <= cfg.horizon as f64);
    }
}
