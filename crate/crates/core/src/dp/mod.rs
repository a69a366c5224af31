//! Finite-truncation dynamic programming for budgeted bidding.
//!
//! With `W(B, tau)` the value of holding budget `B` at round `tau`,
//!
//! `Q_v(B, tau, b) = [(v - b) + lambda W(B - b, tau + 1)] F(b) + lambda W(B, tau + 1) (1 - F(b))`
//!
//! and `W(B, tau) = E_v[max_b Q_v(B, tau, b)]`. The recursion runs backwards
//! from a base row at `t0`, the first round far enough ahead that its
//! discounted weight `lambda^(t0 - t) / (1 - lambda)` drops below `c1 / sqrt(t)`.
//!
//! Bids and budgets share one grid of step `1/n`, so `B - b` stays on the grid.
//! The recursion is time-homogeneous: row `j` of a table (`j = t0 - tau`)
//! depends only on `j`, the base row and the two laws.

mod enumerate;
mod measure;
mod table;

use alloc::format;

use serde::{Deserialize, Serialize};

use crate::distributions::Cdf;
use crate::error::{bail, Error, Result};

pub use enumerate::{decision_nodes, enumerate_policy_value, TinyInstance, ENUMERATION_LIMIT};
pub use measure::{ValueMeasure, QUADRATURE_NODES};
pub use table::{
    argmax_bid, optimal_bid, solve_value_table, solve_value_table_with, BaseRow, ValueTable,
};

/// Two `Q` values closer than this count as tied; ties go to the smaller bid.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DpConfig {
    /// Discount factor in `[0, 1)`; `0` reduces bidding to one-shot
    /// maximization of `(v - b) F(b)`.
    pub lambda: f64,
    /// Truncation constant of the `t0` rule.
    pub c1: f64,
    /// Step of the shared bid/budget grid; `1 / step` must be an integer.
    pub bid_grid_step: f64,
}

impl Default for DpConfig {
    fn default() -> Self {
        Self {
            lambda: 0.9,
            c1: 1.0,
            bid_grid_step: 0.01,
        }
    }
}

impl DpConfig {
    pub fn new(lambda: f64, c1: f64, bid_grid_step: f64) -> Result<Self> {
        let cfg = Self {
            lambda,
            c1,
            bid_grid_step,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.lambda) {
            bail!(
                InvalidSpec,
                "discount factor {} outside [0, 1)",
                self.lambda
            );
        }
        if !(self.c1 > 0.0 && self.c1.is_finite()) {
            bail!(InvalidSpec, "c1 must be positive, got {}", self.c1);
        }
        let step = self.bid_grid_step;
        if !(step > 0.0 && step <= 1.0) {
            bail!(InvalidSpec, "grid step {step} outside (0, 1]");
        }
        let n = libm::round(1.0 / step);
        if (n * step - 1.0).abs() > 1e-9 {
            bail!(InvalidSpec, "grid step {step} does not divide 1");
        }
        Ok(())
    }

    /// `n`, the number of grid steps in one unit; bids are `k / n`, `k = 0..=n`.
    pub fn grid_steps(&self) -> usize {
        libm::round(1.0 / self.bid_grid_step) as usize
    }

    pub fn grid_value(&self, k: usize) -> f64 {
        k as f64 / self.grid_steps() as f64
    }

    /// Largest grid index whose value does not exceed `budget`.
    pub fn budget_index(&self, budget: f64) -> usize {
        let x = libm::floor(budget * self.grid_steps() as f64 + 1e-9);
        if x > 0.0 {
            x as usize
        } else {
            0
        }
    }
}

/// Smallest `t0 >= t` with `lambda^(t0 - t) / (1 - lambda) < c1 / sqrt(t)`;
/// `t` itself when `lambda = 0`.
pub fn horizon_t0(t: u64, lambda: f64, c1: f64) -> u64 {
    if lambda <= 0.0 {
        return t;
    }
    let threshold = c1 / libm::sqrt(t.max(1) as f64);
    let mut weight = 1.0 / (1.0 - lambda);
    let mut t0 = t;
    while weight >= threshold {
        weight *= lambda;
        t0 += 1;
    }
    t0
}

/// `Q_v(B, tau, b)` for one bid, given the next-round values on a win
/// (`W(B - b)`) and on a loss (`W(B)`).
pub fn q_value(
    v: f64,
    budget: f64,
    b: f64,
    f_hat: &impl Cdf,
    next_win: f64,
    next_lose: f64,
    lambda: f64,
) -> Result<f64> {
    if b > budget + 1e-12 {
        return Err(Error::Infeasible { bid: b, budget });
    }
    if !(0.0..=1.0).contains(&b) {
        return Err(Error::Domain(format!("bid {b} outside [0, 1]")));
    }
    Ok(q_from_parts(
        v,
        b,
        f_hat.cdf(b),
        next_win,
        next_lose,
        lambda,
    ))
}

#[inline]
pub(crate) fn q_from_parts(
    v: f64,
    b: f64,
    fb: f64,
    next_win: f64,
    next_lose: f64,
    lambda: f64,
) -> f64 {
    ((v - b) + lambda * next_win) * fb + lambda * next_lose * (1.0 - fb)
}
