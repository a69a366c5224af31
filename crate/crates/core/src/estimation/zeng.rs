//! Kernel-smoothed product-limit estimate of the rival-bid law from censored
//! rounds.
//!
//! Each round yields `y = min(1 - m, 1 - b)` with an event flag telling
//! whether `1 - m` itself was seen (the round was lost). The survival function
//! of `1 - m` is estimated as
//!
//! `S(x) = (1/t) sum_i prod_{event j, y_j <= x} (1 - K((Z_i - Z_j)/a) / sum_{m : y_m >= y_j} K((Z_i - Z_m)/a))`
//!
//! where `Z_i` stacks the two fitted Cox scores of round `i` and `a` is the
//! bandwidth. `F(b)` is then read off as `S(1 - b)`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::CoxFit;
use crate::distributions::Cdf;
use crate::error::{Error, Result};

/// Length of the history summary `h_t`: previous bid, previous observation,
/// remaining budget fraction, running win rate.
pub const FEATURE_DIM: usize = 4;
pub const ESTIMATE_GRID_STEP: f64 = 1e-3;
pub const ESTIMATE_GRID_POINTS: usize = 1001;

/// One censored round.
#[derive(Debug, Clone, PartialEq)]
pub struct CensoredSample {
    /// `min(1 - m, 1 - b)`, in `[0, 1]`.
    pub y: f64,
    /// `true` when `1 - m` was observed exactly.
    pub event: bool,
    pub features: Vec<f64>,
}

impl CensoredSample {
    /// Builds the sample of a settled round from what the bidder saw: a won
    /// round only reveals that `m <= b`, a lost one reveals `m = o`.
    pub fn from_round(bid: f64, observation: f64, won: bool, features: Vec<f64>) -> Self {
        if won {
            Self {
                y: 1.0 - bid,
                event: false,
                features,
            }
        } else {
            Self {
                y: 1.0 - observation,
                event: true,
                features,
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    /// Standard bivariate normal density.
    #[default]
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    /// `c` in the bandwidth schedule `a_t = c t^(-1/3)`.
    pub bandwidth_constant: f64,
}

impl Default for KernelSpec {
    fn default() -> Self {
        Self {
            kind: KernelKind::Gaussian,
            bandwidth_constant: 1.0,
        }
    }
}

impl KernelSpec {
    pub fn eval(&self, u: [f64; 2]) -> f64 {
        match self.kind {
            KernelKind::Gaussian => gaussian_kernel(u),
        }
    }
}

pub fn gaussian_kernel(u: [f64; 2]) -> f64 {
    libm::exp(-0.5 * (u[0] * u[0] + u[1] * u[1])) / (2.0 * PI)
}

/// `a_t = c t^(-1/3)`: then `t a_t^2 -> inf`, `t a_t^4 -> 0` and
/// `log^2(a_t) / (t a_t^2) -> 0`.
pub fn bandwidth(t: u64, c: f64) -> f64 {
    c / libm::cbrt(t.max(1) as f64)
}

/// Survival function of `1 - m` on the grid `x_k = k / 1000`, `k = 0..=1000`.
#[derive(Debug, Clone, PartialEq)]
pub struct CensoredCdfEstimate {
    values: Vec<f64>,
    sample_count: usize,
    low_confidence: bool,
}

impl CensoredCdfEstimate {
    /// An estimate that is `value` at every grid point.
    pub fn constant(value: f64) -> Self {
        Self {
            values: vec![value.clamp(0.0, 1.0); ESTIMATE_GRID_POINTS],
            sample_count: 0,
            low_confidence: true,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    /// Set when no round in the data had an exact observation.
    pub fn low_confidence(&self) -> bool {
        self.low_confidence
    }

    pub fn grid_point(k: usize) -> f64 {
        k as f64 / (ESTIMATE_GRID_POINTS - 1) as f64
    }

    /// Survival at `x`, taking the grid point at or below `x`.
    pub fn survival(&self, x: f64) -> f64 {
        self.values[grid_index_below(x)]
    }
}

fn grid_index_below(x: f64) -> usize {
    let scaled = libm::floor(x * (ESTIMATE_GRID_POINTS - 1) as f64 + 1e-9);
    if scaled <= 0.0 || scaled.is_nan() {
        0
    } else {
        (scaled as usize).min(ESTIMATE_GRID_POINTS - 1)
    }
}

/// `F(b)` estimated as the survival of `1 - m` at the grid point nearest to
/// `1 - b` from below.
pub fn censored_cdf_eval(est: &CensoredCdfEstimate, b: f64) -> f64 {
    est.survival(1.0 - b)
}

impl Cdf for CensoredCdfEstimate {
    fn cdf(&self, x: f64) -> f64 {
        censored_cdf_eval(self, x)
    }
}

/// Kernel-smoothed product-limit estimate from all `samples`, with the scores
/// `Z_i = (beta'h_i, gamma'h_i)` taken from the two Cox fits. Rounds with equal
/// scores share one product-limit curve.
pub fn zeng_estimate(
    samples: &[CensoredSample],
    beta_fit: &CoxFit,
    gamma_fit: &CoxFit,
    kernel: &KernelSpec,
) -> Result<CensoredCdfEstimate> {
    let t = samples.len();
    if t == 0 {
        return Err(Error::Data(
            "censored estimate needs at least one sample".into(),
        ));
    }
    if !(kernel.bandwidth_constant > 0.0) {
        return Err(Error::Data("bandwidth constant must be positive".into()));
    }
    let mut scores = Vec::with_capacity(t);
    for (i, s) in samples.iter().enumerate() {
        if s.features.len() != beta_fit.coefficients.len()
            || s.features.len() != gamma_fit.coefficients.len()
        {
            return Err(Error::Data(format!(
                "sample {i} feature length does not match the fits"
            )));
        }
        if !s.y.is_finite() {
            return Err(Error::Data(format!("sample {i} has non-finite y")));
        }
        let z = [
            dot(&beta_fit.coefficients, &s.features),
            dot(&gamma_fit.coefficients, &s.features),
        ];
        if !z[0].is_finite() || !z[1].is_finite() {
            return Err(Error::Data(format!("sample {i} has a non-finite score")));
        }
        scores.push(z);
    }
    let inv_a = 1.0 / bandwidth(t as u64, kernel.bandwidth_constant);

    // samples by increasing y; risk_start[p] is the first sorted position
    // whose y equals that of position p
    let mut order: Vec<usize> = (0..t).collect();
    order.sort_by(|&a, &b| samples[a].y.total_cmp(&samples[b].y));
    let ys: Vec<f64> = order.iter().map(|&i| samples[i].y).collect();
    let mut risk_start = vec![0usize; t];
    for p in 1..t {
        risk_start[p] = if ys[p] == ys[p - 1] {
            risk_start[p - 1]
        } else {
            p
        };
    }
    let events: Vec<usize> = (0..t).filter(|&p| samples[order[p]].event).collect();
    let sorted_scores: Vec<[f64; 2]> = order.iter().map(|&i| scores[i]).collect();

    // rounds with identical scores produce identical curves
    let mut by_score: Vec<usize> = (0..t).collect();
    by_score.sort_by(|&a, &b| {
        scores[a][0]
            .total_cmp(&scores[b][0])
            .then(scores[a][1].total_cmp(&scores[b][1]))
    });

    let mut acc = vec![0.0; ESTIMATE_GRID_POINTS];
    let mut weights = vec![0.0; t];
    let mut suffix = vec![0.0; t + 1];
    let mut start = 0;
    while start < t {
        let zi = scores[by_score[start]];
        let mut end = start + 1;
        while end < t && scores[by_score[end]] == zi {
            end += 1;
        }
        let multiplicity = (end - start) as f64;
        start = end;

        for p in 0..t {
            weights[p] = kernel.eval(scaled_diff(zi, sorted_scores[p], inv_a));
        }
        suffix[t] = 0.0;
        for p in (0..t).rev() {
            suffix[p] = suffix[p + 1] + weights[p];
        }

        let mut product = 1.0;
        let mut e = 0;
        for (k, slot) in acc.iter_mut().enumerate() {
            let x = CensoredCdfEstimate::grid_point(k);
            while e < events.len() && ys[events[e]] <= x {
                // tied events share one factor, as in the product-limit estimator
                let y = ys[events[e]];
                let mut hazard = 0.0;
                while e < events.len() && ys[events[e]] == y {
                    let p = events[e];
                    hazard += hazard_ratio(
                        zi,
                        p,
                        risk_start[p],
                        &weights,
                        &suffix,
                        &sorted_scores,
                        kernel,
                        inv_a,
                    )?;
                    e += 1;
                }
                product *= 1.0 - hazard.min(1.0);
            }
            *slot += multiplicity * product;
        }
    }

    let mut values: Vec<f64> = acc.iter().map(|s| (s / t as f64).clamp(0.0, 1.0)).collect();
    // nonincreasing in x, i.e. a cumulative max when read as F(b) with b increasing
    for k in (0..ESTIMATE_GRID_POINTS - 1).rev() {
        if values[k] < values[k + 1] {
            values[k] = values[k + 1];
        }
    }
    Ok(CensoredCdfEstimate {
        values,
        sample_count: t,
        low_confidence: events.is_empty(),
    })
}

fn scaled_diff(a: [f64; 2], b: [f64; 2], inv_a: f64) -> [f64; 2] {
    [(a[0] - b[0]) * inv_a, (a[1] - b[1]) * inv_a]
}

/// `K_ij / sum_{m at risk} K_im` for the event at sorted position `p`.
#[allow(clippy::too_many_arguments)]
fn hazard_ratio(
    zi: [f64; 2],
    p: usize,
    risk_from: usize,
    weights: &[f64],
    suffix: &[f64],
    sorted_scores: &[[f64; 2]],
    kernel: &KernelSpec,
    inv_a: f64,
) -> Result<f64> {
    let w = weights[p];
    let denom = suffix[risk_from];
    if w > 0.0 && denom > 0.0 {
        return Ok((w / denom).min(1.0));
    }
    // every weight in the risk set underflowed: redo the ratio on log scale
    // for the Gaussian, K_im / K_ij = exp(q_ij - q_im) with q = |u|^2 / 2
    let q = |z: [f64; 2]| {
        let u = scaled_diff(zi, z, inv_a);
        0.5 * (u[0] * u[0] + u[1] * u[1])
    };
    match kernel.kind {
        KernelKind::Gaussian => {
            let qj = q(sorted_scores[p]);
            let total: f64 = sorted_scores[risk_from..]
                .iter()
                .map(|&z| libm::exp(qj - q(z)))
                .sum();
            let ratio = 1.0 / total;
            if !ratio.is_finite() || ratio.is_nan() {
                return Err(Error::Internal("degenerate kernel weights".into()));
            }
            Ok(ratio.min(1.0))
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::CoxFit;

    fn zero_fit() -> CoxFit {
        CoxFit::zero(1)
    }

    fn huge_kernel() -> KernelSpec {
        KernelSpec {
            kind: KernelKind::Gaussian,
            bandwidth_constant: 1e6,
        }
    }

    fn s(y: f64, event: bool) -> CensoredSample {
        CensoredSample {
            y,
            event,
            features: vec![1.0],
        }
    }

    #[test]
    fn bandwidth_examples() {
        assert!((bandwidth(1000, 1.0) - 0.1).abs() < 1e-15);
        assert!((bandwidth(8, 0.5) - 0.25).abs() < 1e-15);
        // t a_t^4 = t^(-1/3) strictly decreasing
        let mut prev = f64::INFINITY;
        for t in 1..=1_000_000u64 {
            let a = bandwidth(t, 1.0);
            let v = t as f64 * a * a * a * a;
            assert!(v < prev, "t = {t}");
            prev = v;
        }
    }

    #[test]
    fn kernel_is_symmetric_and_positive() {
        for &u in &[[0.3, -1.2], [5.0, 2.0], [0.0, 0.0]] {
            let k = gaussian_kernel(u);
            assert!(k > 0.0);
            assert_eq!(k, gaussian_kernel([-u[0], -u[1]]));
        }
    }

    #[test]
    fn hand_kaplan_meier() {
        let data = [s(0.2, true), s(0.4, false), s(0.6, true)];
        let est = zeng_estimate(&data, &zero_fit(), &zero_fit(), &huge_kernel()).unwrap();
        assert!((est.survival(0.5) - 2.0 / 3.0).abs() < 1e-12);
        assert!(est.survival(0.7).abs() < 1e-12);
        assert_eq!(est.survival(0.1), 1.0);
        assert!((censored_cdf_eval(&est, 1.0 - 0.5) - 2.0 / 3.0).abs() < 1e-12);
        assert!(!est.low_confidence());
        assert_eq!(est.sample_count(), 3);
    }

    #[test]
    fn tied_events_share_one_factor() {
        let data = [s(0.5, true), s(0.5, true), s(0.5, true), s(0.8, false)];
        let est = zeng_estimate(&data, &zero_fit(), &zero_fit(), &huge_kernel()).unwrap();
        assert!((est.survival(0.6) - 0.25).abs() < 1e-12);
        assert_eq!(est.survival(0.4), 1.0);
    }

    #[test]
    fn no_events_is_identically_one() {
        let data = [s(0.2, false), s(0.4, false)];
        let est = zeng_estimate(&data, &zero_fit(), &zero_fit(), &huge_kernel()).unwrap();
        assert!(est.values().iter().all(|&v| v == 1.0));
        assert!(est.low_confidence());
        for b in [0.0, 0.3, 1.0] {
            assert_eq!(censored_cdf_eval(&est, b), 1.0);
        }
    }

    #[test]
    fn all_events_match_empirical_survival() {
        let ys = [0.05, 0.31, 0.47, 0.5, 0.77, 0.93];
        let data: Vec<_> = ys.iter().map(|&y| s(y, true)).collect();
        let est = zeng_estimate(&data, &zero_fit(), &zero_fit(), &huge_kernel()).unwrap();
        for k in 0..ESTIMATE_GRID_POINTS {
            let x = CensoredCdfEstimate::grid_point(k);
            let emp = ys.iter().filter(|&&y| y > x).count() as f64 / ys.len() as f64;
            assert!((est.values()[k] - emp).abs() < 1e-6, "x = {x}");
        }
    }

    #[test]
    fn output_is_monotone_in_bid() {
        let data: Vec<_> = (0..40)
            .map(|i| CensoredSample {
                y: (i as f64 * 0.37) % 1.0,
                event: i % 3 != 0,
                features: vec![(i % 5) as f64 / 5.0],
            })
            .collect();
        let fit = CoxFit {
            coefficients: vec![2.0],
            ..CoxFit::zero(1)
        };
        let kernel = KernelSpec::default();
        let est = zeng_estimate(&data, &fit, &fit, &kernel).unwrap();
        let mut prev = 0.0;
        for k in 0..=1000 {
            let f = censored_cdf_eval(&est, k as f64 / 1000.0);
            assert!(f >= prev && (0.0..=1.0).contains(&f));
            prev = f;
        }
    }

    #[test]
    fn underflowing_weights_use_log_scale() {
        // scores 40 bandwidths apart: the direct kernel underflows
        let data = vec![
            CensoredSample {
                y: 0.1,
                event: true,
                features: vec![0.0],
            },
            CensoredSample {
                y: 0.3,
                event: true,
                features: vec![1.0],
            },
            CensoredSample {
                y: 0.5,
                event: false,
                features: vec![1.0],
            },
        ];
        let fit = CoxFit {
            coefficients: vec![1e4],
            ..CoxFit::zero(1)
        };
        let est = zeng_estimate(&data, &fit, &fit, &KernelSpec::default()).unwrap();
        assert!(est.values().iter().all(|v| v.is_finite()));
        // round 0's own curve drops to 0 at its event; rounds 1, 2 see only
        // each other after y = 0.1 and halve at 0.3
        assert!((est.survival(0.2) - (0.0 + 1.0 + 1.0) / 3.0).abs() < 1e-9);
        assert!((est.survival(0.4) - (0.0 + 0.5 + 0.5) / 3.0).abs() < 1e-9);
    }

    #[test]
    fn from_round_maps_win_and_loss() {
        let won = CensoredSample::from_round(0.6, 0.6, true, vec![]);
        assert_eq!((won.y, won.event), (1.0 - 0.6, false));
        let lost = CensoredSample::from_round(0.2, 0.7, false, vec![]);
        assert_eq!((lost.y, lost.event), (1.0 - 0.7, true));
    }
}
