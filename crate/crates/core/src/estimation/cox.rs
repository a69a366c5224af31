//! Cox proportional-hazards fits by damped Newton ascent on the partial
//! log-likelihood
//!
//! `l(beta) = (1/t) sum_{target tau} [ beta'h_tau - ln sum_{i : y_i >= y_tau} exp(beta'h_i) ]`.
//!
//! Tied `y` values share one risk set (Breslow).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::linalg::cholesky_solve;
use super::CensoredSample;
use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 100;
const GRADIENT_TOLERANCE: f64 = 1e-8;
const RIDGE: f64 = 1e-8;
const MAX_HALVINGS: usize = 60;

/// Which indicator weights the partial likelihood.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoxTarget {
    /// Rounds where `1 - m` was observed exactly (lost rounds); fits `beta`.
    EventSide,
    /// Rounds censored by the own bid (won rounds); fits `gamma`.
    CensorSide,
}

impl CoxTarget {
    fn selects(self, s: &CensoredSample) -> bool {
        match self {
            CoxTarget::EventSide => s.event,
            CoxTarget::CensorSide => !s.event,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoxFit {
    pub coefficients: Vec<f64>,
    /// Gradient sup-norm at `coefficients` is at most `1e-8`.
    pub converged: bool,
    pub log_likelihood: f64,
    pub iterations: usize,
}

impl CoxFit {
    pub fn zero(dim: usize) -> Self {
        Self {
            coefficients: vec![0.0; dim],
            converged: false,
            log_likelihood: 0.0,
            iterations: 0,
        }
    }
}

struct Prepared<'a> {
    samples: &'a [CensoredSample],
    // indices by decreasing y
    order: Vec<usize>,
    dim: usize,
}

impl<'a> Prepared<'a> {
    fn new(samples: &'a [CensoredSample]) -> Result<Self> {
        let Some(first) = samples.first() else {
            return Err(Error::Data("Cox fit needs at least one sample".into()));
        };
        let dim = first.features.len();
        for (i, s) in samples.iter().enumerate() {
            if s.features.len() != dim {
                return Err(Error::Data(format!(
                    "sample {i} has {} features, expected {dim}",
                    s.features.len()
                )));
            }
            if !s.y.is_finite() || s.features.iter().any(|h| !h.is_finite()) {
                return Err(Error::Data(format!("sample {i} has non-finite entries")));
            }
        }
        let mut order: Vec<usize> = (0..samples.len()).collect();
        order.sort_by(|&a, &b| samples[b].y.total_cmp(&samples[a].y));
        Ok(Self {
            samples,
            order,
            dim,
        })
    }

    /// Log-likelihood, gradient and (optionally) Hessian at `beta`.
    fn evaluate(
        &self,
        target: CoxTarget,
        beta: &[f64],
        hessian: bool,
    ) -> (f64, Vec<f64>, Vec<f64>) {
        let d = self.dim;
        let n = self.samples.len();
        let eta: Vec<f64> = self
            .samples
            .iter()
            .map(|s| dot(beta, &s.features))
            .collect();
        let shift = eta.iter().copied().fold(f64::NEG_INFINITY, f64::max);

        let mut s0 = 0.0;
        let mut s1 = vec![0.0; d];
        let mut s2 = vec![0.0; if hessian { d * d } else { 0 }];
        let mut ll = 0.0;
        let mut grad = vec![0.0; d];
        let mut hess = vec![0.0; if hessian { d * d } else { 0 }];

        let mut p = 0;
        while p < n {
            let y = self.samples[self.order[p]].y;
            let mut q = p;
            while q < n && self.samples[self.order[q]].y == y {
                let i = self.order[q];
                let w = libm::exp(eta[i] - shift);
                let h = &self.samples[i].features;
                s0 += w;
                for a in 0..d {
                    s1[a] += w * h[a];
                    if hessian {
                        for b in 0..d {
                            s2[a * d + b] += w * h[a] * h[b];
                        }
                    }
                }
                q += 1;
            }
            for &i in &self.order[p..q] {
                let s = &self.samples[i];
                if !target.selects(s) {
                    continue;
                }
                ll += eta[i] - (libm::log(s0) + shift);
                for a in 0..d {
                    let mean_a = s1[a] / s0;
                    grad[a] += s.features[a] - mean_a;
                    if hessian {
                        for b in 0..d {
                            hess[a * d + b] -= s2[a * d + b] / s0 - mean_a * s1[b] / s0;
                        }
                    }
                }
            }
            p = q;
        }
        let scale = 1.0 / n as f64;
        ll *= scale;
        grad.iter_mut().for_each(|g| *g *= scale);
        hess.iter_mut().for_each(|h| *h *= scale);
        (ll, grad, hess)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn partial_log_likelihood(
    samples: &[CensoredSample],
    target: CoxTarget,
    beta: &[f64],
) -> Result<f64> {
    let prep = Prepared::new(samples)?;
    check_dim(&prep, beta)?;
    Ok(prep.evaluate(target, beta, false).0)
}

pub fn partial_gradient(
    samples: &[CensoredSample],
    target: CoxTarget,
    beta: &[f64],
) -> Result<Vec<f64>> {
    let prep = Prepared::new(samples)?;
    check_dim(&prep, beta)?;
    Ok(prep.evaluate(target, beta, false).1)
}

/// Row-major `d x d` Hessian of the partial log-likelihood.
pub fn partial_hessian(
    samples: &[CensoredSample],
    target: CoxTarget,
    beta: &[f64],
) -> Result<Vec<f64>> {
    let prep = Prepared::new(samples)?;
    check_dim(&prep, beta)?;
    Ok(prep.evaluate(target, beta, true).2)
}

fn check_dim(prep: &Prepared<'_>, beta: &[f64]) -> Result<()> {
    if beta.len() != prep.dim {
        return Err(Error::Data(format!(
            "coefficient vector has length {}, features have {}",
            beta.len(),
            prep.dim
        )));
    }
    Ok(())
}

/// Maximizes the partial log-likelihood for `target`.
///
/// Fewer than two samples carrying the target indicator yield the zero vector
/// with `converged = false`.
pub fn cox_fit(samples: &[CensoredSample], target: CoxTarget) -> Result<CoxFit> {
    let prep = Prepared::new(samples)?;
    let d = prep.dim;
    let mut beta = vec![0.0; d];
    let hits = samples.iter().filter(|s| target.selects(s)).count();
    if hits < 2 {
        let (ll, _, _) = prep.evaluate(target, &beta, false);
        return Ok(CoxFit {
            log_likelihood: ll,
            ..CoxFit::zero(d)
        });
    }

    let mut iterations = 0;
    let (mut ll, mut grad, mut hess) = prep.evaluate(target, &beta, true);
    while iterations < MAX_ITERATIONS && sup_norm(&grad) > GRADIENT_TOLERANCE {
        iterations += 1;
        let mut neg_h: Vec<f64> = hess.iter().map(|h| -h).collect();
        for a in 0..d {
            neg_h[a * d + a] += RIDGE;
        }
        let dir = cholesky_solve(&neg_h, &grad).unwrap_or_else(|| grad.clone());

        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let trial: Vec<f64> = beta.iter().zip(&dir).map(|(b, s)| b + step * s).collect();
            let (trial_ll, _, _) = prep.evaluate(target, &trial, false);
            if trial_ll.is_finite() && trial_ll >= ll - 1e-13 * (1.0 + ll.abs()) {
                accepted = Some(trial);
                break;
            }
            step *= 0.5;
        }
        let Some(next) = accepted else { break };
        beta = next;
        (ll, grad, hess) = prep.evaluate(target, &beta, true);
    }
    Ok(CoxFit {
        converged: sup_norm(&grad) <= GRADIENT_TOLERANCE,
        coefficients: beta,
        log_likelihood: ll,
        iterations,
    })
}
