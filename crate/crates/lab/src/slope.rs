//! Log-log regression of regret against the horizon.

use fpa_core::Error;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// 95% confidence interval of the slope.
    pub ci_low: f64,
    pub ci_high: f64,
    /// Points that entered the fit.
    pub points: usize,
}

/// Least squares of `ln regret` on `ln T`. Points with non-positive regret
/// are dropped with a warning; at least three must remain.
pub fn fit_slope(points: &[(f64, f64)]) -> Result<SlopeFit> {
    let mut xs = Vec::with_capacity(points.len());
    let mut ys = Vec::with_capacity(points.len());
    for &(t, r) in points {
        if !(t > 0.0) || !(r > 0.0) || !r.is_finite() {
            log::warn!("dropping point (T = {t}, regret = {r}) from the slope fit");
            continue;
        }
        xs.push(t.ln());
        ys.push(r.ln());
    }
    let n = xs.len();
    if n < 3 {
        return Err(Error::Domain(format!("slope fit needs 3 positive points, got {n}")).into());
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Domain("slope fit needs at least two distinct horizons".into()).into());
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let e = y - intercept - slope * x;
            e * e
        })
        .sum();
    let df = nf - 2.0;
    let se = (sse / df / sxx).sqrt();
    let q = StudentsT::new(0.0, 1.0, df)
        .map_err(|e| Error::Internal(e.to_string()))?
        .inverse_cdf(0.975);
    Ok(SlopeFit {
        slope,
        intercept,
        ci_low: slope - q * se,
        ci_high: slope + q * se,
        points: n,
    })
}
