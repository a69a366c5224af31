use alloc::format;
use alloc::vec::Vec;

use crate::distributions::Cdf;
use crate::error::{Error, Result};

/// Empirical CDF `x -> (1/t) #{observations <= x}` over an insert-only sample.
///
/// An empty sample evaluates to 0 everywhere; callers that need a prior
/// before the first observation keep one separately.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_values(values: &[f64]) -> Result<Self> {
        let mut e = Self::new();
        for &x in values {
            e.insert(x)?;
        }
        Ok(e)
    }

    pub fn insert(&mut self, x: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("observation {x} outside [0, 1]")));
        }
        let at = self.sorted.partition_point(|&p| p <= x);
        self.sorted.insert(at, x);
        Ok(())
    }

    pub fn count(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.sorted
    }

    pub fn eval(&self, x: f64) -> f64 {
        if self.sorted.is_empty() {
            return 0.0;
        }
        self.sorted.partition_point(|&p| p <= x) as f64 / self.sorted.len() as f64
    }

    /// `sup_x |self(x) - f(x)|`, checking both sides of every jump. Left
    /// limits of `f` are read one ulp below each observation.
    pub fn sup_distance(&self, f: &impl Cdf) -> f64 {
        let n = self.sorted.len();
        if n == 0 {
            return 0.0;
        }
        let nf = n as f64;
        let mut worst: f64 = 0.0;
        let mut i = 0;
        while i < n {
            let x = self.sorted[i];
            let mut j = i;
            while j < n && self.sorted[j] == x {
                j += 1;
            }
            let below = i as f64 / nf;
            let at = j as f64 / nf;
            worst = worst
                .max((below - f.cdf(libm::nextafter(x, f64::NEG_INFINITY))).abs())
                .max((at - f.cdf(x)).abs());
            i = j;
        }
        // outside the sample range the empirical CDF is 0 or 1
        worst
            .max(f.cdf(libm::nextafter(self.sorted[0], f64::NEG_INFINITY)))
            .max(1.0 - f.cdf(self.sorted[n - 1]))
    }
}

impl Cdf for EmpiricalCdf {
    fn cdf(&self, x: f64) -> f64 {
        self.eval(x)
    }
}

/// Uniform deviation radius `sqrt(ln(2/delta)/2) / sqrt(t)` that an empirical
/// CDF of `t` i.i.d. draws stays within with probability `1 - delta`.
pub fn dkw_radius(t: u64, delta: f64) -> Result<f64> {
    if t == 0 {
        return Err(Error::Domain("sample count must be positive".into()));
    }
    if !(delta > 0.0 && delta <= 2.0) {
        return Err(Error::Domain(format!(
            "confidence level {delta} outside (0, 2]"
        )));
    }
    Ok(libm::sqrt(0.5 * libm::log(2.0 / delta)) / libm::sqrt(t as f64))
}
