//! Laws of the own value `v` and the highest rival bid `m`, both on `[0, 1]`.
//!
//! CDFs are right-continuous: atoms count at the evaluation point, matching the
//! settlement rule that a bid equal to the rival bid wins. Sampling is by
//! inverse transform so one uniform draw maps to one outcome for every law,
//! which is what lets several policies share a single random stream.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{bail, Error, Result};
use crate::rng::RngStream;

/// Tolerance on the total mass of a discrete law.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Anything with a cumulative distribution function on `[0, 1]`.
pub trait Cdf {
    /// `P(X <= x)`.
    fn cdf(&self, x: f64) -> f64;
}

impl<F: Fn(f64) -> f64> Cdf for F {
    fn cdf(&self, x: f64) -> f64 {
        self(x)
    }
}

/// A validated distribution on `[0, 1]`.
///
/// Construct through [`DistributionSpec::uniform`], [`DistributionSpec::atoms`],
/// [`DistributionSpec::piecewise_linear`] or [`DistributionSpec::empirical`];
/// every constructor checks the invariants, so evaluation never fails.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecRepr", into = "SpecRepr")]
pub struct DistributionSpec {
    law: Law,
}

#[derive(Debug, Clone, PartialEq)]
enum Law {
    Uniform {
        lo: f64,
        hi: f64,
    },
    // cumulative masses, last entry exactly 1
    Atoms {
        points: Vec<f64>,
        masses: Vec<f64>,
        cumulative: Vec<f64>,
    },
    PiecewiseLinear {
        xs: Vec<f64>,
        fs: Vec<f64>,
    },
    Empirical {
        values: Vec<f64>,
    },
}

/// Serialized form: a `kind` tag plus the parameters of that kind.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpecRepr {
    Uniform { lo: f64, hi: f64 },
    DiscreteAtoms { points: Vec<f64>, masses: Vec<f64> },
    PiecewiseLinearCdf { knots: Vec<(f64, f64)> },
    EmpiricalStep { values: Vec<f64> },
}

impl TryFrom<SpecRepr> for DistributionSpec {
    type Error = Error;

    fn try_from(repr: SpecRepr) -> Result<Self> {
        match repr {
            SpecRepr::Uniform { lo, hi } => Self::uniform(lo, hi),
            SpecRepr::DiscreteAtoms { points, masses } => Self::atoms(points, masses),
            SpecRepr::PiecewiseLinearCdf { knots } => Self::piecewise_linear(knots),
            SpecRepr::EmpiricalStep { values } => Self::empirical(values),
        }
    }
}

impl From<DistributionSpec> for SpecRepr {
    fn from(spec: DistributionSpec) -> Self {
        match spec.law {
            Law::Uniform { lo, hi } => SpecRepr::Uniform { lo, hi },
            Law::Atoms { points, masses, .. } => SpecRepr::DiscreteAtoms { points, masses },
            Law::PiecewiseLinear { xs, fs } => SpecRepr::PiecewiseLinearCdf {
                knots: xs.into_iter().zip(fs).collect(),
            },
            Law::Empirical { values } => SpecRepr::EmpiricalStep { values },
        }
    }
}

fn in_unit(x: f64) -> bool {
    x.is_finite() && (0.0..=1.0).contains(&x)
}

impl DistributionSpec {
    /// Uniform on `[lo, hi]`; `lo == hi` is a point mass.
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !in_unit(lo) || !in_unit(hi) || lo > hi {
            bail!(
                InvalidSpec,
                "uniform bounds must satisfy 0 <= lo <= hi <= 1, got [{lo}, {hi}]"
            );
        }
        Ok(Self {
            law: Law::Uniform { lo, hi },
        })
    }

    /// The identity CDF on `[0, 1]`, used as the initial estimate of every
    /// unknown law.
    pub fn unit_uniform() -> Self {
        Self {
            law: Law::Uniform { lo: 0.0, hi: 1.0 },
        }
    }

    pub fn point_mass(x: f64) -> Result<Self> {
        Self::atoms(alloc::vec![x], alloc::vec![1.0])
    }

    /// Finitely many atoms at strictly increasing points.
    pub fn atoms(points: Vec<f64>, masses: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.len() != masses.len() {
            bail!(
                InvalidSpec,
                "atoms need equally many points and masses (got {} and {})",
                points.len(),
                masses.len()
            );
        }
        if !points.iter().all(|&p| in_unit(p)) {
            bail!(InvalidSpec, "atom points must lie in [0, 1]");
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            bail!(InvalidSpec, "atom points must be strictly increasing");
        }
        if !masses.iter().all(|&m| m.is_finite() && m > 0.0) {
            bail!(InvalidSpec, "atom masses must be positive");
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            bail!(InvalidSpec, "atom masses sum to {total}, expected 1");
        }
        let mut cumulative: Vec<f64> = masses
            .iter()
            .scan(0.0, |acc, &m| {
                *acc += m;
                Some(*acc)
            })
            .collect();
        *cumulative.last_mut().unwrap() = 1.0;
        Ok(Self {
            law: Law::Atoms {
                points,
                masses,
                cumulative,
            },
        })
    }

    /// Piecewise-linear CDF through `(x, F(x))` knots. A positive value at the
    /// first knot is an atom there; the last knot must reach 1.
    pub fn piecewise_linear(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            bail!(InvalidSpec, "piecewise-linear CDF needs at least one knot");
        }
        let (xs, fs): (Vec<f64>, Vec<f64>) = knots.into_iter().unzip();
        if !xs.iter().chain(fs.iter()).all(|&x| in_unit(x)) {
            bail!(InvalidSpec, "knot coordinates must lie in [0, 1]");
        }
        if xs.windows(2).any(|w| w[0] >= w[1]) {
            bail!(InvalidSpec, "knot abscissae must be strictly increasing");
        }
        if fs.windows(2).any(|w| w[0] > w[1]) {
            bail!(InvalidSpec, "knot CDF values must be nondecreasing");
        }
        if (fs[fs.len() - 1] - 1.0).abs() > MASS_TOLERANCE {
            bail!(InvalidSpec, "last knot must have CDF value 1");
        }
        let mut fs = fs;
        *fs.last_mut().unwrap() = 1.0;
        Ok(Self {
            law: Law::PiecewiseLinear { xs, fs },
        })
    }

    /// Step CDF of a sample; the values are sorted here.
    pub fn empirical(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            bail!(InvalidSpec, "empirical law needs at least one value");
        }
        if !values.iter().all(|&x| in_unit(x)) {
            bail!(InvalidSpec, "empirical values must lie in [0, 1]");
        }
        values.sort_by(f64::total_cmp);
        Ok(Self {
            law: Law::Empirical { values },
        })
    }

    /// True when the law has finitely many atoms and no continuous part.
    pub fn is_discrete(&self) -> bool {
        matches!(self.law, Law::Atoms { .. } | Law::Empirical { .. })
            || matches!(self.law, Law::Uniform { lo, hi } if lo == hi)
    }

    /// `(point, mass)` pairs of a discrete law, `None` for laws with a
    /// continuous part.
    pub fn atom_list(&self) -> Option<Vec<(f64, f64)>> {
        match &self.law {
            Law::Uniform { lo, hi } if lo == hi => Some(alloc::vec![(*lo, 1.0)]),
            Law::Atoms { points, masses, .. } => {
                Some(points.iter().copied().zip(masses.iter().copied()).collect())
            }
            Law::Empirical { values } => {
                let w = 1.0 / values.len() as f64;
                Some(values.iter().map(|&v| (v, w)).collect())
            }
            _ => None,
        }
    }

    /// `inf { x : F(x) > 0 }`, the value returned by `quantile(0)`.
    pub fn support_min(&self) -> f64 {
        match &self.law {
            Law::Uniform { lo, .. } => *lo,
            Law::Atoms { points, .. } => points[0],
            Law::PiecewiseLinear { xs, fs } => {
                let last_zero = fs.iter().rposition(|&f| f <= 0.0);
                match last_zero {
                    Some(k) => xs[k],
                    None => xs[0],
                }
            }
            Law::Empirical { values } => values[0],
        }
    }

    pub fn cdf_eval(&self, x: f64) -> f64 {
        match &self.law {
            Law::Uniform { lo, hi } => {
                if x >= *hi {
                    1.0
                } else if x < *lo {
                    0.0
                } else {
                    (x - lo) / (hi - lo)
                }
            }
            Law::Atoms {
                points, cumulative, ..
            } => {
                let k = points.partition_point(|&p| p <= x);
                if k == 0 {
                    0.0
                } else {
                    cumulative[k - 1]
                }
            }
            Law::PiecewiseLinear { xs, fs } => {
                if x < xs[0] {
                    return 0.0;
                }
                let last = xs.len() - 1;
                if x >= xs[last] {
                    return 1.0;
                }
                let k = xs.partition_point(|&p| p <= x) - 1;
                let w = (x - xs[k]) / (xs[k + 1] - xs[k]);
                fs[k] + w * (fs[k + 1] - fs[k])
            }
            Law::Empirical { values } => {
                values.partition_point(|&p| p <= x) as f64 / values.len() as f64
            }
        }
    }

    /// Generalized inverse `inf { x : F(x) >= p }`, with `quantile(0)` defined
    /// as the support minimum.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("quantile level {p} outside [0, 1]")));
        }
        if p == 0.0 {
            return Ok(self.support_min());
        }
        Ok(match &self.law {
            Law::Uniform { lo, hi } => lo + p * (hi - lo),
            Law::Atoms {
                points, cumulative, ..
            } => {
                let k = cumulative.partition_point(|&c| c < p);
                points[k.min(points.len() - 1)]
            }
            Law::PiecewiseLinear { xs, fs } => {
                if p <= fs[0] {
                    xs[0]
                } else {
                    let k = fs.partition_point(|&f| f < p).min(fs.len() - 1);
                    let w = (p - fs[k - 1]) / (fs[k] - fs[k - 1]);
                    xs[k - 1] + w * (xs[k] - xs[k - 1])
                }
            }
            Law::Empirical { values } => {
                let n = values.len();
                let k = libm::ceil(p * n as f64) as usize;
                values[k.clamp(1, n) - 1]
            }
        })
    }

    /// One draw by inverse transform of a single uniform from `rng`.
    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        self.sample_from_uniform(rng.uniform())
    }

    /// Inverse transform of a uniform `u` in `[0, 1)`.
    pub fn sample_from_uniform(&self, u: f64) -> f64 {
        // u is in [0, 1) by construction of RngStream
        self.quantile(u.clamp(0.0, 1.0)).unwrap_or(0.0)
    }
}

impl Cdf for DistributionSpec {
    fn cdf(&self, x: f64) -> f64 {
        self.cdf_eval(x)
    }
}
