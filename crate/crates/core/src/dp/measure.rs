use alloc::vec::Vec;

use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::estimation::EmpiricalCdf;

/// Quantile nodes used for the expectation over a law with a continuous part.
pub const QUADRATURE_NODES: usize = 200;

/// A finite law of the own value `v` used to take `E_v` in the recursion.
///
/// Discrete and empirical laws are used exactly; laws with a continuous part
/// are replaced by equal-mass atoms at the midpoint quantiles
/// `(i + 1/2) / nodes`.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueMeasure {
    values: Vec<f64>,
    masses: Vec<f64>,
    // prefix sums of mass and of mass * value; entry k covers atoms [0, k)
    cum_mass: Vec<f64>,
    cum_moment: Vec<f64>,
}

impl ValueMeasure {
    pub fn from_atoms(mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidSpec(
                "value measure needs at least one atom".into(),
            ));
        }
        if atoms.iter().any(|&(v, m)| !v.is_finite() || !(m >= 0.0)) {
            return Err(Error::InvalidSpec(
                "value atoms must be finite with nonnegative mass".into(),
            ));
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut values = Vec::with_capacity(atoms.len());
        let mut masses: Vec<f64> = Vec::with_capacity(atoms.len());
        for (v, m) in atoms {
            if values.last() == Some(&v) {
                *masses.last_mut().unwrap() += m;
            } else {
                values.push(v);
                masses.push(m);
            }
        }
        let mut cum_mass = Vec::with_capacity(values.len() + 1);
        let mut cum_moment = Vec::with_capacity(values.len() + 1);
        let (mut a, mut b) = (0.0, 0.0);
        cum_mass.push(0.0);
        cum_moment.push(0.0);
        for (&v, &m) in values.iter().zip(&masses) {
            a += m;
            b += m * v;
            cum_mass.push(a);
            cum_moment.push(b);
        }
        Ok(Self {
            values,
            masses,
            cum_mass,
            cum_moment,
        })
    }

    pub fn from_spec(spec: &DistributionSpec) -> Self {
        Self::from_spec_with_nodes(spec, QUADRATURE_NODES)
    }

    pub fn from_spec_with_nodes(spec: &DistributionSpec, nodes: usize) -> Self {
        let atoms = spec.atom_list().unwrap_or_else(|| {
            let w = 1.0 / nodes as f64;
            (0..nodes)
                .map(|i| {
                    let p = (i as f64 + 0.5) * w;
                    (spec.quantile(p).unwrap_or(p), w)
                })
                .collect()
        });
        Self::from_atoms(atoms).expect("validated specs yield valid atoms")
    }

    /// Exact atoms of an empirical CDF; the unit-uniform prior when empty.
    pub fn from_ecdf(ecdf: &EmpiricalCdf) -> Self {
        if ecdf.is_empty() {
            return Self::uniform_prior();
        }
        let w = 1.0 / ecdf.count() as f64;
        Self::from_atoms(ecdf.values().iter().map(|&v| (v, w)).collect())
            .expect("empirical values are finite")
    }

    pub fn uniform_prior() -> Self {
        Self::from_spec(&DistributionSpec::unit_uniform())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().copied().zip(self.masses.iter().copied())
    }

    pub fn mean(&self) -> f64 {
        self.cum_moment[self.values.len()] / self.cum_mass[self.values.len()]
    }

    /// Number of atoms strictly below `x`.
    pub(crate) fn count_below(&self, x: f64) -> usize {
        self.values.partition_point(|&v| v < x)
    }

    /// `(mass, sum of mass * value)` over atoms with index in `[lo, hi)`.
    pub(crate) fn slice_sums(&self, lo: usize, hi: usize) -> (f64, f64) {
        (
            self.cum_mass[hi] - self.cum_mass[lo],
            self.cum_moment[hi] - self.cum_moment[lo],
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_of_uniform() {
        let m = ValueMeasure::from_spec(&DistributionSpec::uniform(0.4, 1.0).unwrap());
        assert_eq!(m.len(), QUADRATURE_NODES);
        assert!((m.mean() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn merges_duplicate_atoms() {
        let m =
            ValueMeasure::from_atoms(alloc::vec![(0.5, 0.25), (0.2, 0.5), (0.5, 0.25)]).unwrap();
        assert_eq!(m.len(), 2);
        assert!((m.mean() - (0.1 + 0.25)).abs() < 1e-15);
        assert_eq!(m.count_below(0.5), 1);
        let (mass, moment) = m.slice_sums(1, 2);
        assert!((mass - 0.5).abs() < 1e-15 && (moment - 0.25).abs() < 1e-15);
    }

    #[test]
    fn empty_ecdf_is_uniform_prior() {
        assert_eq!(
            ValueMeasure::from_ecdf(&EmpiricalCdf::new()),
            ValueMeasure::uniform_prior()
        );
    }
}
