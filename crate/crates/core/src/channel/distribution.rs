use alloc::format;
use alloc::vec::Vec;

use super::IntensityConstraints;
use crate::error::{Error, Result};

const WEIGHT_SUM_TOL: f64 = 1e-12;
const MEAN_TOL: f64 = 1e-9;

/// A finitely supported input law: strictly increasing nonnegative
/// locations with probability weights summing to one.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "RawDistribution", into = "RawDistribution"))]
pub struct DiscreteDistribution {
    locations: Vec<f64>,
    weights: Vec<f64>,
}

#[cfg(feature = "serde")]
#[derive(serde::Serialize, serde::Deserialize)]
struct RawDistribution {
    locations: Vec<f64>,
    weights: Vec<f64>,
}

#[cfg(feature = "serde")]
impl TryFrom<RawDistribution> for DiscreteDistribution {
    type Error = Error;
    fn try_from(r: RawDistribution) -> Result<Self> {
        DiscreteDistribution::new(r.locations, r.weights)
    }
}

#[cfg(feature = "serde")]
impl From<DiscreteDistribution> for RawDistribution {
    fn from(d: DiscreteDistribution) -> Self {
        RawDistribution { locations: d.locations, weights: d.weights }
    }
}

impl DiscreteDistribution {
    pub fn new(locations: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if locations.is_empty() {
            return Err(Error::domain("distribution has no mass points"));
        }
        if locations.len() != weights.len() {
            return Err(Error::domain(format!("{} locations but {} weights", locations.len(), weights.len())));
        }
        for (i, &x) in locations.iter().enumerate() {
            if !x.is_finite() || x < 0.0 {
                return Err(Error::domain(format!("location {i} is {x}, must be finite and >= 0")));
            }
            if i > 0 && x <= locations[i - 1] {
                return Err(Error::domain("locations must be strictly increasing"));
            }
        }
        let mut sum = 0.0;
        for (i, &w) in weights.iter().enumerate() {
            if !(w > 0.0 && w <= 1.0) {
                return Err(Error::domain(format!("weight {i} is {w}, must lie in (0, 1]")));
            }
            sum += w;
        }
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::domain(format!("weights sum to {sum}, not 1")));
        }
        Ok(DiscreteDistribution { locations, weights })
    }

    /// Builds from `(location, weight)` pairs.
    pub fn from_points(points: &[(f64, f64)]) -> Result<Self> {
        Self::new(points.iter().map(|p| p.0).collect(), points.iter().map(|p| p.1).collect())
    }

    /// Point mass at `x`.
    pub fn degenerate(x: f64) -> Result<Self> {
        Self::new(alloc::vec![x], alloc::vec![1.0])
    }

    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }

    pub fn locations(&self) -> &[f64] {
        &self.locations
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.locations.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn mean(&self) -> f64 {
        self.points().map(|(x, p)| x * p).sum()
    }

    pub fn max_location(&self) -> f64 {
        *self.locations.last().expect("non-empty")
    }

    /// Checks the peak and average bounds.
    pub fn check_constraints(&self, constraints: &IntensityConstraints) -> Result<()> {
        if let Some(a) = constraints.peak() {
            if self.max_location() > a {
                return Err(Error::domain(format!("mass point {} exceeds the peak bound {a}", self.max_location())));
            }
        }
        if let Some(e) = constraints.average() {
            let m = self.mean();
            if m > e + MEAN_TOL {
                return Err(Error::domain(format!("mean {m} exceeds the average bound {e}")));
            }
        }
        Ok(())
    }

    /// Mixture `t * self + (1 - t) * other`, with coincident locations merged.
    pub fn mix(&self, other: &Self, t: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::domain(format!("mixing weight {t} outside [0, 1]")));
        }
        let mut pts: Vec<(f64, f64)> = self
            .points()
            .map(|(x, p)| (x, t * p))
            .chain(other.points().map(|(x, p)| (x, (1.0 - t) * p)))
            .filter(|&(_, p)| p > 0.0)
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
        for (x, p) in pts {
            match merged.last_mut() {
                Some(last) if last.0 == x => last.1 += p,
                _ => merged.push((x, p)),
            }
        }
        let sum: f64 = merged.iter().map(|p| p.1).sum();
        for p in merged.iter_mut() {
            p.1 /= sum;
        }
        Self::from_points(&merged)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn validation() {
        assert!(DiscreteDistribution::new(vec![], vec![]).is_err());
        assert!(DiscreteDistribution::new(vec![1.0, 0.0], vec![0.5, 0.5]).is_err());
        assert!(DiscreteDistribution::new(vec![0.0, 1.0], vec![0.5, 0.6]).is_err());
        assert!(DiscreteDistribution::new(vec![0.0, 1.0], vec![1.0, 0.0]).is_err());
        assert!(DiscreteDistribution::new(vec![-1.0], vec![1.0]).is_err());
        let d = DiscreteDistribution::new(vec![0.0, 4.0], vec![0.75, 0.25]).unwrap();
        assert_eq!(d.mean(), 1.0);
    }

    #[test]
    fn constraint_checks() {
        let d = DiscreteDistribution::new(vec![0.0, 4.0], vec![0.75, 0.25]).unwrap();
        assert!(d.check_constraints(&IntensityConstraints::peak_and_average(4.0, 1.0).unwrap()).is_ok());
        assert!(d.check_constraints(&IntensityConstraints::peak_only(3.0).unwrap()).is_err());
        assert!(d.check_constraints(&IntensityConstraints::average_only(0.9).unwrap()).is_err());
    }

    #[test]
    fn mixing_merges_shared_points() {
        let a = DiscreteDistribution::new(vec![0.0, 2.0], vec![0.5, 0.5]).unwrap();
        let b = DiscreteDistribution::new(vec![0.0, 3.0], vec![0.5, 0.5]).unwrap();
        let m = a.mix(&b, 0.5).unwrap();
        assert_eq!(m.locations(), &[0.0, 2.0, 3.0]);
        assert_eq!(m.weights(), &[0.5, 0.25, 0.25]);
    }
}
