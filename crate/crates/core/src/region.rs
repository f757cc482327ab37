//! Boundary of the rate-equivocation region, traced through the tangent
//! problems `max mu I_B + (1 - mu)(I_B - I_E)` for `mu` in `[0, 1]`.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;

use crate::channel::{ChannelParams, DiscreteDistribution, IntensityConstraints};
use crate::error::{Error, Result};
use crate::optimizer::{solve_from, SolverConfig};

/// Number of points in [`default_mu_grid`].
pub const DEFAULT_GRID_POINTS: usize = 21;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RegionPoint {
    pub mu: f64,
    /// `I_B` at the optimal law, nats/second.
    pub rate_r: f64,
    /// `I_B - I_E` at the optimal law, nats/second.
    pub equivocation_re: f64,
    pub dist: DiscreteDistribution,
}

/// `n` uniform values from 0 to 1 inclusive.
pub fn uniform_mu_grid(n: usize) -> Result<Vec<f64>> {
    match n {
        0 => Err(Error::domain("the mu grid needs at least one point")),
        1 => Ok(alloc::vec![0.0]),
        _ => Ok((0..n).map(|k| if k == n - 1 { 1.0 } else { k as f64 / (n - 1) as f64 }).collect()),
    }
}

pub fn default_mu_grid() -> Vec<f64> {
    uniform_mu_grid(DEFAULT_GRID_POINTS).expect("non-empty")
}

/// Solves every `mu` of the grid in order, each one warm-started from the
/// previous optimum. Errors carry the offending `mu`.
pub fn trace_boundary(
    params: &ChannelParams,
    constraints: &IntensityConstraints,
    mu_grid: &[f64],
    config: &SolverConfig,
) -> Result<Vec<RegionPoint>> {
    check_grid(mu_grid)?;
    let mut points: Vec<RegionPoint> = Vec::with_capacity(mu_grid.len());
    for &mu in mu_grid {
        let start = points.last().map(|p| &p.dist);
        let res = solve_from(mu, params, constraints, config, start).map_err(|e| at_mu(mu, e))?;
        points.push(point(mu, &res));
    }
    Ok(points)
}

/// Solves a single `mu` from the default start; the building block of a
/// cold-start (parallel) trace.
pub fn boundary_point(
    mu: f64,
    params: &ChannelParams,
    constraints: &IntensityConstraints,
    config: &SolverConfig,
) -> Result<RegionPoint> {
    let res = solve_from(mu, params, constraints, config, None).map_err(|e| at_mu(mu, e))?;
    Ok(point(mu, &res))
}

fn point(mu: f64, res: &crate::optimizer::SolveResult) -> RegionPoint {
    RegionPoint { mu, rate_r: res.rates.i_b, equivocation_re: res.rates.f0, dist: res.dist.clone() }
}

fn at_mu(mu: f64, source: Error) -> Error {
    Error::AtMu { mu, source: Box::new(source) }
}

fn check_grid(mu_grid: &[f64]) -> Result<()> {
    if mu_grid.is_empty() {
        return Err(Error::domain("the mu grid is empty"));
    }
    if let Some(&mu) = mu_grid.iter().find(|mu| !(0.0..=1.0).contains(*mu)) {
        return Err(Error::Domain(format!("mu values must lie in [0, 1], got {mu}")));
    }
    if mu_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("the mu grid must be strictly increasing"));
    }
    Ok(())
}

/// Default alignment tolerance for [`detect_tradeoff`]: ten merge scales.
pub fn default_tradeoff_tol(config: &SolverConfig, constraints: &IntensityConstraints) -> f64 {
    10.0 * config.merge_tol * constraints.peak().unwrap_or(1.0)
}

/// True iff the `mu = 0` and `mu = 1` optimal laws differ: each mass point
/// is matched to the nearest one of the other law, and a match that is
/// farther than `tol` in location or weight, or a point left unmatched,
/// counts as a difference.
pub fn detect_tradeoff(points: &[RegionPoint], tol: f64) -> Result<bool> {
    if !(tol >= 0.0) {
        return Err(Error::Domain(format!("tolerance must be >= 0, got {tol}")));
    }
    let find = |mu: f64| {
        points
            .iter()
            .find(|p| p.mu == mu)
            .ok_or_else(|| Error::Domain(format!("the region trace has no point at mu = {mu}")))
    };
    let a = &find(0.0)?.dist;
    let b = &find(1.0)?.dist;
    Ok(!(covers(a, b, tol) && covers(b, a, tol)))
}

/// Every point of `a` has a nearest neighbour in `b` within `tol` in both
/// location and weight, and the matching is one-to-one.
fn covers(a: &DiscreteDistribution, b: &DiscreteDistribution, tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = alloc::vec![false; b.len()];
    for (x, w) in a.points() {
        let (k, _) = b
            .locations()
            .iter()
            .enumerate()
            .map(|(k, &y)| (k, (x - y).abs()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("non-empty");
        if used[k] || (x - b.locations()[k]).abs() > tol || (w - b.weights()[k]).abs() > tol {
            return false;
        }
        used[k] = true;
    }
    true
}
