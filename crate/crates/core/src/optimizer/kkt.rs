use alloc::vec::Vec;

use super::SolverConfig;
use crate::channel::{ChannelParams, DensityEvaluator, DiscreteDistribution, IntensityConstraints};
use crate::error::{Error, Result};

/// One KKT grid abscissa. `slack = [f_mu(F) - gamma E] - [d(x) - gamma x]`
/// where `d` is the weighted density; it is nonnegative everywhere at the
/// optimum and zero on the support.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KktSample {
    pub x: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KktReport {
    pub gamma: f64,
    /// Largest `-slack` over the grid.
    pub max_violation: f64,
    /// Largest `|slack|` over the mass points.
    pub equality_residual: f64,
    pub kkt_tol: f64,
    pub grid: Vec<KktSample>,
}

impl KktReport {
    pub fn passed(&self) -> bool {
        self.max_violation <= self.kkt_tol && self.equality_residual <= self.kkt_tol
    }

    /// Grid abscissa with the largest violation.
    pub fn worst(&self) -> Option<KktSample> {
        self.grid.iter().copied().min_by(|a, b| a.slack.total_cmp(&b.slack))
    }
}

fn peak_of(dist: &DiscreteDistribution, constraints: &IntensityConstraints) -> f64 {
    constraints.peak().unwrap_or_else(|| dist.max_location())
}

fn window(center: f64, half: f64, peak: f64, out: &mut Vec<f64>) {
    let n = SolverConfig::WINDOW_POINTS;
    let step = 2.0 * half / (n - 1) as f64;
    for k in 0..n {
        let x = center - half + step * k as f64;
        if (0.0..=peak).contains(&x) {
            out.push(x);
        }
    }
}

/// Evaluates the KKT slack of `dist` with multiplier `gamma` on the uniform
/// grid plus refinement windows around each mass point and each local
/// maximum of the violation.
pub fn kkt_verify(
    dist: &DiscreteDistribution,
    gamma: f64,
    mu: f64,
    params: &ChannelParams,
    constraints: &IntensityConstraints,
    config: &SolverConfig,
) -> Result<KktReport> {
    config.validate()?;
    if !(gamma >= 0.0) {
        return Err(Error::Domain(alloc::format!("gamma must be >= 0, got {gamma}")));
    }
    let peak = peak_of(dist, constraints);
    let eval = DensityEvaluator::new(dist, params, &config.truncation, peak)?;
    let objective = eval.rates(dist).weighted(mu);
    let level = objective - gamma * constraints.average().unwrap_or_else(|| dist.mean());
    let slack = |x: f64| level - (eval.weighted(x, mu) - gamma * x);

    let n = config.grid_size;
    let h = peak / (n - 1) as f64;
    let uniform: Vec<KktSample> = (0..n)
        .map(|k| {
            let x = if k == n - 1 { peak } else { h * k as f64 };
            KktSample { x, slack: slack(x) }
        })
        .collect();

    let mut extra = Vec::new();
    for &x in dist.locations() {
        window(x, h, peak, &mut extra);
    }
    for k in 0..n {
        let s = uniform[k].slack;
        let left = if k > 0 { uniform[k - 1].slack } else { f64::INFINITY };
        let right = if k + 1 < n { uniform[k + 1].slack } else { f64::INFINITY };
        if s < 0.0 && s <= left && s <= right {
            window(uniform[k].x, h, peak, &mut extra);
        }
    }
    let mut grid = uniform;
    grid.extend(extra.into_iter().map(|x| KktSample { x, slack: slack(x) }));
    grid.sort_by(|a, b| a.x.total_cmp(&b.x));
    grid.dedup_by(|a, b| a.x == b.x);

    let max_violation = grid.iter().map(|s| -s.slack).fold(f64::NEG_INFINITY, f64::max);
    let equality_residual = dist.locations().iter().map(|&x| slack(x).abs()).fold(0.0, f64::max);
    Ok(KktReport { gamma, max_violation, equality_residual, kkt_tol: config.kkt_tol, grid })
}

/// Least-squares multiplier: the slope that makes `d(x_i) - gamma x_i` as
/// constant as possible across the mass points, clamped at zero.
pub fn estimate_gamma(
    dist: &DiscreteDistribution,
    mu: f64,
    params: &ChannelParams,
    constraints: &IntensityConstraints,
    config: &SolverConfig,
) -> Result<f64> {
    if dist.len() < 2 {
        return Err(Error::UndefinedMultiplier);
    }
    if constraints.binding_average().is_none() {
        return Ok(0.0);
    }
    let eval = DensityEvaluator::new(dist, params, &config.truncation, peak_of(dist, constraints))?;
    let xs = dist.locations();
    let ds: Vec<f64> = xs.iter().map(|&x| eval.weighted(x, mu)).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let md = ds.iter().sum::<f64>() / n;
    let (mut sxd, mut sxx) = (0.0, 0.0);
    for (x, d) in xs.iter().zip(&ds) {
        sxd += (x - mx) * (d - md);
        sxx += (x - mx) * (x - mx);
    }
    Ok((sxd / sxx).max(0.0))
}
