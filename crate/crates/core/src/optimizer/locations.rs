use alloc::vec::Vec;

use super::objective::YMax;
use super::weights::{check_inputs, WeightSolver};
use super::SolverConfig;
use crate::channel::{ChannelParams, DensityEvaluator, DiscreteDistribution, IntensityConstraints};
use crate::error::Result;
use crate::math::climb;

const MAX_PASSES: usize = 400;
const MAX_HALVINGS: usize = 8;

/// A support with optimal weights for its locations.
#[derive(Debug, Clone)]
pub(crate) struct Support {
    pub locations: Vec<f64>,
    pub weights: Vec<f64>,
    pub gamma: f64,
    pub objective: f64,
}

impl Support {
    pub fn optimized(
        locations: Vec<f64>,
        start: &[f64],
        mu: f64,
        params: &ChannelParams,
        constraints: &IntensityConstraints,
        y_max: YMax,
    ) -> Result<Self> {
        let solver = WeightSolver::new(&locations, mu, params, constraints, y_max);
        let (weights, gamma) = solver.solve(start)?;
        let objective = solver.value(&weights);
        Ok(Support { locations, weights, gamma, objective })
    }
}

/// Damped fixed-point iteration on the support: every mass point moves
/// towards the maximizer of `d(x; F) - gamma x` between its neighbours,
/// points that land within `merge_tol * A` of each other are merged, and
/// the weights are re-optimized. Steps that lower the objective are halved.
pub(crate) fn polish(
    mut support: Support,
    mu: f64,
    params: &ChannelParams,
    constraints: &IntensityConstraints,
    config: &SolverConfig,
    y_max: YMax,
) -> Result<Support> {
    let peak = constraints.peak().expect("checked by caller");
    let sep = config.merge_tol * peak;
    let xtol = 1e-10 * peak.max(1.0);
    let probe = 1e-3 * peak;
    let slack_tol = 1e-13 * support.objective.abs().max(1.0);
    for _ in 0..MAX_PASSES {
        let n = support.locations.len();
        if n < 2 {
            break;
        }
        let dist = positive_part(&support)?;
        let eval = DensityEvaluator::new(&dist, params, &config.truncation, peak)?;
        let gamma = support.gamma;
        let locs = &support.locations;
        let mut target = locs.clone();
        for i in 1..n {
            if support.weights[i] <= 0.0 {
                continue;
            }
            let lo = locs[i - 1];
            let hi = if i + 1 < n { locs[i + 1] } else { peak };
            let (x, _) = climb(|x| eval.weighted(x, mu) - gamma * x, locs[i], lo, hi, probe, xtol);
            target[i] = x;
        }
        let moved = target.iter().zip(locs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if moved < xtol {
            break;
        }

        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let trial: Vec<(f64, f64)> =
                locs.iter().zip(&target).zip(&support.weights).map(|((&x, &t), &w)| (x + step * (t - x), w)).collect();
            let (trial_locs, trial_w) = merged(trial, sep);
            let next = Support::optimized(trial_locs, &trial_w, mu, params, constraints, y_max)?;
            if next.objective >= support.objective - slack_tol {
                accepted = Some(next);
                break;
            }
            step *= 0.5;
        }
        match accepted {
            Some(next) => support = next,
            None => break,
        }
        if step * moved < xtol {
            break;
        }
    }
    Ok(support)
}

/// Sorts points and merges neighbours closer than `sep`; the merged point
/// sits at the weighted mean, except that the origin stays pinned.
pub(crate) fn merged(mut pts: Vec<(f64, f64)>, sep: f64) -> (Vec<f64>, Vec<f64>) {
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for (x, w) in pts {
        match out.last_mut() {
            Some(last) if x - last.0 <= sep => {
                let total = last.1 + w;
                if last.0 != 0.0 && total > 0.0 {
                    last.0 = (last.0 * last.1 + x * w) / total;
                }
                last.1 = total;
            }
            _ => out.push((x, w)),
        }
    }
    out.into_iter().unzip()
}

pub(crate) fn positive_part(support: &Support) -> Result<DiscreteDistribution> {
    let pts: Vec<(f64, f64)> =
        support.locations.iter().zip(&support.weights).filter(|&(_, &w)| w > 0.0).map(|(&x, &w)| (x, w)).collect();
    let sum: f64 = pts.iter().map(|p| p.1).sum();
    let pts: Vec<(f64, f64)> = pts.into_iter().map(|(x, w)| (x, w / sum)).collect();
    DiscreteDistribution::from_points(&pts)
}

/// Moves the interior mass points of `dist` to local maximizers of the
/// objective and re-optimizes the weights. The origin stays pinned.
pub fn refine_locations(
    dist: &DiscreteDistribution,
    mu: f64,
    params: &ChannelParams,
    constraints: &IntensityConstraints,
    config: &SolverConfig,
) -> Result<DiscreteDistribution> {
    config.validate()?;
    let peak = check_inputs(dist.locations(), mu, constraints)?;
    let y_max = YMax::covering(params, &config.truncation, peak)?;
    let start = Support::optimized(dist.locations().to_vec(), dist.weights(), mu, params, constraints, y_max)?;
    positive_part(&polish(start, mu, params, constraints, config, y_max)?)
}
