use alloc::boxed::Box;
use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use super::kkt::{kkt_verify, KktReport};
use super::locations::{polish, positive_part, Support};
use super::objective::YMax;
use super::SolverConfig;
use crate::channel::{ChannelParams, DensityEvaluator, DiscreteDistribution, IntensityConstraints, Rates};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolveResult {
    pub dist: DiscreteDistribution,
    /// `f_mu(dist)`, nats/second.
    pub objective: f64,
    pub gamma: f64,
    pub kkt: KktReport,
    /// Outer (support escalation) iterations used.
    pub iterations: usize,
    pub mu: f64,
    pub rates: Rates,
    /// Objective after each outer iteration.
    pub objective_trace: Vec<f64>,
}

pub fn solve(
    mu: f64,
    params: &ChannelParams,
    constraints: &IntensityConstraints,
    config: &SolverConfig,
) -> Result<SolveResult> {
    solve_from(mu, params, constraints, config, None)
}

/// Like [`solve`], starting from `start` instead of the binary support
/// `{0, A}`.
pub fn solve_from(
    mu: f64,
    params: &ChannelParams,
    constraints: &IntensityConstraints,
    config: &SolverConfig,
    start: Option<&DiscreteDistribution>,
) -> Result<SolveResult> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(Error::Domain(format!("mu must lie in [0, 1], got {mu}")));
    }
    config.validate()?;
    let peak = constraints.peak().ok_or_else(|| {
        Error::UnsupportedRegime(
            "numerical optimization under an average-only constraint is not feasible (the optimal \
             support is unbounded); use the asymptotics module"
                .to_string(),
        )
    })?;
    params.require_degraded()?;

    if mu == 0.0 && params.is_identical() {
        let dist = DiscreteDistribution::degenerate(0.0)?;
        return finish(dist, 0.0, 0, vec![0.0], mu, params, constraints, config, peak);
    }

    let y_max = YMax::covering(params, &config.truncation, peak)?;
    let sep = config.merge_tol * peak;
    let (locations, weights) = match start {
        Some(d) => warm_start(d, peak, sep),
        None => (vec![0.0, peak], vec![0.5, 0.5]),
    };
    let mut support = Support::optimized(locations, &weights, mu, params, constraints, y_max)?;
    let mut trace = Vec::new();
    let mut last_violation = f64::INFINITY;

    for iteration in 1..=config.max_outer_iters {
        support = polish(support, mu, params, constraints, config, y_max)?;
        support = prune(support, config.weight_floor, mu, params, constraints, y_max)?;
        trace.push(support.objective);

        let dist = to_distribution(&support)?;
        let report = kkt_verify(&dist, support.gamma, mu, params, constraints, config)?;
        last_violation = report.max_violation;
        if report.passed() {
            return finish(dist, support.gamma, iteration, trace, mu, params, constraints, config, peak);
        }

        let worst = report.worst().expect("grid is non-empty").x;
        let mut locations = support.locations.clone();
        let mut weights = support.weights.clone();
        match locations.iter().position(|&x| (x - worst).abs() <= sep) {
            // the violation sits on a mass point: move it there
            Some(k) if k > 0 => locations[k] = worst,
            _ if worst == 0.0 => {
                return Err(stall("KKT violation at the pinned origin", iteration, &support, last_violation));
            }
            _ => {
                let at = locations.partition_point(|&x| x < worst);
                locations.insert(at, worst);
                weights.insert(at, 0.0);
            }
        }
        if locations.len() > config.max_support {
            return Err(stall("support-size cap exceeded", iteration, &support, last_violation));
        }
        support = Support::optimized(locations, &weights, mu, params, constraints, y_max)?;
    }
    Err(stall("outer iteration cap exceeded", config.max_outer_iters, &support, last_violation))
}

#[allow(clippy::too_many_arguments)]
fn finish(
    dist: DiscreteDistribution,
    gamma: f64,
    iterations: usize,
    objective_trace: Vec<f64>,
    mu: f64,
    params: &ChannelParams,
    constraints: &IntensityConstraints,
    config: &SolverConfig,
    peak: f64,
) -> Result<SolveResult> {
    let rates = DensityEvaluator::new(&dist, params, &config.truncation, peak)?.rates(&dist);
    let kkt = kkt_verify(&dist, gamma, mu, params, constraints, config)?;
    Ok(SolveResult { objective: rates.weighted(mu), dist, gamma, kkt, iterations, mu, rates, objective_trace })
}

fn stall(reason: &str, iterations: usize, support: &Support, max_violation: f64) -> Error {
    let best = to_distribution(support).unwrap_or_else(|_| DiscreteDistribution::degenerate(0.0).expect("valid"));
    Error::SolverStall {
        reason: reason.to_string(),
        iterations,
        objective: support.objective,
        max_violation,
        best: Box::new(best),
    }
}

/// Clips a previous solution into `[0, peak]`, pins the origin and merges
/// points closer than `sep`.
fn warm_start(d: &DiscreteDistribution, peak: f64, sep: f64) -> (Vec<f64>, Vec<f64>) {
    let mut pts: Vec<(f64, f64)> = vec![(0.0, 0.0)];
    for (x, w) in d.points() {
        let x = x.min(peak);
        match pts.last_mut() {
            Some(last) if x - last.0 < sep => last.1 += w,
            _ => pts.push((x, w)),
        }
    }
    if pts.len() == 1 {
        pts.push((peak, 0.0));
    }
    let total: f64 = pts.iter().map(|p| p.1).sum();
    pts.iter().map(|&(x, w)| (x, w / total)).unzip()
}

/// Drops non-origin points lighter than `floor` and re-optimizes if any
/// were removed.
fn prune(
    support: Support,
    floor: f64,
    mu: f64,
    params: &ChannelParams,
    constraints: &IntensityConstraints,
    y_max: YMax,
) -> Result<Support> {
    let keep: Vec<usize> =
        (0..support.locations.len()).filter(|&i| support.locations[i] == 0.0 || support.weights[i] >= floor).collect();
    if keep.len() == support.locations.len() {
        return Ok(support);
    }
    let locations = keep.iter().map(|&i| support.locations[i]).collect();
    let weights: Vec<f64> = keep.iter().map(|&i| support.weights[i]).collect();
    Support::optimized(locations, &weights, mu, params, constraints, y_max)
}

fn to_distribution(support: &Support) -> Result<DiscreteDistribution> {
    positive_part(support)
}
