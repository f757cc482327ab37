use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use super::objective::{FixedSupport, YMax};
use super::SolverConfig;
use crate::channel::{ChannelParams, IntensityConstraints};
use crate::error::{Error, Result};

const INNER_MAX_ITERS: usize = 200;
const INTERIOR_MIX: f64 = 1e-2;

/// Optimal weights on fixed `locations`, together with the multiplier of
/// the average constraint (zero when it is slack).
///
/// `f_mu` is concave in the weights. It is maximized by a projected Newton
/// ascent on the simplex, first ignoring the average bound and, if that
/// answer violates it, again on the face where the mean equals the bound.
pub fn optimize_weights(
    locations: &[f64],
    mu: f64,
    params: &ChannelParams,
    constraints: &IntensityConstraints,
    config: &SolverConfig,
) -> Result<(Vec<f64>, f64)> {
    let peak = check_inputs(locations, mu, constraints)?;
    let y_max = YMax::covering(params, &config.truncation, peak)?;
    let start = vec![1.0 / locations.len() as f64; locations.len()];
    WeightSolver::new(locations, mu, params, constraints, y_max).solve(&start)
}

pub(crate) fn check_inputs(locations: &[f64], mu: f64, constraints: &IntensityConstraints) -> Result<f64> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(Error::Domain(format!("mu must lie in [0, 1], got {mu}")));
    }
    let peak =
        constraints.peak().ok_or_else(|| Error::UnsupportedRegime("weight optimization needs a peak bound".into()))?;
    if locations.first() != Some(&0.0) {
        return Err(Error::domain("the origin must be among the candidate locations"));
    }
    for w in locations.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::domain("candidate locations must be strictly increasing"));
        }
    }
    if locations.iter().any(|&x| !x.is_finite() || x > peak) {
        return Err(Error::Domain(format!("candidate locations must lie in [0, {peak}]")));
    }
    Ok(peak)
}

pub(crate) struct WeightSolver<'a> {
    locations: &'a [f64],
    average: Option<f64>,
    objective: FixedSupport,
}

impl<'a> WeightSolver<'a> {
    pub fn new(
        locations: &'a [f64],
        mu: f64,
        params: &ChannelParams,
        constraints: &IntensityConstraints,
        y_max: YMax,
    ) -> Self {
        WeightSolver {
            locations,
            average: constraints.binding_average(),
            objective: FixedSupport::new(params, mu, locations, y_max),
        }
    }

    fn mean(&self, w: &[f64]) -> f64 {
        w.iter().zip(self.locations).map(|(p, x)| p * x).sum()
    }

    /// Optimal weights and the multiplier of the average constraint.
    pub fn solve(&self, start: &[f64]) -> Result<(Vec<f64>, f64)> {
        let n = self.locations.len();
        if n == 1 {
            return Ok((vec![1.0], 0.0));
        }
        let (w, _) = self.ascend(&self.interior(start, None), None);
        match self.average {
            Some(e) if self.mean(&w) > e => {
                let (w, gamma) = self.ascend(&self.interior(&w, Some(e)), Some(e));
                Ok((w, gamma.max(0.0)))
            }
            _ => Ok((w, 0.0)),
        }
    }

    /// A strictly positive point near `start` on the simplex, with mean
    /// exactly `mean` when given. The Hessian is unbounded on the boundary,
    /// so the ascent starts inside.
    fn interior(&self, start: &[f64], mean: Option<f64>) -> Vec<f64> {
        let n = start.len();
        let s: f64 = start.iter().map(|&v| v.max(0.0)).sum();
        let mut w: Vec<f64> = if s > 0.0 {
            start.iter().map(|&v| (1.0 - INTERIOR_MIX) * v.max(0.0) / s + INTERIOR_MIX / n as f64).collect()
        } else {
            vec![1.0 / n as f64; n]
        };
        if let Some(e) = mean {
            // pull the mean onto `e` by mixing with the lightest or the
            // heaviest point
            let m = self.mean(&w);
            let (k, xk) = if m > e { (0, self.locations[0]) } else { (n - 1, self.locations[n - 1]) };
            let theta = (e - xk) / (m - xk);
            w.iter_mut().for_each(|v| *v *= theta);
            w[k] += 1.0 - theta;
        }
        w
    }

    /// Projected Newton ascent of `f_mu` on the face `{sum w = 1}` or, when
    /// `mean` is given, `{sum w = 1, sum w x = mean}`. Returns the weights
    /// and the multiplier of the mean constraint.
    fn ascend(&self, start: &[f64], mean: Option<f64>) -> (Vec<f64>, f64) {
        let n = self.locations.len();
        let mut w = start.to_vec();
        let mut current = self.objective.value(&w);
        let mut gamma = 0.0;
        for _ in 0..INNER_MAX_ITERS {
            let ev = self.objective.eval(&w);
            let grad = &ev.grad;
            let scale = grad.iter().fold(1.0f64, |m, g| m.max(g.abs()));
            let mut free: Vec<usize> = (0..n).collect();
            // A point at zero weight stays free only if the step raises it.
            let step = loop {
                // Newton steps are useless for a point entering at zero weight
                // (its Hessian entry is unbounded there), so such points
                // enter along the projected gradient.
                let entering = free.iter().any(|&i| w[i] == 0.0);
                let step = self.direction(&ev.hess, grad, &free, mean.is_some(), entering);
                let keep: Vec<usize> =
                    free.iter().zip(&step.d).filter(|&(&i, &di)| w[i] > 0.0 || di > 0.0).map(|(&i, _)| i).collect();
                if keep.len() == free.len() {
                    break step;
                }
                free = keep;
            };
            gamma = step.gamma;
            let mut dir = vec![0.0; n];
            for (k, &i) in free.iter().enumerate() {
                dir[i] = step.d[k];
            }
            let slope: f64 = dir.iter().zip(grad).map(|(d, g)| d * g).sum();
            if step.residual <= 1e-13 * scale || !(slope > 0.0) {
                break;
            }

            let mut t_max = f64::INFINITY;
            let mut blocking = None;
            for i in 0..n {
                if dir[i] < 0.0 && w[i] > 0.0 {
                    let t = w[i] / -dir[i];
                    if t < t_max {
                        t_max = t;
                        blocking = Some(i);
                    }
                }
            }
            let mut t = t_max.min(1.0);
            let mut accepted = None;
            for _ in 0..60 {
                let mut trial: Vec<f64> = w.iter().zip(&dir).map(|(p, d)| (p + t * d).max(0.0)).collect();
                if t == t_max {
                    if let Some(b) = blocking {
                        trial[b] = 0.0;
                    }
                }
                let v = self.objective.value(&trial);
                if v >= current + 1e-4 * t * slope || (v >= current && t * slope < 1e-15 * scale) {
                    accepted = Some((trial, v));
                    break;
                }
                t *= 0.5;
            }
            match accepted {
                Some((trial, v)) => {
                    let moved = trial.iter().zip(&w).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                    w = trial;
                    current = v;
                    if moved < 1e-16 {
                        break;
                    }
                }
                None => break,
            }
        }
        // undo round-off drift off the constraint set
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|v| *v /= s);
        (w, gamma)
    }

    /// Newton step restricted to `free` and to the constraint face, computed
    /// in a null-space basis of the face so that the nearly singular
    /// Hessian is never inverted on the full space. The projected gradient
    /// is used instead when asked for or when the reduced Hessian cannot be
    /// factored.
    fn direction(
        &self,
        hess: &DMatrix<f64>,
        grad: &[f64],
        free: &[usize],
        with_mean: bool,
        gradient_only: bool,
    ) -> Step {
        let k = free.len();
        let xs: Vec<f64> = free.iter().map(|&i| self.locations[i]).collect();
        let gs: Vec<f64> = free.iter().map(|&i| grad[i]).collect();
        let (nu, gamma) = face_multipliers(&xs, &gs, with_mean);
        let residual = xs.iter().zip(&gs).map(|(x, g)| (g - nu - gamma * x).abs()).fold(0.0, f64::max);
        let c = if with_mean { 2 } else { 1 };
        if k <= c {
            return Step { d: vec![0.0; k], gamma, residual };
        }
        let z = null_space(&xs, with_mean);
        let g = DVector::from_vec(gs);
        let m = DMatrix::<f64>::from_fn(k, k, |r, s| -hess[(free[r], free[s])]);
        let zg = z.transpose() * &g;
        let mut reduced = z.transpose() * &m * &z;
        let trace = (0..reduced.nrows()).map(|r| reduced[(r, r)].abs()).sum::<f64>() / reduced.nrows() as f64;
        let mut reg = 1e-14 * trace.max(1e-300);
        for _ in 0..if gradient_only { 0 } else { 8 } {
            if let Some(ch) = reduced.clone().cholesky() {
                let d = &z * ch.solve(&zg);
                if d.iter().all(|v| v.is_finite()) {
                    return Step { d: d.iter().copied().collect(), gamma, residual };
                }
            }
            for r in 0..reduced.nrows() {
                reduced[(r, r)] += reg;
            }
            reg *= 100.0;
        }
        let d = &z * (z.transpose() * &z).lu().solve(&zg).unwrap_or_else(|| DVector::zeros(k - c));
        Step { d: d.iter().copied().collect(), gamma, residual }
    }

    pub fn value(&self, w: &[f64]) -> f64 {
        self.objective.value(w)
    }
}

struct Step {
    d: Vec<f64>,
    gamma: f64,
    /// Largest deviation of the free gradient from the face multipliers.
    residual: f64,
}

/// Least-squares fit `g_i ~ nu + gamma x_i` (or `g_i ~ nu`) over the free
/// points; exact at a stationary point of the face.
fn face_multipliers(xs: &[f64], gs: &[f64], with_mean: bool) -> (f64, f64) {
    let n = xs.len() as f64;
    let mg = gs.iter().sum::<f64>() / n;
    if !with_mean || xs.len() < 2 {
        return (mg, 0.0);
    }
    let mx = xs.iter().sum::<f64>() / n;
    let (mut sxg, mut sxx) = (0.0, 0.0);
    for (x, g) in xs.iter().zip(gs) {
        sxg += (x - mx) * (g - mg);
        sxx += (x - mx) * (x - mx);
    }
    let gamma = sxg / sxx;
    (mg - gamma * mx, gamma)
}

/// Basis of `{d : sum d = 0}` or `{d : sum d = 0, sum d x = 0}`. Each column
/// moves one point and compensates on the extreme points.
fn null_space(xs: &[f64], with_mean: bool) -> DMatrix<f64> {
    let k = xs.len();
    if !with_mean {
        let mut z = DMatrix::zeros(k, k - 1);
        for j in 0..k - 1 {
            z[(j, j)] = 1.0;
            z[(k - 1, j)] = -1.0;
        }
        return z;
    }
    let (lo, hi) = (0, k - 1);
    let span = xs[hi] - xs[lo];
    let mut z = DMatrix::zeros(k, k - 2);
    for (col, j) in (1..k - 1).enumerate() {
        // e_j + a e_lo + b e_hi with a + b = -1 and a x_lo + b x_hi = -x_j
        let b = -(xs[j] - xs[lo]) / span;
        z[(j, col)] = 1.0;
        z[(lo, col)] = -1.0 - b;
        z[(hi, col)] = b;
    }
    z
}
