//! `f_mu` as a function of the weights on a fixed support, with its exact
//! gradient and Hessian. Sums use the same truncation as the density
//! evaluator, so values agree with `DensityEvaluator::rates`.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::channel::{truncation_index, ChannelParams, Side, TruncationPolicy};
use crate::error::Result;
use crate::math::{ln_factorial, logsumexp};

/// Truncation indices for both receivers covering inputs up to `top`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct YMax {
    pub legitimate: u64,
    pub eavesdropper: u64,
}

impl YMax {
    pub fn covering(params: &ChannelParams, policy: &TruncationPolicy, top: f64) -> Result<Self> {
        let idx = |side| truncation_index((params.gain(side) * top + params.dark(side)) * params.delta(), policy);
        Ok(YMax { legitimate: idx(Side::Legitimate)?, eavesdropper: idx(Side::Eavesdropper)? })
    }
}

/// `ln p(y | x_i)` for every support point of one receiver.
struct SideTable {
    delta: f64,
    ln_k: Vec<Vec<f64>>,
}

struct SideEval {
    value: f64,
    grad: Vec<f64>,
    hess: Option<DMatrix<f64>>,
}

impl SideTable {
    fn new(side: Side, params: &ChannelParams, locations: &[f64], y_max: u64) -> Self {
        let (a, l, d) = (params.gain(side), params.dark(side), params.delta());
        let ln_fact: Vec<f64> = (0..=y_max).map(ln_factorial).collect();
        let ln_k = locations
            .iter()
            .map(|&x| {
                let m = (a * x + l) * d;
                let lm = libm::log(m);
                ln_fact.iter().enumerate().map(|(y, lf)| -m + y as f64 * lm - lf).collect()
            })
            .collect();
        SideTable { delta: d, ln_k }
    }

    fn ln_output(&self, weights: &[f64]) -> Vec<f64> {
        let n_y = self.ln_k[0].len();
        let ln_w: Vec<f64> = weights.iter().map(|&w| if w > 0.0 { libm::log(w) } else { f64::NEG_INFINITY }).collect();
        let mut terms = vec![0.0; weights.len()];
        (0..n_y)
            .map(|y| {
                for (t, (lw, row)) in terms.iter_mut().zip(ln_w.iter().zip(&self.ln_k)) {
                    *t = lw + row[y];
                }
                logsumexp(&terms)
            })
            .collect()
    }

    fn eval(&self, weights: &[f64], want_hess: bool) -> SideEval {
        let n = weights.len();
        let ln_p = self.ln_output(weights);
        let inv_d = 1.0 / self.delta;
        let mut value = 0.0;
        let mut grad = vec![0.0; n];
        for (i, row) in self.ln_k.iter().enumerate() {
            let mut div = 0.0;
            let mut mass = 0.0;
            for (lk, lp) in row.iter().zip(&ln_p) {
                let k = libm::exp(*lk);
                div += k * (lk - lp);
                mass += k;
            }
            value += weights[i] * div;
            grad[i] = (div - mass) * inv_d;
        }
        value *= inv_d;
        let hess = want_hess.then(|| {
            let mut h = DMatrix::<f64>::zeros(n, n);
            for y in 0..ln_p.len() {
                let r: Vec<f64> = self.ln_k.iter().map(|row| libm::exp(row[y] - 0.5 * ln_p[y])).collect();
                for i in 0..n {
                    for j in i..n {
                        h[(i, j)] -= r[i] * r[j];
                    }
                }
            }
            for i in 0..n {
                for j in i..n {
                    h[(i, j)] *= inv_d;
                    h[(j, i)] = h[(i, j)];
                }
            }
            h
        });
        SideEval { value, grad, hess }
    }
}

pub(crate) struct FixedSupport {
    mu: f64,
    legitimate: SideTable,
    eavesdropper: Option<SideTable>,
}

pub(crate) struct Eval {
    pub grad: Vec<f64>,
    pub hess: DMatrix<f64>,
}

impl FixedSupport {
    pub fn new(params: &ChannelParams, mu: f64, locations: &[f64], y_max: YMax) -> Self {
        FixedSupport {
            mu,
            legitimate: SideTable::new(Side::Legitimate, params, locations, y_max.legitimate),
            eavesdropper: (mu < 1.0).then(|| SideTable::new(Side::Eavesdropper, params, locations, y_max.eavesdropper)),
        }
    }

    pub fn value(&self, weights: &[f64]) -> f64 {
        let b = self.legitimate.eval(weights, false).value;
        match &self.eavesdropper {
            Some(e) => b - (1.0 - self.mu) * e.eval(weights, false).value,
            None => b,
        }
    }

    pub fn eval(&self, weights: &[f64]) -> Eval {
        let b = self.legitimate.eval(weights, true);
        let mut grad = b.grad;
        let mut hess = b.hess.expect("requested");
        if let Some(e) = &self.eavesdropper {
            let e = e.eval(weights, true);
            let c = 1.0 - self.mu;
            for (g, ge) in grad.iter_mut().zip(&e.grad) {
                *g -= c * ge;
            }
            hess -= e.hess.expect("requested") * c;
        }
        Eval { grad, hess }
    }
}
