use alloc::format;
use alloc::vec::Vec;

use super::{truncation_index, ChannelParams, DiscreteDistribution, Side, TruncationPolicy};
use crate::error::{Error, Result};
use crate::math::{ln_factorial, logsumexp};

/// `ln[e^{-mean} mean^y / y!]`. Returns negative infinity for `mean = 0,
/// y > 0`.
pub fn poisson_log_pmf(mean: f64, y: u64) -> Result<f64> {
    if !(mean >= 0.0) || !mean.is_finite() {
        return Err(Error::Domain(format!("Poisson mean must be finite and >= 0, got {mean}")));
    }
    if mean == 0.0 {
        return Ok(if y == 0 { 0.0 } else { f64::NEG_INFINITY });
    }
    Ok(-mean + y as f64 * libm::log(mean) - ln_factorial(y))
}

/// `ln g(y; F)` for one receiver, where
/// `g(y; F) = sum_i p_i exp(-alpha x_i delta) [(alpha x_i + lambda) delta]^y`.
///
/// The output pmf follows as `ln P(y) = -lambda delta + ln g(y) - ln y!`.
pub fn g_kernel(side: Side, y: u64, dist: &DiscreteDistribution, params: &ChannelParams) -> Result<f64> {
    if dist.is_empty() {
        return Err(Error::domain("g-kernel of an empty distribution"));
    }
    let (alpha, lambda, delta) = (params.gain(side), params.dark(side), params.delta());
    let yf = y as f64;
    let terms: Vec<f64> = dist
        .points()
        .map(|(x, p)| libm::log(p) - alpha * x * delta + yf * libm::log((alpha * x + lambda) * delta))
        .collect();
    Ok(logsumexp(&terms))
}

/// The output side of one receiver for a fixed input law, truncated at
/// `y_max`.
///
/// Internally the kernel is stored relative to its value for a point mass
/// at zero: `ln h(y) = ln g(y) - y ln(lambda delta)`. That keeps the
/// density formula free of the large, cancelling `y ln(...)` terms.
#[derive(Debug, Clone)]
pub struct OutputKernel {
    alpha: f64,
    lambda: f64,
    delta: f64,
    ln_fact: Vec<f64>,
    ln_h: Vec<f64>,
}

impl OutputKernel {
    pub fn new(side: Side, dist: &DiscreteDistribution, params: &ChannelParams, y_max: u64) -> Self {
        let (alpha, lambda, delta) = (params.gain(side), params.dark(side), params.delta());
        let n = y_max as usize + 1;
        let ln_fact: Vec<f64> = (0..n as u64).map(ln_factorial).collect();
        let offsets: Vec<f64> = dist.points().map(|(x, p)| libm::log(p) - alpha * x * delta).collect();
        let slopes: Vec<f64> = dist.locations().iter().map(|&x| libm::log1p(alpha * x / lambda)).collect();
        let mut terms = alloc::vec![0.0; offsets.len()];
        let ln_h = (0..n)
            .map(|y| {
                let yf = y as f64;
                for (t, (o, s)) in terms.iter_mut().zip(offsets.iter().zip(&slopes)) {
                    *t = o + yf * s;
                }
                logsumexp(&terms)
            })
            .collect();
        OutputKernel { alpha, lambda, delta, ln_fact, ln_h }
    }

    pub fn y_max(&self) -> u64 {
        (self.ln_h.len() - 1) as u64
    }

    /// `ln g(y; F)`.
    pub fn ln_g(&self, y: u64) -> f64 {
        y as f64 * libm::log(self.lambda * self.delta) + self.ln_h[y as usize]
    }

    /// `ln P(y; F)`.
    pub fn ln_output_pmf(&self, y: u64) -> f64 {
        -self.lambda * self.delta + self.ln_g(y) - self.ln_fact[y as usize]
    }

    /// Mutual-information density `i(x; F)` in nats per second:
    /// `(a x + l) ln(1 + a x / l) - a x - (1/delta) sum_y p(y|x) ln h(y)`.
    pub fn density(&self, x: f64) -> f64 {
        let (a, l, d) = (self.alpha, self.lambda, self.delta);
        let mean = (a * x + l) * d;
        let ln_mean = libm::log(mean);
        let mut acc = 0.0;
        for (y, (lf, lh)) in self.ln_fact.iter().zip(&self.ln_h).enumerate() {
            let lp = -mean + y as f64 * ln_mean - lf;
            acc += libm::exp(lp) * lh;
        }
        (a * x + l) * libm::log1p(a * x / l) - a * x - acc / d
    }
}

/// Densities of both receivers at one input point, nats per second.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Densities {
    pub i_b: f64,
    pub i_e: f64,
    /// Secrecy-rate density `i_b - i_e`.
    pub c_s: f64,
}

impl Densities {
    /// `mu * i_b + (1 - mu) * c_s`.
    pub fn weighted(&self, mu: f64) -> f64 {
        self.i_b - (1.0 - mu) * self.i_e
    }
}

/// Information rates of an input law, nats per second.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Rates {
    pub i_b: f64,
    pub i_e: f64,
    /// `i_b - i_e`.
    pub f0: f64,
}

impl Rates {
    /// `mu * I_B + (1 - mu) * (I_B - I_E)`.
    pub fn weighted(&self, mu: f64) -> f64 {
        self.i_b - (1.0 - mu) * self.i_e
    }
}

/// Both output kernels for one input law, truncated so that any input in
/// `[0, x_max]` is covered.
#[derive(Debug, Clone)]
pub struct DensityEvaluator {
    legitimate: OutputKernel,
    eavesdropper: OutputKernel,
}

impl DensityEvaluator {
    /// `x_max` is the largest abscissa that will be evaluated; the
    /// truncation mean is taken at `max(x_max, largest mass point)`.
    pub fn new(
        dist: &DiscreteDistribution,
        params: &ChannelParams,
        policy: &TruncationPolicy,
        x_max: f64,
    ) -> Result<Self> {
        if dist.is_empty() {
            return Err(Error::domain("densities of an empty distribution"));
        }
        let top = x_max.max(dist.max_location());
        let kernel = |side| -> Result<OutputKernel> {
            let mean = (params.gain(side) * top + params.dark(side)) * params.delta();
            let y_max = truncation_index(mean, policy)?;
            Ok(OutputKernel::new(side, dist, params, y_max))
        };
        Ok(DensityEvaluator { legitimate: kernel(Side::Legitimate)?, eavesdropper: kernel(Side::Eavesdropper)? })
    }

    pub fn kernel(&self, side: Side) -> &OutputKernel {
        match side {
            Side::Legitimate => &self.legitimate,
            Side::Eavesdropper => &self.eavesdropper,
        }
    }

    pub fn densities(&self, x: f64) -> Densities {
        let i_b = self.legitimate.density(x);
        let i_e = self.eavesdropper.density(x);
        Densities { i_b, i_e, c_s: i_b - i_e }
    }

    /// `mu * i_b + (1 - mu) * c_s`; the eavesdropper kernel is skipped when
    /// `mu == 1`.
    pub fn weighted(&self, x: f64, mu: f64) -> f64 {
        if mu == 1.0 {
            self.legitimate.density(x)
        } else {
            self.legitimate.density(x) - (1.0 - mu) * self.eavesdropper.density(x)
        }
    }

    pub fn rates(&self, dist: &DiscreteDistribution) -> Rates {
        let (mut i_b, mut i_e) = (0.0, 0.0);
        for (x, p) in dist.points() {
            let d = self.densities(x);
            i_b += p * d.i_b;
            i_e += p * d.i_e;
        }
        Rates { i_b, i_e, f0: i_b - i_e }
    }
}

/// `(i_B, i_E, c_S)` at input `x` for input law `dist`.
pub fn mi_densities(
    x: f64,
    dist: &DiscreteDistribution,
    params: &ChannelParams,
    policy: &TruncationPolicy,
) -> Result<Densities> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("input intensity must be finite and >= 0, got {x}")));
    }
    Ok(DensityEvaluator::new(dist, params, policy, x)?.densities(x))
}

/// `(I_B, I_E, f0)` for input law `dist`.
pub fn rates(dist: &DiscreteDistribution, params: &ChannelParams, policy: &TruncationPolicy) -> Result<Rates> {
    Ok(DensityEvaluator::new(dist, params, policy, 0.0)?.rates(dist))
}
