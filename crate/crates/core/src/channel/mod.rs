//! Poisson wiretap channel laws and information densities.
//!
//! Both receivers count photons in slots of `delta` seconds. Given input
//! intensity `x`, the legitimate count is Poisson with mean
//! `(alpha_b * x + lambda_b) * delta` and the eavesdropper count is Poisson
//! with mean `(alpha_e * x + lambda_e) * delta`.
//!
//! Everything here works in log-space. Mutual-information densities are
//! reported in nats per second (the per-slot quantity divided by `delta`).

mod density;
mod distribution;
mod params;
mod truncation;

pub use self::density::{
    g_kernel, mi_densities, poisson_log_pmf, rates, Densities, DensityEvaluator, OutputKernel, Rates,
};
pub use self::distribution::DiscreteDistribution;
pub use self::params::{ChannelParams, IntensityConstraints, Side};
pub use self::truncation::{truncation_index, TruncationPolicy};
