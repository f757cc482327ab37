//! Numerical secrecy-capacity machinery for the degraded discrete-time
//! Poisson wiretap channel.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only pure
//! computation. File formats, configuration and the command-line front end
//! live in the `pwc-cli` companion crate.
//!
//! Modules:
//!
//! * [`channel`]: channel parameters, finitely supported input laws, Poisson
//!   kernels, mutual-information densities and rates.
//! * [`optimizer`]: maximization of the weighted objective
//!   `mu * I_B + (1 - mu) * (I_B - I_E)` under peak and average intensity
//!   constraints, certified by the KKT conditions.
//! * [`region`]: rate-equivocation boundary tracing.
//! * [`asymptotics`]: closed-form low- and high-intensity results and bounds.
//!
//! All information quantities are in nats per second.

#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod asymptotics;
pub mod channel;
mod error;
mod math;
pub mod optimizer;
pub mod region;

pub use crate::channel::{ChannelParams, DiscreteDistribution, IntensityConstraints, Side, TruncationPolicy};
pub use crate::error::{Error, Result};
pub use crate::optimizer::{KktReport, SolveResult, SolverConfig};

pub use crate::region::RegionPoint;
