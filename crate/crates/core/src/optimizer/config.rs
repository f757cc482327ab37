use alloc::format;

use crate::channel::TruncationPolicy;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct SolverConfig {
    /// Largest admissible KKT violation, nats/second.
    pub kkt_tol: f64,
    /// Uniform KKT grid points on `[0, A]`.
    pub grid_size: usize,
    /// Minimum separation between mass points, as a fraction of `A`.
    pub merge_tol: f64,
    /// Mass points lighter than this are dropped (the origin is kept).
    pub weight_floor: f64,
    pub max_support: usize,
    pub max_outer_iters: usize,
    pub truncation: TruncationPolicy,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            kkt_tol: 1e-6,
            grid_size: 2001,
            merge_tol: 1e-4,
            weight_floor: 1e-9,
            max_support: 64,
            max_outer_iters: 200,
            truncation: TruncationPolicy::default(),
        }
    }
}

impl SolverConfig {
    /// Points per refinement window around mass points and violations.
    pub const WINDOW_POINTS: usize = 21;

    pub fn validate(&self) -> Result<()> {
        let positive = [("kkt_tol", self.kkt_tol), ("merge_tol", self.merge_tol), ("weight_floor", self.weight_floor)];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("solver.{name} must be finite and > 0, got {v}")));
            }
        }
        if self.grid_size < 3 {
            return Err(Error::Domain(format!("solver.grid_size must be >= 3, got {}", self.grid_size)));
        }
        if self.max_support < 2 {
            return Err(Error::domain("solver.max_support must be >= 2"));
        }
        if self.max_outer_iters == 0 {
            return Err(Error::domain("solver.max_outer_iters must be positive"));
        }
        self.truncation.validate()
    }
}
