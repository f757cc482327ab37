//! Maximization of `f_mu(F) = mu * I_B(F) + (1 - mu) * (I_B(F) - I_E(F))`
//! over finitely supported input laws on `[0, A]` with mean at most `E`.
//!
//! The outer loop is a cutting-plane support escalation: optimize the
//! weights on the current support, polish the locations, then evaluate the
//! KKT slack on a fine grid. If some abscissa violates the certificate, a
//! new mass point is inserted there. The loop stops when
//!
//! ```text
//! mu * i_B(x; F) + (1 - mu) * c_S(x; F) - gamma * x <= f_mu(F) - gamma * E
//! ```
//!
//! holds on the whole grid to within `kkt_tol`, with equality at the mass
//! points.

mod config;
mod kkt;
mod locations;
mod objective;
mod solve;
mod weights;

pub use self::config::SolverConfig;
pub use self::kkt::{estimate_gamma, kkt_verify, KktReport, KktSample};
pub use self::locations::refine_locations;
pub use self::solve::{solve, solve_from, SolveResult};
pub use self::weights::optimize_weights;
