use alloc::boxed::Box;
use alloc::string::String;

use crate::channel::DiscreteDistribution;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "channel is not degraded: need alpha_b >= alpha_e and lambda_b/alpha_b <= lambda_e/alpha_e \
         (alpha_b={alpha_b}, lambda_b={lambda_b}, alpha_e={alpha_e}, lambda_e={lambda_e})"
    )]
    NotDegraded { alpha_b: f64, lambda_b: f64, alpha_e: f64, lambda_e: f64 },

    #[error("Poisson truncation for mean {mean} needs an index above the cap {cap}")]
    TruncationOverflow { mean: f64, cap: u64 },

    /// The solver ran out of iterations or support points before the KKT
    /// certificate passed. `best` is the last iterate.
    #[error("solver stalled after {iterations} iterations: {reason} (objective {objective}, max KKT violation {max_violation})")]
    SolverStall {
        reason: String,
        iterations: usize,
        objective: f64,
        max_violation: f64,
        best: Box<DiscreteDistribution>,
    },

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("wrong regime: {0}")]
    WrongRegime(String),

    #[error("Lagrange multiplier is undefined for a single mass point")]
    UndefinedMultiplier,

    #[error("root bracket [{lo}, {hi}] has no sign change (f(lo)={f_lo}, f(hi)={f_hi})")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("solve failed at mu={mu}: {source}")]
    AtMu { mu: f64, source: Box<Error> },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
