//! Front end for `pwc-core`: configuration files, subcommands and the
//! CSV/JSON artifacts they write.

pub mod commands;
pub mod config;
pub mod output;

use std::fmt;

/// A failed command together with its process exit code: 1 for invalid
/// input, 2 when the solver stalls or a certificate does not reproduce.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub const INVALID: u8 = 1;
    pub const STALL: u8 = 2;

    pub fn invalid(message: impl Into<String>) -> Self {
        Failure { code: Self::INVALID, message: message.into() }
    }

    pub fn stall(message: impl Into<String>) -> Self {
        Failure { code: Self::STALL, message: message.into() }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Failure {}

fn is_stall(err: &pwc_core::Error) -> bool {
    match err {
        pwc_core::Error::SolverStall { .. } => true,
        pwc_core::Error::AtMu { source, .. } => is_stall(source),
        _ => false,
    }
}

impl From<pwc_core::Error> for Failure {
    fn from(err: pwc_core::Error) -> Self {
        let code = if is_stall(&err) { Self::STALL } else { Self::INVALID };
        Failure { code, message: err.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(err: std::io::Error) -> Self {
        Failure::invalid(format!("i/o error: {err}"))
    }
}

pub type Outcome<T> = Result<T, Failure>;
