//! Run configuration: a TOML file of dotted keys plus `key=value`
//! overrides.
//!
//! ```toml
//! channel.alpha_b = 2.0
//! channel.lambda_b = 1.0
//! channel.alpha_e = 1.0
//! channel.lambda_e = 2.0
//! channel.delta = 0.5
//! constraints.peak = 10.0
//! constraints.average = 2.5
//! ```
//!
//! `constraints.average_ratio` may replace `constraints.average`; the bound
//! is then `ratio * peak` and follows the peak in sweeps.

use std::collections::BTreeMap;
use std::f64::consts::LN_2;
use std::path::{Path, PathBuf};

use pwc_core::{ChannelParams, IntensityConstraints, SolverConfig};
use serde::{Deserialize, Serialize};
use toml::Value;

use crate::{Failure, Outcome};

pub const KEYS: &[&str] = &[
    "channel.alpha_b",
    "channel.lambda_b",
    "channel.alpha_e",
    "channel.lambda_e",
    "channel.delta",
    "constraints.peak",
    "constraints.average",
    "constraints.average_ratio",
    "solver.kkt_tol",
    "solver.grid_size",
    "solver.merge_tol",
    "solver.weight_floor",
    "solver.max_support",
    "solver.max_outer_iters",
    "truncation.epsilon_tail",
    "truncation.y_max_cap",
    "output.dir",
    "output.log_base",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    #[default]
    Nats,
    Bits,
}

impl LogBase {
    /// Factor that converts nats into this unit.
    pub fn scale(self) -> f64 {
        match self {
            LogBase::Nats => 1.0,
            LogBase::Bits => 1.0 / LN_2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LogBase::Nats => "nats",
            LogBase::Bits => "bits",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ChannelParams,
    pub constraints: IntensityConstraints,
    /// Set when the average bound was given as a fraction of the peak.
    pub average_ratio: Option<f64>,
    pub solver: SolverConfig,
    pub output_dir: PathBuf,
    pub log_base: LogBase,
}

impl RunConfig {
    /// Reads `path` (if any) and applies `overrides` in order.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Outcome<Self> {
        let mut settings = Settings::default();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::invalid(format!("cannot read config {}: {e}", path.display())))?;
            settings.merge_toml(&text)?;
        }
        for o in overrides {
            settings.set(o)?;
        }
        settings.build()
    }

    /// Constraints with the peak replaced by `peak`; a ratio-based average
    /// follows it.
    pub fn constraints_at_peak(&self, peak: f64) -> Outcome<IntensityConstraints> {
        let average = match self.average_ratio {
            Some(r) => Some(r * peak),
            None => self.constraints.average(),
        };
        Ok(IntensityConstraints::new(Some(peak), average)?)
    }
}

/// Flattened dotted keys and their raw values.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    values: BTreeMap<String, Value>,
}

impl Settings {
    pub fn merge_toml(&mut self, text: &str) -> Outcome<()> {
        let table: toml::Table = text.parse().map_err(|e| Failure::invalid(format!("malformed config: {e}")))?;
        let mut flat = Vec::new();
        flatten("", Value::Table(table), &mut flat);
        for (key, value) in flat {
            self.insert(key, value)?;
        }
        Ok(())
    }

    /// Applies one `key=value` override. The value is read as a TOML value
    /// and falls back to a bare string.
    pub fn set(&mut self, assignment: &str) -> Outcome<()> {
        let (key, raw) = assignment
            .split_once('=')
            .ok_or_else(|| Failure::invalid(format!("override `{assignment}` is not of the form key=value")))?;
        let raw = raw.trim();
        let value = format!("v = {raw}")
            .parse::<toml::Table>()
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| Value::String(raw.to_string()));
        self.insert(key.trim().to_string(), value)
    }

    fn insert(&mut self, key: String, value: Value) -> Outcome<()> {
        if !KEYS.contains(&key.as_str()) {
            return Err(Failure::invalid(format!("unknown configuration key `{key}`")));
        }
        self.values.insert(key, value);
        Ok(())
    }

    fn float(&self, key: &str) -> Outcome<Option<f64>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(Value::Float(v)) => Ok(Some(*v)),
            Some(Value::Integer(v)) => Ok(Some(*v as f64)),
            Some(other) => Err(Failure::invalid(format!("`{key}` must be a number, got {other}"))),
        }
    }

    fn required(&self, key: &str) -> Outcome<f64> {
        self.float(key)?.ok_or_else(|| Failure::invalid(format!("missing configuration key `{key}`")))
    }

    fn count(&self, key: &str) -> Outcome<Option<u64>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(Value::Integer(v)) if *v >= 0 => Ok(Some(*v as u64)),
            Some(other) => Err(Failure::invalid(format!("`{key}` must be a nonnegative integer, got {other}"))),
        }
    }

    fn string(&self, key: &str) -> Outcome<Option<String>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(other) => Err(Failure::invalid(format!("`{key}` must be a string, got {other}"))),
        }
    }

    pub fn build(&self) -> Outcome<RunConfig> {
        let params = ChannelParams::new(
            self.required("channel.alpha_b")?,
            self.required("channel.lambda_b")?,
            self.required("channel.alpha_e")?,
            self.required("channel.lambda_e")?,
            self.required("channel.delta")?,
        )?;

        let peak = self.float("constraints.peak")?;
        let average_ratio = self.float("constraints.average_ratio")?;
        let average = match (self.float("constraints.average")?, average_ratio) {
            (Some(_), Some(_)) => {
                return Err(Failure::invalid("set only one of `constraints.average` and `constraints.average_ratio`"))
            }
            (e, None) => e,
            (None, Some(r)) => {
                if !(r > 0.0 && r.is_finite()) {
                    return Err(Failure::invalid(format!("`constraints.average_ratio` must be > 0, got {r}")));
                }
                let a = peak.ok_or_else(|| Failure::invalid("`constraints.average_ratio` needs `constraints.peak`"))?;
                Some(r * a)
            }
        };
        let constraints = IntensityConstraints::new(peak, average)?;

        let mut solver = SolverConfig::default();
        if let Some(v) = self.float("solver.kkt_tol")? {
            solver.kkt_tol = v;
        }
        if let Some(v) = self.count("solver.grid_size")? {
            solver.grid_size = v as usize;
        }
        if let Some(v) = self.float("solver.merge_tol")? {
            solver.merge_tol = v;
        }
        if let Some(v) = self.float("solver.weight_floor")? {
            solver.weight_floor = v;
        }
        if let Some(v) = self.count("solver.max_support")? {
            solver.max_support = v as usize;
        }
        if let Some(v) = self.count("solver.max_outer_iters")? {
            solver.max_outer_iters = v as usize;
        }
        if let Some(v) = self.float("truncation.epsilon_tail")? {
            solver.truncation.epsilon_tail = v;
        }
        if let Some(v) = self.count("truncation.y_max_cap")? {
            solver.truncation.y_max_cap = v;
        }
        solver.validate()?;

        let output_dir = PathBuf::from(self.string("output.dir")?.unwrap_or_else(|| "out".into()));
        let log_base = match self.string("output.log_base")?.as_deref() {
            None | Some("nats") => LogBase::Nats,
            Some("bits") => LogBase::Bits,
            Some(other) => {
                return Err(Failure::invalid(format!("`output.log_base` must be nats or bits, got {other}")))
            }
        };
        Ok(RunConfig { params, constraints, average_ratio, solver, output_dir, log_base })
    }
}

fn flatten(prefix: &str, value: Value, out: &mut Vec<(String, Value)>) {
    match value {
        Value::Table(t) => {
            for (k, v) in t {
                let key = if prefix.is_empty() { k } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        v => out.push((prefix.to_string(), v)),
    }
}
