//! The subcommands. Each writes its artifacts into the configured output
//! directory and returns a summary for the terminal.

use std::fs;
use std::path::Path;

use pwc_core::asymptotics::{self, AsymptoticReport, Estimate};
use pwc_core::channel::Rates;
use pwc_core::optimizer::{self, kkt_verify, SolveResult};
use pwc_core::region::{self, RegionPoint};
use pwc_core::{ChannelParams, DiscreteDistribution, IntensityConstraints, SolverConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{LogBase, RunConfig};
use crate::output::{csv_num, write_csv, write_json};
use crate::{Failure, Outcome};

pub const SOLUTION_FILE: &str = "solution.json";
pub const SLACK_FILE: &str = "kkt_slack.csv";
pub const REGION_FILE: &str = "region.csv";
pub const REGION_DISTS_FILE: &str = "region_dists.json";
pub const SWEEP_FILE: &str = "sweep.csv";
pub const ASYMPTOTICS_FILE: &str = "asymptotics.json";

/// Largest disagreement tolerated between a stored and a recomputed KKT
/// report.
pub const VERIFY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub params: ChannelParams,
    pub constraints: IntensityConstraints,
    pub solver: SolverConfig,
    pub log_base: LogBase,
    /// Units of every information quantity in the file.
    pub units: String,
}

impl Metadata {
    fn new(config: &RunConfig) -> Self {
        Metadata {
            params: config.params,
            constraints: config.constraints,
            solver: config.solver,
            log_base: config.log_base,
            units: format!("{}/second", config.log_base.as_str()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KktSummary {
    pub max_violation: f64,
    pub equality_residual: f64,
    pub passed: bool,
    pub grid_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub metadata: Metadata,
    pub mu: f64,
    pub dist: DiscreteDistribution,
    pub objective: f64,
    /// Multiplier of the average constraint, per unit intensity.
    pub gamma: f64,
    pub rates: Rates,
    pub iterations: usize,
    pub objective_trace: Vec<f64>,
    pub kkt: KktSummary,
}

fn scaled_rates(r: &Rates, s: f64) -> Rates {
    Rates { i_b: s * r.i_b, i_e: s * r.i_e, f0: s * r.f0 }
}

/// Solves for one `mu` and writes `solution.json` and `kkt_slack.csv`.
pub fn run_solve(config: &RunConfig, mu: f64) -> Outcome<SolveResult> {
    let res = optimizer::solve(mu, &config.params, &config.constraints, &config.solver)?;
    fs::create_dir_all(&config.output_dir)?;
    let s = config.log_base.scale();
    let file = SolutionFile {
        metadata: Metadata::new(config),
        mu,
        dist: res.dist.clone(),
        objective: s * res.objective,
        gamma: s * res.gamma,
        rates: scaled_rates(&res.rates, s),
        iterations: res.iterations,
        objective_trace: res.objective_trace.iter().map(|v| s * v).collect(),
        kkt: KktSummary {
            max_violation: s * res.kkt.max_violation,
            equality_residual: s * res.kkt.equality_residual,
            passed: res.kkt.passed(),
            grid_points: res.kkt.grid.len(),
        },
    };
    write_json(&config.output_dir.join(SOLUTION_FILE), &file)?;
    let rows: Vec<Vec<String>> = res.kkt.grid.iter().map(|g| vec![csv_num(g.x), csv_num(s * g.slack)]).collect();
    write_csv(&config.output_dir.join(SLACK_FILE), &["x", "slack"], &rows)?;
    Ok(res)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verification {
    pub stored: KktSummary,
    pub recomputed: KktSummary,
    /// Largest difference between the stored and recomputed reports, in
    /// the file's units.
    pub discrepancy: f64,
}

impl Verification {
    pub fn reproduced(&self) -> bool {
        self.discrepancy <= VERIFY_TOL && self.stored.passed == self.recomputed.passed
    }
}

/// Re-runs the KKT check on a stored solution.
pub fn run_verify(path: &Path) -> Outcome<Verification> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::invalid(format!("cannot read {}: {e}", path.display())))?;
    let file: SolutionFile =
        serde_json::from_str(&text).map_err(|e| Failure::invalid(format!("malformed solution file: {e}")))?;
    let m = &file.metadata;
    let s = m.log_base.scale();
    let report = kkt_verify(&file.dist, file.gamma / s, file.mu, &m.params, &m.constraints, &m.solver)?;
    let recomputed = KktSummary {
        max_violation: s * report.max_violation,
        equality_residual: s * report.equality_residual,
        passed: report.passed(),
        grid_points: report.grid.len(),
    };
    let discrepancy = (recomputed.max_violation - file.kkt.max_violation)
        .abs()
        .max((recomputed.equality_residual - file.kkt.equality_residual).abs());
    Ok(Verification { stored: file.kkt, recomputed, discrepancy })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionFile {
    pub metadata: Metadata,
    pub mu_grid: Vec<f64>,
    /// Whether the mu = 0 and mu = 1 laws differ; absent unless both
    /// endpoints are on the grid.
    pub tradeoff: Option<bool>,
    pub tradeoff_tol: f64,
    pub points: Vec<RegionPoint>,
}

/// Traces the boundary over `mu_grid` and writes `region.csv` and
/// `region_dists.json`. `cold` solves every `mu` independently, in
/// parallel, instead of warm-starting along the grid.
pub fn run_region(config: &RunConfig, mu_grid: &[f64], cold: bool, jobs: usize) -> Outcome<RegionFile> {
    let (p, c, sc) = (&config.params, &config.constraints, &config.solver);
    let points = if cold {
        if mu_grid.is_empty() {
            return Err(Failure::invalid("the mu grid is empty"));
        }
        if mu_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Failure::invalid("the mu grid must be strictly increasing"));
        }
        pool(jobs)?.install(|| {
            mu_grid.par_iter().map(|&mu| region::boundary_point(mu, p, c, sc)).collect::<Result<Vec<_>, _>>()
        })?
    } else {
        region::trace_boundary(p, c, mu_grid, sc)?
    };
    let tradeoff_tol = region::default_tradeoff_tol(sc, c);
    let has_ends = mu_grid.first() == Some(&0.0) && mu_grid.last() == Some(&1.0);
    let tradeoff = if has_ends { Some(region::detect_tradeoff(&points, tradeoff_tol)?) } else { None };

    fs::create_dir_all(&config.output_dir)?;
    let s = config.log_base.scale();
    let rows: Vec<Vec<String>> =
        points.iter().map(|q| vec![csv_num(q.mu), csv_num(s * q.rate_r), csv_num(s * q.equivocation_re)]).collect();
    write_csv(&config.output_dir.join(REGION_FILE), &["mu", "R", "Re"], &rows)?;
    let file = RegionFile {
        metadata: Metadata::new(config),
        mu_grid: mu_grid.to_vec(),
        tradeoff,
        tradeoff_tol,
        points: points
            .into_iter()
            .map(|q| RegionPoint { rate_r: s * q.rate_r, equivocation_re: s * q.equivocation_re, ..q })
            .collect(),
    };
    write_json(&config.output_dir.join(REGION_DISTS_FILE), &file)?;
    Ok(file)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SweepVar {
    Peak,
    Average,
    Delta,
}

/// One sweep row, in nats per second.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub c_s: Option<f64>,
    pub c_b: Option<f64>,
    pub c_e: Option<f64>,
    pub ct_bound: Option<f64>,
    pub hi_bound: Option<f64>,
    /// `ok`, or the first error met while filling the row.
    pub status: String,
}

impl SweepRow {
    pub fn ok(&self) -> bool {
        self.status == "ok"
    }
}

fn instance(config: &RunConfig, var: SweepVar, value: f64) -> Outcome<(ChannelParams, IntensityConstraints)> {
    let peak = || config.constraints.peak().ok_or_else(|| Failure::invalid("sweeps need `constraints.peak`"));
    Ok(match var {
        SweepVar::Peak => (config.params, config.constraints_at_peak(value)?),
        SweepVar::Average => {
            if config.average_ratio.is_some() {
                return Err(Failure::invalid("an average sweep conflicts with `constraints.average_ratio`"));
            }
            (config.params, IntensityConstraints::new(Some(peak()?), Some(value))?)
        }
        SweepVar::Delta => {
            peak()?;
            (config.params.with_delta(value)?, config.constraints)
        }
    })
}

fn sweep_row(
    value: f64,
    params: &ChannelParams,
    constraints: &IntensityConstraints,
    solver: &SolverConfig,
) -> SweepRow {
    let mut row =
        SweepRow { value, c_s: None, c_b: None, c_e: None, ct_bound: None, hi_bound: None, status: "ok".into() };
    let fail = |row: &mut SweepRow, what: &str, err: pwc_core::Error| {
        if row.ok() {
            row.status = format!("{what}: {err}");
        }
    };
    match optimizer::solve(0.0, params, constraints, solver) {
        Ok(r) => row.c_s = Some(r.objective),
        Err(e) => fail(&mut row, "C_S", e),
    }
    match optimizer::solve(1.0, &params.legitimate_only(), constraints, solver) {
        Ok(r) => row.c_b = Some(r.objective),
        Err(e) => fail(&mut row, "C_B", e),
    }
    match optimizer::solve(1.0, &params.eavesdropper_only(), constraints, solver) {
        Ok(r) => row.c_e = Some(r.objective),
        Err(e) => fail(&mut row, "C_E", e),
    }
    let peak = constraints.peak().expect("sweep instances have a peak");
    match asymptotics::ct_secrecy_capacity(params, peak, constraints.average()) {
        Ok(b) => row.ct_bound = Some(b.value),
        Err(e) => fail(&mut row, "ct_bound", e),
    }
    match asymptotics::high_intensity_bound(params) {
        Ok(b) => row.hi_bound = Some(b),
        Err(e) => fail(&mut row, "hi_bound", e),
    }
    row
}

/// One row per value, solved in parallel on up to `jobs` threads (0 picks
/// the number of cores). Writes `sweep.csv` in input order.
pub fn run_sweep(config: &RunConfig, var: SweepVar, values: &[f64], jobs: usize) -> Outcome<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Failure::invalid("the sweep needs at least one value"));
    }
    if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Failure::invalid("sweep values must be finite and > 0"));
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Failure::invalid("sweep values must be strictly increasing"));
    }
    config.params.require_degraded()?;
    let instances = values.iter().map(|&v| instance(config, var, v)).collect::<Outcome<Vec<_>>>()?;
    let rows: Vec<SweepRow> = pool(jobs)?.install(|| {
        values.par_iter().zip(instances.par_iter()).map(|(&v, (p, c))| sweep_row(v, p, c, &config.solver)).collect()
    });

    fs::create_dir_all(&config.output_dir)?;
    let s = config.log_base.scale();
    let cell = |v: Option<f64>| v.map_or_else(String::new, |v| csv_num(s * v));
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                csv_num(r.value),
                cell(r.c_s),
                cell(r.c_b),
                cell(r.c_e),
                cell(r.ct_bound),
                cell(r.hi_bound),
                r.status.clone(),
            ]
        })
        .collect();
    write_csv(
        &config.output_dir.join(SWEEP_FILE),
        &["value", "C_S", "C_B", "C_E", "ct_bound", "hi_bound", "status"],
        &table,
    )?;
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticsFile {
    pub metadata: Metadata,
    pub report: AsymptoticReport,
    /// Slope `Phi(A)` of the fixed-peak low-average law.
    pub phi_at_peak: Option<f64>,
    pub ct_bound: Option<f64>,
    pub high_intensity_bound: f64,
}

/// Classifies the regime, evaluates the closed forms that apply and writes
/// `asymptotics.json`.
pub fn run_asymptotics(config: &RunConfig) -> Outcome<AsymptoticsFile> {
    let (p, c) = (&config.params, &config.constraints);
    let mut report = asymptotics::classify_regime(p, c)?;
    let s = config.log_base.scale();
    report.value_or_bounds = match report.value_or_bounds {
        Estimate::Coefficient(v) => Estimate::Coefficient(s * v),
        Estimate::Bounds { lower, upper } => Estimate::Bounds { lower: s * lower, upper: s * upper },
    };
    let phi_at_peak = c.peak().map(|a| asymptotics::phi(a, p)).transpose()?.map(|v| s * v);
    let ct_bound =
        c.peak().map(|a| asymptotics::ct_secrecy_capacity(p, a, c.average())).transpose()?.map(|b| s * b.value);
    let file = AsymptoticsFile {
        metadata: Metadata::new(config),
        report,
        phi_at_peak,
        ct_bound,
        high_intensity_bound: s * asymptotics::high_intensity_bound(p)?,
    };
    fs::create_dir_all(&config.output_dir)?;
    write_json(&config.output_dir.join(ASYMPTOTICS_FILE), &file)?;
    Ok(file)
}

fn pool(jobs: usize) -> Outcome<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Failure::invalid(format!("cannot start worker threads: {e}")))
}
