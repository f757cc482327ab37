use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pwc_cli::commands::{self, SweepVar};
use pwc_cli::config::{LogBase, RunConfig};
use pwc_cli::output::sig;
use pwc_cli::{Failure, Outcome};
use pwc_core::region::uniform_mu_grid;

/// Secrecy capacity and rate-equivocation tools for the degraded
/// discrete-time Poisson wiretap channel.
#[derive(Parser)]
#[command(name = "pwc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML file of dotted keys (`channel.alpha_b = 2.0`).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory (`output.dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Unit of the written information quantities (`output.log_base`).
    #[arg(long, value_enum)]
    log_base: Option<LogBase>,
}

impl Common {
    fn load(&self) -> Outcome<RunConfig> {
        let mut overrides = self.set.clone();
        if let Some(out) = &self.out {
            overrides.push(format!("output.dir={}", toml_string(&out.to_string_lossy())));
        }
        if let Some(b) = self.log_base {
            overrides.push(format!("output.log_base={}", toml_string(b.as_str())));
        }
        RunConfig::load(self.config.as_deref(), &overrides)
    }
}

fn toml_string(s: &str) -> String {
    toml::Value::String(s.to_string()).to_string()
}

#[derive(Subcommand)]
enum Command {
    /// Maximize mu*I_B + (1-mu)*(I_B - I_E); writes solution.json and kkt_slack.csv.
    Solve {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.0)]
        mu: f64,
    },
    /// Trace the rate-equivocation boundary; writes region.csv and region_dists.json.
    Region {
        #[command(flatten)]
        common: Common,
        /// Number of uniform mu values on [0, 1].
        #[arg(long = "mu-grid", default_value_t = 21)]
        mu_grid: usize,
        /// Solve every mu independently instead of warm-starting.
        #[arg(long)]
        cold: bool,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Solve over a list of values of one variable; writes sweep.csv.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        var: SweepVar,
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        values: Vec<f64>,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Classify the asymptotic regime; writes asymptotics.json.
    Asymptotics {
        #[command(flatten)]
        common: Common,
    },
    /// Re-check the KKT certificate of a stored solution.json.
    Verify { path: PathBuf },
}

fn run(cli: Cli) -> Outcome<()> {
    match cli.command {
        Command::Solve { common, mu } => {
            let config = common.load()?;
            let res = commands::run_solve(&config, mu)?;
            let s = config.log_base.scale();
            println!(
                "objective {} {}/s, gamma {}",
                sig(s * res.objective, 10),
                config.log_base.as_str(),
                sig(s * res.gamma, 10)
            );
            for (x, w) in res.dist.points() {
                println!("  x = {:<16} p = {}", sig(x, 10), sig(w, 10));
            }
            println!("KKT max violation {} after {} iterations", sig(res.kkt.max_violation, 4), res.iterations);
        }
        Command::Region { common, mu_grid, cold, jobs } => {
            let config = common.load()?;
            let grid = uniform_mu_grid(mu_grid)?;
            let file = commands::run_region(&config, &grid, cold, jobs)?;
            println!("{} boundary points written to {}", file.points.len(), config.output_dir.display());
            if let Some(t) = file.tradeoff {
                println!("rate-equivocation tradeoff: {}", if t { "yes" } else { "no" });
            }
        }
        Command::Sweep { common, var, values, jobs } => {
            let config = common.load()?;
            let rows = commands::run_sweep(&config, var, &values, jobs)?;
            let failed: Vec<_> = rows.iter().filter(|r| !r.ok()).collect();
            println!("{} rows written to {}", rows.len(), config.output_dir.display());
            if !failed.is_empty() {
                for r in &failed {
                    eprintln!("value {}: {}", sig(r.value, 10), r.status);
                }
                return Err(Failure::stall(format!("{} of {} rows failed", failed.len(), rows.len())));
            }
        }
        Command::Asymptotics { common } => {
            let config = common.load()?;
            let file = commands::run_asymptotics(&config)?;
            let text = serde_json::to_string_pretty(&file.report).expect("report encodes");
            println!("{text}");
        }
        Command::Verify { path } => {
            let v = commands::run_verify(&path)?;
            println!(
                "stored max violation {}, recomputed {}; discrepancy {}",
                sig(v.stored.max_violation, 6),
                sig(v.recomputed.max_violation, 6),
                sig(v.discrepancy, 3)
            );
            if !v.reproduced() {
                return Err(Failure::stall("the stored KKT report does not reproduce"));
            }
            if !v.recomputed.passed {
                return Err(Failure::stall("the KKT certificate fails"));
            }
            println!("certificate reproduced");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { Failure::INVALID } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}
