use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use pwc_cli::commands::{run_region, run_solve, run_sweep, run_verify, SolutionFile, SweepVar};
use pwc_cli::config::{LogBase, RunConfig};

const FIG: &str = "channel.alpha_b = 2.0\nchannel.lambda_b = 1.0\nchannel.alpha_e = 1.0\n\
                   channel.lambda_e = 2.0\nchannel.delta = 0.5\n";

fn pwc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pwc")).args(args).output().unwrap()
}

fn config(dir: &Path, extra: &str) -> String {
    fs::create_dir_all(dir).unwrap();
    let path = dir.join("run.toml");
    fs::write(&path, format!("{FIG}{extra}")).unwrap();
    path.to_string_lossy().into_owned()
}

fn load(dir: &Path, sets: &[&str]) -> RunConfig {
    let mut all: Vec<String> = sets.iter().map(|s| s.to_string()).collect();
    all.push(format!("output.dir=\"{}\"", dir.display()));
    let path = config(dir, "");
    RunConfig::load(Some(Path::new(&path)), &all).unwrap()
}

#[test]
fn solve_writes_a_certified_slack_curve() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), "constraints.peak = 10\nconstraints.average = 2.5\n");
    let out = tmp.path().join("fig");
    let o = pwc(&["solve", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let sol: SolutionFile = serde_json::from_str(&fs::read_to_string(out.join("solution.json")).unwrap()).unwrap();
    assert_eq!(sol.dist.len(), 4);
    let csv = fs::read_to_string(out.join("kkt_slack.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,slack"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (x, s) = l.split_once(',').unwrap();
            (x.parse().unwrap(), s.parse().unwrap())
        })
        .collect();
    assert!(rows.len() >= 2001);
    assert!(rows.iter().all(|&(_, s)| s >= -1e-6));
    for &x in sol.dist.locations() {
        let (_, s) = rows.iter().min_by(|a, b| (a.0 - x).abs().total_cmp(&(b.0 - x).abs())).unwrap();
        assert!(s.abs() <= 1e-6, "slack {s} at {x}");
    }
}

#[test]
fn stored_solutions_reverify() {
    let tmp = tempfile::tempdir().unwrap();
    for base in [LogBase::Nats, LogBase::Bits] {
        let dir = tmp.path().join(base.as_str());
        let cfg = load(
            &dir,
            &["constraints.peak=4", "constraints.average=1", &format!("output.log_base=\"{}\"", base.as_str())],
        );
        let res = run_solve(&cfg, 0.0).unwrap();
        let v = run_verify(&dir.join("solution.json")).unwrap();
        assert!(v.reproduced() && v.recomputed.passed, "{v:?}");
        assert!(v.discrepancy <= 1e-12);
        let sol: SolutionFile = serde_json::from_str(&fs::read_to_string(dir.join("solution.json")).unwrap()).unwrap();
        assert!((sol.objective - base.scale() * res.objective).abs() < 1e-15);
        assert_eq!(sol.metadata.units, format!("{}/second", base.as_str()));
    }
    let o = pwc(&["verify", tmp.path().join("bits/solution.json").to_str().unwrap()]);
    assert!(o.status.success());
}

#[test]
fn tampered_solution_fails_verification() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = load(tmp.path(), &["constraints.peak=4", "constraints.average=1"]);
    run_solve(&cfg, 0.0).unwrap();
    let path = tmp.path().join("solution.json");
    let mut sol: SolutionFile = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    sol.gamma *= 2.0;
    fs::write(&path, serde_json::to_string(&sol).unwrap()).unwrap();
    assert_eq!(pwc(&["verify", path.to_str().unwrap()]).status.code(), Some(2));
    fs::write(&path, "{").unwrap();
    assert_eq!(pwc(&["verify", path.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), "constraints.peak = 10\nconstraints.average = 2.5\n");
    let out = tmp.path().join("o");
    let out = out.to_str().unwrap();

    let o = pwc(&["solve", "--config", &cfg, "--set", "channel.alpha_e=3", "--out", out]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("alpha_b >= alpha_e") && err.contains("lambda_b/alpha_b <= lambda_e/alpha_e"), "{err}");

    let o = pwc(&["solve", "--config", &cfg, "--set", "solver.max_outer_iters=1", "--out", out]);
    assert_eq!(o.status.code(), Some(2));

    let o = pwc(&["solve", "--config", &cfg, "--set", "constraints.peak=", "--set", "solver.nope=1"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(pwc(&["solve", "--config", &cfg, "--mu", "2", "--out", out]).status.code(), Some(1));
    assert_eq!(pwc(&["solve", "--frobnicate"]).status.code(), Some(1));
    assert_eq!(pwc(&["sweep", "--config", &cfg, "--var", "peak", "--out", out]).status.code(), Some(1));
    assert_eq!(pwc(&["sweep", "--config", &cfg, "--var", "peak", "--values", "3,2"]).status.code(), Some(1));
    let avg_only = config(tmp.path(), "constraints.average = 0.5\n");
    assert_eq!(pwc(&["solve", "--config", &avg_only, "--out", out]).status.code(), Some(1));
    assert_eq!(pwc(&["--help"]).status.code(), Some(0));
}

#[test]
fn identical_channels_have_zero_objective() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = load(tmp.path(), &["channel.alpha_e=2", "channel.lambda_e=1", "constraints.peak=5"]);
    let res = run_solve(&cfg, 0.0).unwrap();
    assert_eq!(res.objective, 0.0);
    let sol: SolutionFile =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("solution.json")).unwrap()).unwrap();
    assert_eq!(sol.objective, 0.0);
}

#[test]
fn single_mu_region_matches_solve() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = load(tmp.path(), &["constraints.peak=4", "constraints.average=1"]);
    let region = run_region(&cfg, &[0.0], false, 1).unwrap();
    assert_eq!(region.tradeoff, None);
    let res = run_solve(&cfg, 0.0).unwrap();
    let csv = fs::read_to_string(tmp.path().join("region.csv")).unwrap();
    let row: Vec<f64> = csv.lines().nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(csv.lines().count(), 2);
    assert!((row[1] - res.rates.i_b).abs() < 1e-9 && (row[2] - res.objective).abs() < 1e-9);
}

#[test]
fn region_records_the_tradeoff() {
    let tmp = tempfile::tempdir().unwrap();
    let grid = [0.0, 0.5, 1.0];
    let cfg = load(&tmp.path().join("3"), &["constraints.peak=3", "constraints.average=0.75"]);
    assert_eq!(run_region(&cfg, &grid, false, 1).unwrap().tradeoff, Some(false));
    let cfg = load(&tmp.path().join("4"), &["constraints.peak=4", "constraints.average=1"]);
    let warm = run_region(&cfg, &grid, false, 1).unwrap();
    assert_eq!(warm.tradeoff, Some(true));
    let cold = run_region(&cfg, &grid, true, 2).unwrap();
    assert_eq!(cold.tradeoff, Some(true));
    for (a, b) in warm.points.iter().zip(&cold.points) {
        assert!((a.rate_r - b.rate_r).abs() < 1e-9 && (a.equivocation_re - b.equivocation_re).abs() < 1e-9);
    }
}

#[test]
fn smaller_slots_give_more_secrecy() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = load(tmp.path(), &["constraints.peak=4", "constraints.average_ratio=0.25"]);
    let rows = run_sweep(&cfg, SweepVar::Delta, &[0.1, 0.25, 0.5], 0).unwrap();
    assert!(rows.iter().all(|r| r.ok()));
    // values ascend in delta, so C_S must descend
    for w in rows.windows(2) {
        assert!(w[1].c_s.unwrap() <= w[0].c_s.unwrap() + 1e-9);
    }
    let csv = fs::read_to_string(tmp.path().join("sweep.csv")).unwrap();
    assert!(csv.starts_with("value,C_S,C_B,C_E,ct_bound,hi_bound,status\n0.1,"));
}

#[test]
fn average_sweep() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = load(tmp.path(), &["constraints.peak=4", "constraints.average=1"]);
    let rows = run_sweep(&cfg, SweepVar::Average, &[0.5, 1.0, 2.0, 4.0], 2).unwrap();
    for w in rows.windows(2) {
        assert!(w[1].c_s.unwrap() >= w[0].c_s.unwrap() - 1e-9);
    }
    // E >= A / 2 leaves the peak-only optimum
    assert!((rows[2].c_s.unwrap() - rows[3].c_s.unwrap()).abs() < 1e-9);
}

#[test]
fn asymptotics_report() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), "constraints.peak = 0.01\nconstraints.average_ratio = 0.25\n");
    let out = tmp.path().join("a");
    let o = pwc(&["asymptotics", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("peak-avg-ratio-low") && text.contains("0.328125"), "{text}");
    let file: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("asymptotics.json")).unwrap()).unwrap();
    assert_eq!(file["report"]["scaling_law"], "C_S ~ c*A^2");
    assert!(file["ct_bound"].as_f64().unwrap() > 0.0);

    let cfg = config(tmp.path(), "constraints.average = 1e-4\n");
    let o = pwc(&["asymptotics", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&o.stdout).contains("avg-only-diff-gains-low"));
}
