use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use mfg_cli::output::{read_convergence, CONVERGENCE_FILE, SUMMARY_FILE, TRAJECTORY_FILE};
use mfg_cli::{execute, write_outputs, CliError, Plan, RunConfig, Summary, TrajectoryTable};
use mfg_core::{NoSink, TimeGrid};
use tempfile::TempDir;

fn bundled(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn mfg(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_mfg")).args(args).output().unwrap()
}

fn run_to(config: &Path, out: &Path) -> i32 {
    let out = mfg(&[
        "run",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--quiet",
    ]);
    out.status.code().unwrap()
}

fn summary(dir: &Path) -> Summary {
    serde_json::from_str(&std::fs::read_to_string(dir.join(SUMMARY_FILE)).unwrap()).unwrap()
}

const SMALL: &str = r#"{
  "mode": "timedep",
  "model": { "paradigm_shift": { "a1": 1.0, "a2": 0.0, "r": 1.0 } },
  "grid": { "T": 2.0, "N": 2 },
  "boundary": { "theta0": [0.7, 0.3], "uT": [0.0, 0.5] },
  "init": { "kind": "random", "amplitude": 0.1 },
  "flow": { "step": 0.5, "max_iters": 5000, "tol": 1e-9 },
  "seed": 11
}"#;

fn write_config(dir: &TempDir, text: &str) -> PathBuf {
    let path = dir.path().join("config.json");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn stationary_bundle_approaches_the_stationary_solution() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(run_to(&bundled("stationary_fig1.json"), tmp.path()), 0);
    let records = read_convergence(&tmp.path().join(CONVERGENCE_FILE)).unwrap();
    assert!(records.last().unwrap().distance.unwrap() < 1e-2);
    let s = summary(tmp.path());
    assert!((s.k_bar.unwrap() - 0.5).abs() <= 1e-2);
    let traj = TrajectoryTable::read_csv(&tmp.path().join(TRAJECTORY_FILE)).unwrap();
    assert_eq!(traj.times.len(), s.iters + 1);
    assert_eq!(traj.theta[0], vec![0.8, 0.2]);
}

#[test]
fn analytic_bundle_meets_its_tolerances() {
    let tmp = TempDir::new().unwrap();
    let start = Instant::now();
    assert_eq!(run_to(&bundled("timedep_analytic.json"), tmp.path()), 0);
    assert!(start.elapsed().as_secs() < 60);
    let s = summary(tmp.path());
    assert!(s.converged);
    assert!(s.h1_distance.unwrap() <= 1e-3, "{s:?}");
    assert!(s.hamiltonian_std.unwrap() <= 1e-3, "{s:?}");
    let d: Vec<f64> = read_convergence(&tmp.path().join(CONVERGENCE_FILE))
        .unwrap()
        .iter()
        .map(|r| r.distance.unwrap())
        .collect();
    assert!(d.windows(2).all(|w| w[1] <= w[0] + 1e-10));
}

#[test]
fn perturbed_bundle_runs_within_a_minute() {
    let tmp = TempDir::new().unwrap();
    let start = Instant::now();
    assert_eq!(run_to(&bundled("timedep_perturbed.json"), tmp.path()), 0);
    assert!(start.elapsed().as_secs() < 60);
    let s = summary(tmp.path());
    assert_eq!(s.h1_distance, None);
    let traj = TrajectoryTable::read_csv(&tmp.path().join(TRAJECTORY_FILE)).unwrap();
    assert_eq!(traj.times.len(), 401);
    assert_eq!(traj.theta[0], vec![0.9, 0.1]);
    assert_eq!(traj.u[400], vec![0.0, 1.0]);
}

#[test]
fn bundled_configs_pass_check() {
    for name in [
        "stationary_fig1.json",
        "timedep_analytic.json",
        "timedep_perturbed.json",
    ] {
        let out = mfg(&["check", bundled(name).to_str().unwrap()]);
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn malformed_json_fails_without_outputs() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(&tmp, "{ \"mode\": \"timedep\", ");
    let out_dir = tmp.path().join("out");
    assert_eq!(run_to(&config, &out_dir), 1);
    assert!(!out_dir.exists());
}

#[test]
fn config_errors_name_the_field() {
    let cases = [
        (SMALL.replace("\"step\": 0.5", "\"step\": -1.0"), "flow.step"),
        (SMALL.replace("[0.7, 0.3]", "[0.7, 0.4]"), "boundary.theta0"),
        (SMALL.replace("\"N\": 2", "\"N\": 1"), "grid"),
        (SMALL.replace("\"tol\": 1e-9", "\"tol\": \"small\""), "flow.tol"),
        (SMALL.replace("\"a1\": 1.0,", ""), "model.paradigm_shift"),
        (SMALL.replace("\"seed\": 11", "\"seed\": 11, \"extra\": 1"), "extra"),
        (
            SMALL.replace(",\n  \"seed\": 11", ",\n  \"reference\": \"analytic_paradigm\""),
            "reference",
        ),
    ];
    for (text, field) in &cases {
        let err = RunConfig::from_json(text).and_then(|c| c.plan()).unwrap_err();
        assert!(matches!(&err, CliError::Config { .. }), "{err}");
        assert!(err.to_string().contains(field), "expected `{field}` in: {err}");
    }
    let tmp = TempDir::new().unwrap();
    let config = write_config(&tmp, &cases[1].0);
    let out_dir = tmp.path().join("out");
    let out = mfg(&["run", config.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("boundary.theta0"));
    assert!(!out_dir.exists());
    assert_eq!(mfg(&["check", config.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn non_convergence_exits_with_two() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(&tmp, &SMALL.replace("\"max_iters\": 5000", "\"max_iters\": 3"));
    let out_dir = tmp.path().join("out");
    assert_eq!(run_to(&config, &out_dir), 2);
    let s = summary(&out_dir);
    assert!(!s.converged);
    assert_eq!(s.iters, 3);
}

#[test]
fn identical_configs_give_identical_bytes() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(&tmp, SMALL);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(run_to(&config, &a), 0);
    assert_eq!(run_to(&config, &b), 0);
    for file in [TRAJECTORY_FILE, CONVERGENCE_FILE, SUMMARY_FILE] {
        assert_eq!(
            std::fs::read(a.join(file)).unwrap(),
            std::fs::read(b.join(file)).unwrap(),
            "{file}"
        );
    }
    let other = write_config(&tmp, &SMALL.replace("\"seed\": 11", "\"seed\": 12"));
    let c = tmp.path().join("c");
    run_to(&other, &c);
    let first = mfg_cli::output::read_convergence(&a.join(CONVERGENCE_FILE)).unwrap();
    let reseeded = mfg_cli::output::read_convergence(&c.join(CONVERGENCE_FILE)).unwrap();
    assert_ne!(first[0], reseeded[0]);
}

#[test]
fn trajectory_csv_round_trips_bitwise() {
    let tmp = TempDir::new().unwrap();
    let plan = RunConfig::from_json(SMALL).unwrap().plan().unwrap();
    let outcome = execute(&plan, &mut NoSink).unwrap();
    write_outputs(&outcome, tmp.path()).unwrap();

    let text = std::fs::read_to_string(tmp.path().join(TRAJECTORY_FILE)).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,theta_1,theta_2,u_1,u_2"));
    assert_eq!(lines.count(), 3);

    let parsed = TrajectoryTable::read_csv(&tmp.path().join(TRAJECTORY_FILE)).unwrap();
    assert_eq!(parsed, outcome.trajectory);
    let Plan::Timedep { init, .. } = &plan else {
        unreachable!()
    };
    let rebuilt = parsed.to_pair(TimeGrid::new(2.0, 2).unwrap()).unwrap();
    assert!(rebuilt.shares_boundary_with(init));
    assert_eq!(TrajectoryTable::from_pair(&rebuilt), outcome.trajectory);

    let records = read_convergence(&tmp.path().join(CONVERGENCE_FILE)).unwrap();
    assert_eq!(records, outcome.records);
}

#[test]
fn out_flag_overrides_the_config_directory() {
    let tmp = TempDir::new().unwrap();
    let configured = tmp.path().join("configured");
    let text = SMALL.replace(
        "\"seed\": 11",
        &format!("\"seed\": 11, \"output_dir\": {:?}", configured.to_str().unwrap()),
    );
    let config = write_config(&tmp, &text);
    let out = mfg(&["run", config.to_str().unwrap(), "--quiet"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(configured.join(SUMMARY_FILE).exists());
    let flagged = tmp.path().join("flagged");
    assert_eq!(run_to(&config, &flagged), 0);
    assert!(flagged.join(SUMMARY_FILE).exists());
}
