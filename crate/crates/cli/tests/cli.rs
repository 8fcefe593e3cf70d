use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn mushy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mushy"))
        .args(args)
        .env_remove("MUSHY_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn thresholds_of_the_reference_parameters() {
    let out = mushy(&["thresholds", "--alpha", "1/8", "--beta", "1", "--gamma", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["lambda_c"]["num"], 8);
    assert_eq!(v["lambda_c"]["den"], 11);
    assert_eq!(v["regime"], "WeakRetain");
    assert!(stderr(&out).contains("lambda_c = 8/11"));
}

#[test]
fn thresholds_accept_decimals_and_eps_tau() {
    let out = mushy(&["thresholds", "--alpha", "0.125", "--beta", "1", "--eps", "1/10", "--tau", "0.1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["lambda_c"]["den"], 11);
    let csv = tempfile::tempdir().unwrap();
    let path = csv.path().join("th.csv");
    let out = mushy(&["thresholds", "--alpha", "1", "--beta", "1", "--gamma", "1", "--out", path_str(&path)]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("name,value\nregime,WeakDissolve\n"));
    assert!(text.contains("lambda_plus,2/3\n"));
}

#[test]
fn invalid_configurations_exit_with_two() {
    let cases: &[&[&str]] = &[
        &["thresholds", "--alpha", "1/8", "--beta", "1", "--gamma", "2", "--eps", "1/10", "--tau", "1/10"],
        &["thresholds", "--alpha", "1/0", "--beta", "1", "--gamma", "1"],
        &["thresholds", "--alpha", "0", "--beta", "1", "--gamma", "1"],
        &["simulate-discrete", "--alpha", "1", "--beta", "1", "--gamma", "1", "--L1", "1", "--L2", "1"],
        &[
            "simulate-discrete", "--alpha", "1", "--beta", "1", "--gamma", "1", "--eps", "1/10", "--L1", "1",
            "--L2", "1", "--solver", "nope",
        ],
        &["simulate-limit", "--alpha", "1", "--beta", "1", "--gamma", "1", "--L1", "1", "--L2", "1", "--T", "1", "--law", "nope"],
        &["no-such-command"],
        &["oracle", "--alpha", "1", "--beta", "1", "--gamma", "1", "--eps", "1/10"],
        &["thresholds", "--alpha", "1", "--beta", "1", "--gamma", "1", "--out", "x.txt"],
    ];
    for args in cases {
        assert_eq!(mushy(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn discrete_trace_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let base = [
        "simulate-discrete", "--alpha", "1/8", "--beta", "1", "--gamma", "1", "--eps", "1/100", "--L1", "2/5",
        "--L2", "2/5", "--steps", "50", "--out",
    ];
    for p in [&a, &b] {
        let mut args = base.to_vec();
        args.push(path_str(p));
        assert_eq!(mushy(&args).status.code(), Some(0));
    }
    let text = std::fs::read(&a).unwrap();
    assert_eq!(text, std::fs::read(&b).unwrap());
    let text = String::from_utf8(text).unwrap();
    assert!(text.starts_with("step,h,k,L1_cells,L2_cells,"));
    assert!(text.lines().count() >= 2);
}

#[test]
fn checked_discrete_run_agrees() {
    let out = mushy(&[
        "simulate-discrete", "--alpha", "1/8", "--beta", "1", "--gamma", "1", "--eps", "1/400", "--L1", "2/5",
        "--L2", "1", "--steps", "3", "--check",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = stdout_json(&out);
    let steps = v["steps"].as_array().unwrap();
    assert!(!steps.is_empty());
    assert!(steps.iter().all(|s| s["solvers_agree"] == true));
}

#[test]
fn limit_trace_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("limit.csv");
    let out = mushy(&[
        "simulate-limit", "--alpha", "1/8", "--beta", "1", "--gamma", "1", "--L1", "0.4", "--L2", "0.4", "--T", "1",
        "--out", path_str(&path),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("t,L1,L2,event\n0,0.4,0.4,\n"));
    assert!(text.contains("Vanished"));
}

#[test]
fn oracle_on_collared_square_matches_structured_step() {
    let out = mushy(&[
        "oracle", "--alpha", "1", "--beta", "1", "--gamma", "1", "--eps", "1/40", "--width", "4", "--height", "4",
        "--collar", "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["matches_structured"], true);
    assert_eq!(v["sites"], 49);
    assert!(stderr(&out).contains("structured_match=true"));
}

#[test]
fn oracle_reads_site_lists() {
    let dir = tempfile::tempdir().unwrap();
    let sites = dir.path().join("prev.txt");
    std::fs::write(&sites, "# 3x3 square\n0 0\n0 1\n0 2\n1 0\n1 1\n1 2\n2 0\n2 1\n2 2\n").unwrap();
    let out = mushy(&[
        "oracle", "--alpha", "1/8", "--beta", "1", "--gamma", "1", "--eps", "1/10", "--collar", "0", "--sites",
        path_str(&sites),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["enumerated"], 512);
}

#[test]
fn hypothesis_violation_exits_with_three_and_keeps_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("oracle.json");
    let out = mushy(&[
        "oracle", "--alpha", "1/8", "--beta", "1", "--gamma", "1", "--eps", "1", "--width", "1", "--height", "2",
        "--out", path_str(&path),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["structure_ok"], false);
}

#[test]
fn algebra_check_is_exact() {
    let out = mushy(&[
        "algebra-check", "--alpha", "1/8", "--beta", "1", "--gamma", "1", "--eps", "1/10", "--L1", "4.37", "--L2",
        "5.2", "--box", "4",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = stdout_json(&out);
    assert_eq!(v["max_discrepancy"]["num"], 0);
    assert_eq!(v["checked"], 25);
    let out = mushy(&[
        "algebra-check", "--alpha", "1/8", "--beta", "1", "--gamma", "1", "--eps", "1/10", "--L1", "4.37", "--L2",
        "5.2", "--box", "4", "--fault", "omit-rho1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["fault_accounted"], true);
}

#[test]
fn convergence_of_a_pinned_square_is_exact() {
    let out = mushy(&[
        "convergence", "--alpha", "1/8", "--beta", "1", "--gamma", "1", "--L1", "1", "--L2", "1", "--eps-list",
        "1/10,1/20", "--T", "0.5", "--probes", "10",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = stdout_json(&out);
    for e in v["sup_errors"].as_array().unwrap() {
        assert_eq!(e[1].as_f64().unwrap(), 0.0);
    }
}

#[test]
fn sweep_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let base = [
        "--alphas", "1/8", "--betas", "1", "--gammas", "1", "--lengths", "1/2,1", "--other", "2", "--eps", "1/200",
    ];
    let mut args = vec!["sweep"];
    args.extend(base);
    args.extend(["--out", path_str(&csv)]);
    assert_eq!(mushy(&args).status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().nth(2).unwrap().contains("> lambda_c"));

    let md = dir.path().join("report.md");
    let mut args = vec!["report"];
    args.extend(base);
    args.extend(["--out", path_str(&md)]);
    assert_eq!(mushy(&args).status.code(), Some(0));
    let text = std::fs::read_to_string(&md).unwrap();
    assert!(text.contains("## Thresholds"));
    assert!(text.contains("8/11"));
}

#[test]
fn run_file_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"command": "thresholds", "params": {"alpha": "1/8", "beta": 1, "gamma": "1"}}"#,
    )
    .unwrap();
    let from_file = mushy(&["--config", path_str(&cfg)]);
    let from_flags = mushy(&["thresholds", "--alpha", "1/8", "--beta", "1", "--gamma", "1"]);
    assert_eq!(from_file.status.code(), Some(0));
    assert_eq!(from_file.stdout, from_flags.stdout);
    std::fs::write(&cfg, r#"{"params": {}}"#).unwrap();
    assert_eq!(mushy(&["--config", path_str(&cfg)]).status.code(), Some(2));
}

#[test]
fn workers_flag_and_environment() {
    let args = [
        "oracle", "--alpha", "1/8", "--beta", "1", "--gamma", "1", "--eps", "1/10", "--width", "2", "--height", "2",
        "--collar", "0",
    ];
    let mut with_flag = vec!["--workers", "1"];
    with_flag.extend(args);
    let a = mushy(&with_flag);
    let b = Command::new(env!("CARGO_BIN_EXE_mushy")).args(args).env("MUSHY_WORKERS", "3").output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let mut zero = vec!["--workers", "0"];
    zero.extend(args);
    assert_eq!(mushy(&zero).status.code(), Some(2));
}
