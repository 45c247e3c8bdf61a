use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn freehyper(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freehyper"))
        .args(args)
        .env_remove("FREEHYPER_THREADS")
        .output()
        .expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    freehyper(args).status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).trim().to_string()
}

fn read_json(path: &Path) -> Vec<Value> {
    let text = std::fs::read_to_string(path).unwrap();
    serde_json::from_str::<Value>(&text).unwrap().as_array().unwrap().clone()
}

fn strip_timing(records: &mut [Value]) {
    for r in records {
        r.as_object_mut().unwrap().remove("wall_ms");
    }
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["--version"]), 0);
    assert_eq!(code(&[]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(code(&["suite", "no-such-suite", "--seed", "1"]), 2);
    assert_eq!(code(&["suite", "beta"]), 2, "suites need a seed");
    assert_eq!(code(&["moments", "--word", "1:1,oops"]), 2);
    assert_eq!(code(&["norm", "--model", "group", "--element", "1[1]", "--p", "0.5"]), 2);
    assert_eq!(code(&["--threads", "0", "suite", "beta", "--seed", "1"]), 2);
}

#[test]
fn scalar_commands_print_values() {
    let out = freehyper(&["moments", "--word", "1:1,2:1,2:1,1:1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).parse::<f64>().unwrap(), 1.0);

    let out = freehyper(&["moments", "--word", "1:1,2:1,1:1,2:1"]);
    assert_eq!(stdout(&out).parse::<f64>().unwrap(), 0.0);

    let out = freehyper(&["trace", "--n", "1", "--d", "2", "--signs", "car", "--word", "1:1,1:2,1:1,1:2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).parse::<f64>().unwrap(), -1.0);

    let out = freehyper(&["norm", "--model", "group", "--element", "1[1];1[-1]", "--p", "4"]);
    let v: f64 = stdout(&out).parse().unwrap();
    assert!((v - 6f64.powf(0.25)).abs() < 1e-8, "{v}");
}

#[test]
fn random_signs_need_a_seed() {
    assert_eq!(code(&["trace", "--n", "2", "--m", "2", "--word", "1:1,2:1"]), 2);
    assert_eq!(code(&["trace", "--n", "2", "--m", "2", "--word", "1:1,2:1", "--seed", "3"]), 0);
}

#[test]
fn hc_exit_codes_follow_the_verdict() {
    let base = ["hc", "--model", "spin", "--n", "1", "--d", "2", "--signs", "car", "--element", "1@;0.5@1:1;0.25@1:2", "--p", "1.5", "--q", "3"];
    assert_eq!(code(&base), 0);
    let mut early = base.to_vec();
    early.extend(["--time", "0.01"]);
    assert_eq!(code(&early), 1, "far below the optimal time the bound fails");
}

#[test]
fn json_and_csv_reports() {
    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("beta.json");
    assert_eq!(code(&["suite", "beta", "--seed", "1", "--out", json_path.to_str().unwrap()]), 0);
    let records = read_json(&json_path);
    assert_eq!(records.len(), 1);
    let r = &records[0];
    for key in ["check", "params", "lhs", "rhs", "margin", "tol", "pass", "seed", "wall_ms"] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
    assert_eq!(r["check"], "beta/scan");
    assert_eq!(r["pass"], true);
    assert_eq!(r["params"]["config"]["command"], "suite");

    let csv_path = dir.path().join("beta.csv");
    let args = ["suite", "beta", "--seed", "1", "--format", "csv", "--out", csv_path.to_str().unwrap()];
    assert_eq!(code(&args), 0);
    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["check", "params", "lhs", "rhs", "margin", "tol", "pass", "seed", "wall_ms"]);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][0], "beta/scan");
    assert_eq!(&rows[0][6], "true");
    let params: Value = serde_json::from_str(&rows[0][1]).unwrap();
    assert_eq!(params["config"]["seed"], 1);
}

#[test]
fn reports_replay_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let path = dir.path().join(name);
        let args = ["--threads", threads, "clt", "--study", "moments", "--word", "1:1,2:1,1:1,2:1", "--n", "2", "--m-list", "2,4", "--trials", "200", "--seed", "9", "--out", path.to_str().unwrap()];
        let status = code(&args);
        assert!(status == 0 || status == 1);
        let mut records = read_json(&path);
        strip_timing(&mut records);
        for r in &mut records {
            r["params"]["config"].as_object_mut().unwrap().remove("out");
            r["params"]["config"].as_object_mut().unwrap().remove("threads");
        }
        records
    };
    let a = run("a.json", "1");
    assert_eq!(a, run("b.json", "1"));
    assert_eq!(a, run("c.json", "2"), "results must not depend on the thread count");
}

#[test]
fn threads_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_freehyper"))
        .args(["suite", "beta", "--seed", "1"])
        .env("FREEHYPER_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_freehyper"))
        .args(["--threads", "1", "suite", "beta", "--seed", "1"])
        .env("FREEHYPER_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "the flag takes precedence");
}
