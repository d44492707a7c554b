use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qjunta"))
}

fn repo(path: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(path)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn qjunta")
}

fn json_ok(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} exited {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn exit_code(args: &[&str]) -> i32 {
    let out = run(args);
    assert!(out.stdout.is_empty(), "stdout must stay clean on failure");
    assert!(!out.stderr.is_empty(), "failure must explain itself on stderr");
    out.status.code().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_accepts_junta_for_any_seed() {
    let f = repo("data/junta8.json");
    let d = repo("data/junta8_dist.json");
    for seed in ["0", "1", "17", "18446744073709551615"] {
        let v = json_ok(&["run", "--function", s(&f), "--dist", s(&d), "--k", "2", "--eps", "0.1", "--seed", seed]);
        assert_eq!(v["decision"], "accept");
        let l = &v["ledger"];
        let sum = ["classical_queries", "classical_samples", "quantum_queries"]
            .iter()
            .map(|key| l[key].as_u64().unwrap())
            .sum::<u64>();
        assert_eq!(v["total"].as_u64().unwrap(), sum);
    }
}

#[test]
fn run_is_deterministic_and_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.jsonl");
    let f = repo("data/parity8.json");
    let d = repo("data/uniform8.json");
    let args = ["run", "--function", s(&f), "--dist", s(&d), "--k", "2", "--eps", "0.25", "--seed", "9"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);

    let mut with_trace = args.to_vec();
    with_trace.extend(["--trace", s(&trace)]);
    let v = json_ok(&with_trace);
    let lines: Vec<Value> = fs::read_to_string(&trace)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len() as u64, v["iterations"].as_u64().unwrap());
    for (i, rec) in lines.iter().enumerate() {
        assert_eq!(rec["iteration"].as_u64().unwrap(), i as u64 + 1);
    }
}

#[test]
fn run_amplified_variant() {
    let f = repo("data/parity8.json");
    let d = repo("data/uniform8.json");
    let v = json_ok(&[
        "run", "--function", s(&f), "--dist", s(&d), "--k", "2", "--eps", "0.25", "--seed", "4", "--variant",
        "amplified",
    ]);
    assert_eq!(v["ledger"]["classical_samples"], 0);
}

#[test]
fn run_validation_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{ not json").unwrap();
    let f = repo("data/junta8.json");
    let d = repo("data/junta8_dist.json");
    let base = |fun: &Path, eps: &'static str| {
        vec![
            "run".to_string(),
            "--function".into(),
            s(fun).into(),
            "--dist".into(),
            s(&d).into(),
            "--k".into(),
            "2".into(),
            "--eps".into(),
            eps.into(),
            "--seed".into(),
            "1".into(),
        ]
    };
    let code = |args: Vec<String>| exit_code(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(code(base(&bad, "0.1")), 2);
    assert_eq!(code(base(&f, "0")), 2);
    assert_eq!(code(base(&f, "1.5")), 2);
    assert_eq!(code(base(&repo("data/missing.json"), "0.1")), 2);

    let mut mismatched = base(&f, "0.1");
    mismatched[4] = s(&repo("data/uniform8.json")).into();
    mismatched[2] = s(&repo("data/and2.json")).into();
    assert_eq!(code(mismatched), 2);

    let mut unknown = base(&f, "0.1");
    unknown.push("--bogus".into());
    assert_eq!(run(&unknown.iter().map(String::as_str).collect::<Vec<_>>()).status.code(), Some(2));

    let no_seed = run(&["run", "--function", s(&f), "--dist", s(&d), "--k", "2", "--eps", "0.1"]);
    assert_eq!(no_seed.status.code(), Some(2));
}

#[test]
fn experiment_completeness_config() {
    let v = json_ok(&["experiment", "--config", s(&repo("configs/completeness.json"))]);
    assert_eq!(v["trials"], 1000);
    assert_eq!(v["acceptance_rate"], 1.0);
    assert_eq!(v["budget_violations"], 0);
}

#[test]
fn experiment_soundness_config() {
    let v = json_ok(&["experiment", "--config", s(&repo("configs/soundness_parity.json"))]);
    assert_eq!(v["trials"], 2000);
    assert_eq!(v["certified_distance"], 0.5);
    assert!(v["rejection_rate"].as_f64().unwrap() >= 0.466);
}

#[test]
fn experiment_reports_are_byte_identical_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("trials.csv");
    let cfg = repo("configs/soundness_amplified.json");
    let a = run(&["experiment", "--config", s(&cfg), "--trials", "50", "--csv", s(&csv)]);
    let b = run(&["experiment", "--config", s(&cfg), "--trials", "50"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let rows = fs::read_to_string(&csv).unwrap();
    assert_eq!(rows.lines().count(), 51);
    assert!(rows.starts_with("trial,decision,classical_queries,classical_samples,quantum_queries,iterations"));
}

#[test]
fn experiment_errors() {
    let cfg = repo("configs/soundness_parity.json");
    assert_eq!(exit_code(&["experiment", "--config", s(&cfg), "--trials", "0"]), 2);

    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("cfg.json");
    fs::write(
        &p,
        r#"{"n":8,"k":2,"eps":0.6,"trials":10,"master_seed":1,"fixture":{"kind":"far","family":"parity"}}"#,
    )
    .unwrap();
    assert_eq!(exit_code(&["experiment", "--config", s(&p)]), 3);

    fs::write(&p, r#"{"n":8,"k":2,"eps":0.2,"trials":10,"master_seed":1,"extra":0,"fixture":{"kind":"far","family":"parity"}}"#)
        .unwrap();
    assert_eq!(exit_code(&["experiment", "--config", s(&p)]), 2);
}

#[test]
fn distance_command() {
    let v = json_ok(&[
        "distance", "--function", s(&repo("data/junta8.json")), "--dist", s(&repo("data/junta8_dist.json")),
        "--k", "2",
    ]);
    assert_eq!(v["distance"], 0.0);
    let v = json_ok(&[
        "distance", "--function", s(&repo("data/parity8.json")), "--dist", s(&repo("data/uniform8.json")), "--k",
        "2",
    ]);
    assert_eq!(v["distance"], 0.5);
    assert_eq!(v["best_subset"].as_array().unwrap().len(), 2);
}

#[test]
fn distance_work_cap_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.json");
    let d = dir.path().join("d.json");
    fs::write(&f, format!(r#"{{"n":20,"table":"{}"}}"#, "0".repeat(1 << 18))).unwrap();
    fs::write(&d, r#"{"n":20,"uniform":true}"#).unwrap();
    assert_eq!(exit_code(&["distance", "--function", s(&f), "--dist", s(&d), "--k", "10"]), 4);
}

#[test]
fn spectrum_examples() {
    let v = json_ok(&["spectrum", "--function", s(&repo("data/const4.json")), "--cube-x", "0000", "--cube-y", "1111"]);
    assert_eq!(v["coefficients"], serde_json::json!({"∅": 1.0}));
    assert_eq!(v["squared_sum"], 1.0);

    let v = json_ok(&["spectrum", "--function", s(&repo("data/and2.json")), "--cube-x", "00", "--cube-y", "11"]);
    assert_eq!(v["coefficients"], serde_json::json!({"∅": 0.5, "{1}": 0.5, "{2}": 0.5, "{1,2}": -0.5}));

    // data/parity8.json is the parity of {1,7,8}
    let v = json_ok(&[
        "spectrum", "--function", s(&repo("data/parity8.json")), "--cube-x", "01000000", "--cube-y", "11000011",
    ]);
    let c = v["coefficients"].as_object().unwrap();
    assert_eq!(c.len(), 1);
    assert_eq!(c["{1,7,8}"].as_f64().unwrap().abs(), 1.0);

    let bad = exit_code(&["spectrum", "--function", s(&repo("data/and2.json")), "--cube-x", "0", "--cube-y", "11"]);
    assert_eq!(bad, 2);
}

#[test]
fn gen_round_trips_through_other_commands() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.json");
    let d = dir.path().join("d.json");
    let v = json_ok(&[
        "gen", "--family", "planted", "--n", "8", "--k", "2", "--eps", "0.2", "--seed", "3", "--function", s(&f),
        "--dist", s(&d),
    ]);
    let claimed = v["certified_distance"].as_f64().unwrap();
    assert!(claimed >= 0.2);
    let cert = json_ok(&["distance", "--function", s(&f), "--dist", s(&d), "--k", "2"]);
    assert_eq!(cert["distance"].as_f64().unwrap(), claimed);

    assert_eq!(
        exit_code(&[
            "gen", "--family", "parity", "--n", "8", "--k", "2", "--eps", "0.9", "--seed", "3", "--function", s(&f),
            "--dist", s(&d),
        ]),
        3
    );
}
