//! End-to-end tests of the `gfa` binary: exit codes, determinism, and the
//! documented behaviors on the stock corpus.

use std::path::PathBuf;
use std::process::{Command, Output};

fn gfa() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gfa"))
}

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn run(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = gfa();
    cmd.args(args).env_remove("GFA_SEED");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("gfa runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

#[test]
fn validate_accepts_stock_corpus() {
    for name in [
        "trivial.json",
        "z2.json",
        "z3.json",
        "z4.json",
        "s3.json",
        "pair2.json",
        "pair3.json",
        "pair4.json",
        "z2_swap_action.json",
        "z2_z3_bundle.json",
        "s3_pair2.json",
    ] {
        let out = run(&["validate", corpus(name).to_str().unwrap()], &[]);
        assert!(out.status.success(), "{name} rejected: {:?}", out);
    }
}

#[test]
fn validate_rejects_broken_table_naming_the_triple() {
    // Z3 with one composite redirected: g1∘g1 = g1 instead of g2 breaks
    // associativity/cancellation.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(
        &path,
        r#"{
          "units": ["u"],
          "arrows": [
            {"id": "g0", "src": "u", "dst": "u"},
            {"id": "g1", "src": "u", "dst": "u"},
            {"id": "g2", "src": "u", "dst": "u"}
          ],
          "inverse": {"g0": "g0", "g1": "g2", "g2": "g1"},
          "compose": [
            ["g0","g0","g0"], ["g0","g1","g1"], ["g0","g2","g2"],
            ["g1","g0","g1"], ["g1","g1","g1"], ["g1","g2","g0"],
            ["g2","g0","g2"], ["g2","g1","g0"], ["g2","g2","g1"]
          ]
        }"#,
    )
    .unwrap();
    let out = run(&["validate", path.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(
        stderr.contains("g1") && (stderr.contains('(') || stderr.contains("inverse")),
        "diagnostic should name the offending arrows: {stderr}"
    );
}

#[test]
fn nonexistent_file_is_an_input_error() {
    let out = run(&["validate", "/nonexistent/nowhere.json"], &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pair3_has_one_trivial_irrep() {
    let out = run(&["irreps", corpus("pair3.json").to_str().unwrap()], &[]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let comps = v["components"].as_array().unwrap();
    assert_eq!(comps.len(), 1);
    let irreps = comps[0]["irreps"].as_array().unwrap();
    assert_eq!(irreps.len(), 1);
    for (_, d) in irreps[0]["dims"].as_object().unwrap() {
        assert_eq!(d.as_u64(), Some(1));
    }
}

#[test]
fn check_all_passes_on_s3() {
    let path = corpus("s3.json");
    let out = run(
        &["check", path.to_str().unwrap(), "--suite", "all", "--trials", "25"],
        &[],
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["pass"], serde_json::Value::Bool(true));
    assert_eq!(v["suite"], "all");
    assert!(v["fingerprint"].as_str().unwrap().len() == 64);
}

#[test]
fn unknown_suite_is_an_input_error() {
    let out = run(
        &["check", corpus("z2.json").to_str().unwrap(), "--suite", "bogus"],
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_output_is_byte_identical_given_seed() {
    let path = corpus("z2_swap_action.json");
    let args = [
        "check",
        path.to_str().unwrap(),
        "--suite",
        "all",
        "--trials",
        "10",
        "--seed",
        "42",
    ];
    let a = run(&args, &[]);
    let b = run(&args, &[]);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn character_table_is_deterministic_and_matches_s3() {
    let path = corpus("s3.json");
    let a = run(&["character-table", path.to_str().unwrap()], &[]);
    let b = run(&["character-table", path.to_str().unwrap()], &[]);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    let comp = &v["components"][0];
    assert_eq!(comp["classes"].as_array().unwrap().len(), 3);
    let irreps = comp["irreps"].as_array().unwrap();
    assert_eq!(irreps.len(), 3);
    let dims: Vec<u64> = irreps.iter().map(|i| i["dim"].as_u64().unwrap()).collect();
    let mut sorted = dims.clone();
    sorted.sort();
    assert_eq!(sorted, vec![1, 1, 2]);
}

#[test]
fn seed_env_fallback_is_used() {
    let path = corpus("z3.json");
    let out = run(
        &["check", path.to_str().unwrap(), "--suite", "peterweyl"],
        &[("GFA_SEED", "777")],
    );
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["seed"].as_u64(), Some(777));
    // An explicit flag wins over the environment.
    let out = run(
        &["check", path.to_str().unwrap(), "--suite", "peterweyl", "--seed", "9"],
        &[("GFA_SEED", "777")],
    );
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["seed"].as_u64(), Some(9));
}

#[test]
fn fourier_diag_of_scaled_identity_indicator() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.json");
    std::fs::write(&f, r#"{"values":{"u.e":[6,0]}}"#).unwrap();
    let out = run(
        &[
            "fourier",
            corpus("s3.json").to_str().unwrap(),
            f.to_str().unwrap(),
            "--diag",
        ],
        &[],
    );
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    for (_, val) in v["values"].as_object().unwrap() {
        assert_eq!(val[0].as_f64(), Some(1.0));
        assert_eq!(val[1].as_f64(), Some(0.0));
    }
}

#[test]
fn convolve_with_identity_density_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.json");
    let e = dir.path().join("e.json");
    // Arbitrary function and the convolution identity 6·δ_e (density
    // against λ_u^u = 1/6).
    std::fs::write(&f, r#"{"values":{"u.c3":[2,1],"u.t01":[-1,0.5]}}"#).unwrap();
    std::fs::write(&e, r#"{"values":{"u.e":[6,0]}}"#).unwrap();
    let out = run(
        &[
            "convolve",
            corpus("s3.json").to_str().unwrap(),
            f.to_str().unwrap(),
            e.to_str().unwrap(),
            "--fiber",
        ],
        &[],
    );
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["values"]["u.c3"][0].as_f64(), Some(2.0));
    assert_eq!(v["values"]["u.t01"][1].as_f64(), Some(0.5));
}

#[test]
fn bench_reports_cross_check() {
    let out = run(
        &[
            "bench",
            corpus("z4.json").to_str().unwrap(),
            "--k",
            "64",
            "--reps",
            "2",
        ],
        &[],
    );
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["max_abs_err"].as_f64().unwrap() < 1e-8);
    assert_eq!(v["config"]["k"].as_u64(), Some(64));
}
