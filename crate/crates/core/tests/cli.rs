use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn nnq(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nnq"))
        .args(args)
        .current_dir(dir)
        .env_remove("NNQ_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn no_arguments_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&nnq(&[], dir.path())), 2);
    assert_eq!(code(&nnq(&["compile-control", "--bogus"], dir.path())), 2);
    assert_eq!(code(&nnq(&["compile-control", "--m", "4"], dir.path())), 2);
}

#[test]
fn compile_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let o = nnq(&["compile-control", "--m", "5", "--dim", "2", "--gate", "X", "--out", "c.json"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = nnq(&["verify", "c.json", "--sim", "boolean"], dir.path());
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("4096 cases (exhaustive), ok"));
}

#[test]
fn deleting_a_toffoli_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    nnq(&["compile-control", "--m", "5", "--out", "c.json"], dir.path());
    let mut doc: Value = serde_json::from_slice(&std::fs::read(dir.path().join("c.json")).unwrap()).unwrap();
    let steps = doc["timesteps"].as_array_mut().unwrap();
    let ops = steps
        .iter_mut()
        .map(|s| s["ops"].as_array_mut().unwrap())
        .find(|ops| ops.iter().any(|op| op["gate"] == "MCX"))
        .unwrap();
    let i = ops.iter().position(|op| op["gate"] == "MCX").unwrap();
    ops.remove(i);
    std::fs::write(dir.path().join("bad.json"), serde_json::to_vec(&doc).unwrap()).unwrap();
    let o = nnq(&["verify", "bad.json"], dir.path());
    assert_eq!(code(&o), 1);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("FAILED: controls "), "{text}");
    let o = nnq(&["verify", "bad.json", "--format", "json"], dir.path());
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(report["failure"].as_str().unwrap().starts_with("controls "));
}

#[test]
fn every_compiler_output_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    std::fs::write(p.join("r.json"), r#"{"n": 5, "pi": [[0, 2], [1, 0], [4, 3]]}"#).unwrap();
    std::fs::write(
        p.join("i.json"),
        r#"{"n": 4, "ops": [{"gate": "CNOT", "qubits": [3, 0]}, {"gate": "H", "qubits": [1]}]}"#,
    )
    .unwrap();
    std::fs::write(
        p.join("a.json"),
        r#"{"format_version": "1.0.0", "model": "CCAC", "dim": 1, "n_inputs": 3, "measurement_count": 0,
            "timesteps": [{"kind": "physical", "ops": [{"gate": "H", "qubits": [0]}]},
                          {"kind": "physical", "ops": [{"gate": "CNOT", "qubits": [0, 2]}]}]}"#,
    )
    .unwrap();
    let jobs: [&[&str]; 7] = [
        &["compile-control", "--m", "3", "--gate", "[[0,0],[1,0],[1,0],[0,0]]", "--out", "o1.json"],
        &["compile-control", "--m", "3", "--dim", "3", "--gate", "H", "--out", "o2.json"],
        &["compile-fanout", "--m", "5", "--out", "o3.json"],
        &["compile-fanout", "--m", "3", "--dim", "3", "--out", "o4.json"],
        &["compile-reorder", "r.json", "--out", "o5.json"],
        &["compile-interact", "i.json", "--out", "o6.json"],
        &["compile-ccac", "a.json", "--out", "o7.json"],
    ];
    for (i, job) in jobs.iter().enumerate() {
        let o = nnq(job, p);
        assert_eq!(code(&o), 0, "{job:?}: {}", String::from_utf8_lossy(&o.stderr));
        let name = format!("o{}.json", i + 1);
        let o = nnq(&["verify", &name, "--shots", "20"], p);
        assert_eq!(code(&o), 0, "{job:?}: {}", String::from_utf8_lossy(&o.stdout));
    }
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = nnq(&["compile-control", "--m", "7", "--gate", "H"], dir.path());
    let b = nnq(&["compile-control", "--m", "7", "--gate", "H"], dir.path());
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    std::fs::write(dir.path().join("c.json"), &a.stdout).unwrap();
    let v1 = nnq(&["verify", "c.json", "--seed", "9", "--shots", "500", "--format", "json"], dir.path());
    let v2 = nnq(&["verify", "c.json", "--seed", "9", "--shots", "500", "--format", "json"], dir.path());
    assert_eq!(v1.stdout, v2.stdout);
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("artifacts");
    let o = Command::new(env!("CARGO_BIN_EXE_nnq"))
        .args(["compile-fanout", "--m", "3"])
        .current_dir(dir.path())
        .env("NNQ_OUT_DIR", &out)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(out.join("fanout_m3_d2.json").exists());
}

#[test]
fn stats_analyze_scaling_render() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    nnq(&["compile-control", "--m", "5", "--out", "c.json"], p);
    let o = nnq(&["stats", "c.json", "--format", "json"], p);
    let stats: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(stats["depth"], 65);
    let o = nnq(&["analyze", "c.json", "--target", "2,2", "--format", "json"], p);
    let cert: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(cert["influence"].as_array().unwrap().len(), 17);
    let o = nnq(&["scaling", "--m-max", "7"], p);
    let csv = String::from_utf8(o.stdout).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.starts_with("m,n,depth,size,width,depth_bound"));
    let o = nnq(&["render", "c.json", "--out", "c.svg"], p);
    assert_eq!(code(&o), 0);
    let svg = std::fs::read_to_string(p.join("c.svg")).unwrap();
    assert!(roxmltree::Document::parse(&svg).is_ok());
    assert_eq!(code(&nnq(&["render", "c.json", "--format", "csv"], p)), 2);
}
