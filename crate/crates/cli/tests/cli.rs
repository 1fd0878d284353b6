use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fockgate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fockgate")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.push("--json");
    let o = fockgate(&all);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let schema: Value = serde_json::from_str(fockgate::report::SCHEMA).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).unwrap();
    if let Err(errors) = compiled.validate(&v) {
        let msgs: Vec<String> = errors.map(|e| format!("{} at {}", e, e.instance_path)).collect();
        panic!("report does not match schema: {msgs:#?}");
    }
    v
}

fn circuit(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "circuits", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn amps(v: &Value) -> Vec<(f64, f64)> {
    v["output"]["amplitudes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| (p[0].as_f64().unwrap(), p[1].as_f64().unwrap()))
        .collect()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-12
}

#[test]
fn destructive_defaults() {
    let v = json(&["csign-destructive", "--policy", "strict"]);
    assert!(close(v["accepted_probability"].as_f64().unwrap(), 0.25));
    let out = amps(&v);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    assert!(close(out[0].0, (h * 1e12).round() / 1e12));
    assert!(close(out[1].0, -(h * 1e12).round() / 1e12));
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["policy"], "strict");

    let v = json(&["csign-destructive", "--policy", "feedforward"]);
    assert!(close(v["accepted_probability"].as_f64().unwrap(), 0.5));
}

#[test]
fn zero_control_leaves_target_alone() {
    let v = json(&["csign-destructive", "--control", "1,0", "0,0", "--target", "0.6,0", "0,0.8"]);
    let out = amps(&v);
    assert!(close(out[0].0, 0.6) && close(out[1].1, 0.8));
}

#[test]
fn nondestructive_commands() {
    let v = json(&["csign-nondestructive", "--control", "0,0", "1,0", "--target", "0,0", "1,0", "--policy", "feedforward"]);
    assert!(close(v["accepted_probability"].as_f64().unwrap(), 0.25));
    let out = amps(&v);
    assert!(close(out[3].0, -1.0));

    let v = json(&["csign-nondestructive", "--control-bloch", "1.2,0.3", "--target-bloch", "2.1,-1.4", "--policy", "strict"]);
    assert!(close(v["accepted_probability"].as_f64().unwrap(), 0.0625));
    assert!(close(v["fidelity"].as_f64().unwrap(), 1.0));
}

#[test]
fn encoder_command() {
    let v = json(&["encoder", "--n", "2"]);
    assert!(close(v["accepted_probability"].as_f64().unwrap(), 0.25));
    let v = json(&["encoder", "--n", "2", "--policy", "feedforward"]);
    assert!(close(v["accepted_probability"].as_f64().unwrap(), 0.5));
    let v = json(&["encoder", "--n", "4", "--input", "0.6,0", "0.8,0"]);
    assert!(close(v["accepted_probability"].as_f64().unwrap(), 0.25));
    let out = amps(&v);
    assert_eq!(out.len(), 16);
    assert!(close(out[0].0, 0.6) && close(out[15].0, 0.8));
    assert_eq!(fockgate(&["encoder", "--n", "1"]).status.code(), Some(2));
}

#[test]
fn fig1_file_matches_destructive_defaults() {
    let file = json(&["run", &circuit("fig1.loc")]);
    let gate = json(&["csign-destructive"]);
    let file_branches = file["branches"].as_array().unwrap();
    let gate_branches = gate["branches"].as_array().unwrap();
    assert_eq!(file_branches.len(), gate_branches.len());
    for (f, g) in file_branches.iter().zip(gate_branches) {
        assert_eq!(f["pattern"], g["pattern"]);
        assert_eq!(f["probability"], g["probability"]);
        assert_eq!(f["accepted"], g["accepted"]);
        assert_eq!(f["residual"], g["residual"]);
    }
    assert_eq!(file["accepted_probability"], gate["accepted_probability"]);
}

#[test]
fn table_and_json_agree() {
    let table = stdout(&fockgate(&["csign-destructive", "--target", "0.6,0", "0.8,0"]));
    let v = json(&["csign-destructive", "--target", "0.6,0", "0.8,0"]);
    for b in v["branches"].as_array().unwrap() {
        let p = b["probability"].as_f64().unwrap();
        if p > 0.0 {
            assert!(table.contains(&p.to_string()), "{p} missing from\n{table}");
        }
    }
    assert!(table.contains(&format!("accepted probability  {}", v["accepted_probability"].as_f64().unwrap())));
    assert!(table.contains("D1=1 D2=0"));
    assert!(table.contains("output on (1',4)"));
}

#[test]
fn normalization_rules() {
    let o = fockgate(&["csign-destructive", "--target", "0.6000001,0", "0.8,0"]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("warning"));
    let o = fockgate(&["csign-destructive", "--target", "0.6,0", "0.8,0"]);
    assert!(!stderr(&o).contains("warning"));
    let o = fockgate(&["csign-destructive", "--target", "1,0", "1,0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = fockgate(&["csign-destructive", "--target", "0,0", "0,0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = fockgate(&["csign-destructive", "--target", "abc,0", "1,0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("abc"));
}

#[test]
fn run_errors() {
    let o = fockgate(&["run", "/nonexistent/circuit.loc"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("cannot read"));

    let dir = std::env::temp_dir().join(format!("fockgate-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.loc");
    std::fs::write(&bad, "modes 2\nket |1,0>\nbs 1 7\n").unwrap();
    let o = fockgate(&["run", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains(":3:6:"), "{}", stderr(&o));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn verify_is_deterministic() {
    let a = fockgate(&["verify", "--seed", "11", "--samples", "20"]);
    let b = fockgate(&["verify", "--seed", "11", "--samples", "20"]);
    assert!(a.status.success(), "{}", stdout(&a));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.contains("8 of 16 entries agree"));
    assert!(text.contains("a[z][x]: derived 1, printed -i"));

    assert_eq!(fockgate(&["verify", "--samples", "0"]).status.code(), Some(2));
}

#[test]
fn usage_errors() {
    assert_eq!(fockgate(&["csign-destructive", "--policy", "sometimes"]).status.code(), Some(2));
    assert_eq!(fockgate(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        fockgate(&["csign-destructive", "--control", "1,0", "0,0", "--control-bloch", "1,1"]).status.code(),
        Some(2)
    );
}
