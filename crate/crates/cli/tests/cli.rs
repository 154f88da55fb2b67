use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jetorbit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn generator_file(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn generate_kdv_contains_the_second_flow() {
    let out = run(&["generate", "kdv", "--pmax", "2", "--hbar", "2"]);
    assert!(out.status.success());
    let v = json_of(&out);
    let e = &v["table"]["entries"]["1.0.1.2"];
    assert_eq!(e["trunc"], 2);
    let text = run(&["generate", "kdv", "--pmax", "2", "--hbar", "2", "--format", "text"]);
    let text = String::from_utf8(text.stdout).unwrap();
    assert!(text.contains("Ω(1,0;1,2) = (1/6*w[1,0]^3) + ħ*(1/12*w[1,0]*w[1,2] + 1/24*w[1,1]^2) + ħ^2*(1/240*w[1,4])"));
    assert_eq!(v["provenance"]["0.2"], "displayed");
}

#[test]
fn generate_tensor_power_is_block_diagonal() {
    let out = run(&["generate", "kdv", "--tensor", "2", "--pmax", "1", "--hbar", "0"]);
    assert!(out.status.success());
    let v = json_of(&out);
    let entries = v["table"]["entries"].as_object().unwrap();
    assert_eq!(entries.len(), 16);
    assert_eq!(entries["1.1.2.0"], entries["2.0.1.1"]);
    assert_eq!(v["colors"], 2);
}

#[test]
fn generate_principal_from_a_hessian() {
    let out = run(&["generate", "principal", "--dim", "1", "--hessian", r#"[["v"]]"#, "--pmax", "3", "--format", "text"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("Ω(1,3;1,3) = 1/252*w[1,0]^7"));
    let bad = run(&["generate", "principal", "--hessian", "[[\"v\"", "--pmax", "1"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn deform_bracket_by_r1_has_zero_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let g = generator_file(&dir, "r1.json", r#"{"kind": "r", "level": 1, "matrix": [[1]]}"#);
    let out = run(&["deform", "--target", "bracket", "--generator", &g, "--pmax", "2", "--hbar", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_of(&out);
    assert_eq!(v["pass"], true);
    assert!(v["residuals"].as_array().unwrap().iter().all(|r| r["nonzero_monomials"] == 0));
    assert!(v.get("timing_ms").is_none());
    assert_eq!(v["seed"], 7);
}

#[test]
fn deform_by_s1_leaves_the_bracket_alone() {
    let dir = tempfile::tempdir().unwrap();
    let g = generator_file(&dir, "s1.json", r#"{"kind": "s", "level": 1, "matrix": [[1]]}"#);
    let out = run(&["deform", "--generator", &g, "--hbar", "1"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["bracket"]["entries"].as_array().map(Vec::len).unwrap_or(0), 0);
}

#[test]
fn zero_generator_gives_an_empty_deformation() {
    let dir = tempfile::tempdir().unwrap();
    let g = generator_file(&dir, "zero.json", r#"{"kind": "r", "level": 2, "matrix": [[0, 0], [0, 0]]}"#);
    let out = run(&["deform", "--target", "omega", "--generator", &g, "--pmax", "1", "--format", "text"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains("dΩ("));
}

#[test]
fn bad_generators_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let parity = generator_file(&dir, "p.json", r#"{"kind": "r", "level": 2, "matrix": [[1]]}"#);
    assert_eq!(run(&["deform", "--generator", &parity]).status.code(), Some(2));
    let junk = generator_file(&dir, "j.json", "not json");
    assert_eq!(run(&["deform", "--generator", &junk]).status.code(), Some(2));
    let g = generator_file(&dir, "g.json", r#"{"kind": "r", "level": 1, "matrix": [[1]]}"#);
    assert_eq!(run(&["deform", "--generator", &g, "--tensor", "2"]).status.code(), Some(2));
    assert_eq!(run(&["deform"]).status.code(), Some(2));
}

#[test]
fn verify_suites_pass() {
    let out = run(&["verify", "lemmas", "--seed", "7", "--count", "100"]);
    assert!(out.status.success());
    let v = json_of(&out);
    for c in v["checks"].as_array().unwrap() {
        assert_eq!(c["passed"], 100);
        assert_eq!(c["total"], 100);
    }
    assert!(run(&["verify", "quasimiura", "--hbar", "2"]).status.success());
    assert!(run(&["verify", "commutation", "--pmax", "3"]).status.success());
    assert!(run(&["verify", "uniqueness", "--pmax", "3"]).status.success());
    assert!(run(&["verify", "homogeneity", "--tensor", "2", "--hbar", "1"]).status.success());
    assert_eq!(run(&["verify", "all", "--hbar", "3"]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic_and_can_go_to_a_file() {
    let args = ["verify", "all", "--seed", "3", "--count", "20", "--sequential"];
    let a = run(&args);
    let b = run(&["verify", "all", "--seed", "3", "--count", "20"]);
    assert_eq!(a.stdout, b.stdout);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    let out = run(&["generate", "kdv", "--pmax", "1", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(v["table"]["entries"].is_object());
}

#[test]
fn dump_templates_are_valid_generators() {
    let dir = tempfile::tempdir().unwrap();
    for (kind, level) in [("r", "1"), ("r", "2"), ("s", "3")] {
        let out = run(&["dump", "generator", "--kind", kind, "--level", level, "--dim", "2"]);
        assert!(out.status.success());
        let g = generator_file(&dir, "t.json", std::str::from_utf8(&out.stdout).unwrap());
        let d = run(&["deform", "--target", "omega", "--generator", &g, "--pmax", "1"]);
        assert!(d.status.success(), "{}", String::from_utf8_lossy(&d.stderr));
    }
    let t = run(&["dump", "transform", "--hbar", "1", "--format", "text"]);
    let text = String::from_utf8(t.stdout).unwrap();
    assert!(text.contains("1/24*w[1,1]^-1*w[1,3]"));
}
