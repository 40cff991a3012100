use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_susy-spectra"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn c(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

fn energies(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|p| c(&p["E"]).0).collect()
}

#[test]
fn jost_of_zero_potential_is_one() {
    let out = run(&["jost", data("zero.json").to_str().unwrap(), "1+0i"]);
    assert_eq!(out.status.code(), Some(0));
    let (re, im) = c(&json(&out)["A"]);
    assert!((re - 1.0).abs() < 1e-12 && im.abs() < 1e-12);
}

#[test]
fn jost_vanishes_at_the_soliton_singularity() {
    let out = run(&["jost", data("soliton_b_ipi4.json").to_str().unwrap(), "1+0i"]);
    assert_eq!(out.status.code(), Some(0));
    let (re, im) = c(&json(&out)["A"]);
    assert!(re.hypot(im) < 1e-6);
    assert!(json(&out)["config"]["solver"]["ode"]["rtol"].is_number());
}

#[test]
fn missing_or_malformed_inputs_are_usage_errors() {
    assert_eq!(run(&["jost", "no-such-file.json", "1"]).status.code(), Some(2));
    assert_eq!(run(&["jost", data("zero.json").to_str().unwrap(), "1+"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"kind":"sech_well","params":{"lambda":0,"a":1}}"#).unwrap();
    let out = run(&["jost", bad.to_str().unwrap(), "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    let out = run(&["jost", data("zero.json").to_str().unwrap(), "1", "--points", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn jost_csv_has_provenance_header() {
    let out = run(&["jost", data("sech6.json").to_str().unwrap(), "0.5", "--format", "csv", "--points", "32", "--xmax", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# potential="));
    assert_eq!(lines.next().unwrap(), "x,re_y,im_y,re_dy,im_dy");
    assert_eq!(lines.count(), 32);
}

#[test]
fn spectrum_of_minus_twenty_sech_squared() {
    let out = run(&["spectrum", data("sech20.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["report"];
    let mut e = energies(&r["bound_states"]);
    e.sort_by(f64::total_cmp);
    assert_eq!(e.len(), 2);
    assert!((e[0] + 9.0).abs() < 1e-6 && (e[1] + 1.0).abs() < 1e-6);
    assert!(r["singularities"].as_array().unwrap().is_empty());
}

#[test]
fn spectrum_of_zero_is_empty() {
    let out = run(&["spectrum", data("zero.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["report"];
    assert!(r["bound_states"].as_array().unwrap().is_empty());
    assert!(r["singularities"].as_array().unwrap().is_empty());
}

#[test]
fn spectrum_of_the_closed_form_partner() {
    let out = run(&["spectrum", data("ex1_a2_k1.json").to_str().unwrap(), "--rect", "-3,3,0.05,3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["report"];
    assert!(r["bound_states"].as_array().unwrap().is_empty());
    let e = energies(&r["singularities"]);
    assert_eq!(e.len(), 1);
    assert!((e[0] - 1.0).abs() < 1e-6);
}

#[test]
fn transform_writes_spec_and_samples() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("ex1");
    let out = run(&[
        "transform",
        data("zero.json").to_str().unwrap(),
        data("example1-steps.json").to_str().unwrap(),
        "--out",
        prefix.to_str().unwrap(),
        "--points",
        "200",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("ex1.json")).unwrap()).unwrap();
    assert_eq!(doc["spec"]["kind"], "transformed");
    let csv = std::fs::read_to_string(dir.path().join("ex1.csv")).unwrap();
    let (a, k) = (1.0f64, -1.0f64);
    let mut n = 0;
    for line in csv.lines().skip(2) {
        let f: Vec<f64> = line.split(',').map(|t| t.parse().unwrap()).collect();
        let x = f[0];
        // -2 a^2 (a^2 + k^2) / (a cosh ax - i k sinh ax)^2
        let (dr, di) = (a * (a * x).cosh(), -k * (a * x).sinh());
        let (d2r, d2i) = (dr * dr - di * di, 2.0 * dr * di);
        let m = d2r * d2r + d2i * d2i;
        let num = -2.0 * a * a * (a * a + k * k);
        let (vr, vi) = (num * d2r / m, -num * d2i / m);
        assert!((f[1] - vr).hypot(f[2] - vi) < 1e-9, "x = {x}");
        n += 1;
    }
    assert_eq!(n, 200);
}

#[test]
fn transform_removes_the_soliton_singularity() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("rem");
    let out = run(&[
        "transform",
        data("soliton_b_ipi4.json").to_str().unwrap(),
        data("remove-singularity-steps.json").to_str().unwrap(),
        "--out",
        prefix.to_str().unwrap(),
        "--xmax",
        "20",
        "--points",
        "400",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("rem.csv")).unwrap();
    for line in csv.lines().skip(2) {
        let f: Vec<f64> = line.split(',').map(|t| t.parse().unwrap()).collect();
        if f[0] >= 0.05 {
            let want = 2.0 / f[0].sinh().powi(2);
            assert!((f[1] - want).hypot(f[2]) < 1e-7 * want.max(1.0), "x = {}", f[0]);
        }
    }
}

#[test]
fn duplicated_seed_is_a_degeneracy() {
    let out = run(&[
        "transform",
        data("zero.json").to_str().unwrap(),
        data("duplicated-seed-steps.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(5));
    assert!(String::from_utf8_lossy(&out.stderr).contains("x = "));
}

#[test]
fn verify_exit_codes() {
    let out = run(&["verify", "--example", "all"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["reports"].as_array().unwrap().len(), 3);
    assert_eq!(v["pass"], true);
    assert_eq!(run(&["verify", "--example", "2"]).status.code(), Some(0));
    assert_eq!(run(&["verify", "--example", "7"]).status.code(), Some(2));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let path = data("sech6.json");
    let args = ["spectrum", path.to_str().unwrap(), "--points", "100"];
    let a = run(&args);
    let b = bin().args(args).env("SUSY_SPECTRA_THREADS", "1").output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn bad_thread_count_is_rejected() {
    let out = bin().args(["verify", "--example", "1"]).env("SUSY_SPECTRA_THREADS", "lots").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
