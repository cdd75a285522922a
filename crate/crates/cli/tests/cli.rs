use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bergman-solid"));
    cmd.env_remove("BERGMAN_SOLID_THREADS");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn verify_trivial_passes_and_writes_reports() {
    let dir = TempDir::new().unwrap();
    let json = dir.path().join("r.json");
    let csv = dir.path().join("r.csv");
    let o = run(&["verify", "--suite", "trivial", "--out", s(&json), "--csv", s(&csv)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc = read_json(&json);
    assert_eq!(doc["summary"]["failed"], 0);
    assert!(doc["records"].as_array().unwrap().iter().all(|r| r["digest"].as_str().unwrap().len() == 64));
    let table = std::fs::read_to_string(&csv).unwrap();
    assert!(table.starts_with("id,pass,tolerance,digest,quantity,value"));
}

#[test]
fn plane_decomposition_has_bounded_gaps() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "plane-exp-log2.json", r#"{"density": "exp-log2", "domain": "plane"}"#);
    let d = dir.path().join("d.json");
    let o = run(&["decompose", "--measure", s(&m), "--b", "6", "--blocks", "100", "--out", s(&d)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc = read_json(&d);
    assert_eq!(doc["m"].as_array().unwrap().len(), 101);
    assert_eq!(doc["log_d"].as_array().unwrap().len(), 100);
    assert_eq!(doc["gap_profile"]["classification"], "bounded-plateau");
    assert!(String::from_utf8_lossy(&o.stdout).contains("classification=bounded-plateau"));

    let f = write(&dir, "f.json", "[[1, 0], [0.5, -0.5], [0, 2]]");
    let o = run(&["norms", "--poly", s(&f), "--decomp", s(&d), "--measure", s(&m)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let norms: Value = serde_json::from_slice(&o.stdout).unwrap();
    for key in ["bergman_norm", "equivalent_norm", "solid_core_norm"] {
        let v = norms[key]["value"].as_f64().unwrap();
        assert!(v.is_finite() && v > 0.0, "{key}: {v}");
    }
}

#[test]
fn area_norms_of_one_plus_z() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "area.json", r#"{"family": "unit"}"#);
    let d = dir.path().join("d.json");
    assert_eq!(run(&["decompose", "--measure", s(&m), "--blocks", "4", "--out", s(&d)]).status.code(), Some(0));
    assert!(read_json(&d)["gap_profile"].is_null());
    let f = write(&dir, "f.json", "[[1, 0], [1, 0]]");
    let o = run(&["norms", "--poly", s(&f), "--decomp", s(&d), "--measure", s(&m)]);
    let norms: Value = serde_json::from_slice(&o.stdout).unwrap();
    // ∫ M₁(1 + z, r) 2r dr by a midpoint rule on both variables
    let (nr, nt) = (2000, 2000);
    let mut oracle = 0.0;
    for i in 0..nr {
        let r = (i as f64 + 0.5) / nr as f64;
        let mut mean = 0.0;
        for j in 0..nt {
            let t = std::f64::consts::TAU * (j as f64 + 0.5) / nt as f64;
            mean += ((1.0 + r * t.cos()).powi(2) + (r * t.sin()).powi(2)).sqrt();
        }
        oracle += 2.0 * r * mean / nt as f64 / nr as f64;
    }
    let got = norms["bergman_norm"]["value"].as_f64().unwrap();
    assert!((got / oracle - 1.0).abs() < 1e-5, "{got} vs {oracle}");
}

#[test]
fn closed_form_decomposition() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.json", r#"{"family": "exponential", "alpha": 1, "beta": 1, "ell": 1}"#);
    let o = run(&["decompose", "--measure", s(&m), "--method", "closed-form", "--blocks", "60"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["method"], "closed-form");
    assert_eq!(doc["gap_profile"]["classification"], "growing");

    let area = write(&dir, "a.json", r#"{"family": "unit"}"#);
    let o = run(&["decompose", "--measure", s(&area), "--method", "closed-form"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn hull_sequence_and_violation() {
    let dir = TempDir::new().unwrap();
    let w = write(&dir, "w.json", r#"{"family": "exponential", "alpha": 1, "beta": 1, "ell": 2}"#);
    let out = dir.path().join("h.json");
    let o = run(&["hull", "--weight", s(&w), "--b", "2.5", "--K", "25", "--count", "50", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let hp = read_json(&out);
    assert_eq!(hp["mu"].as_array().unwrap().len(), 50);
    assert!(hp["lower_ratio"].as_array().unwrap().iter().all(|x| x.as_f64().unwrap() >= 2.5));

    let o = run(&["hull", "--weight", s(&w), "--b", "2.5", "--K", "2.6", "--count", "10"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("condition (b) violated"));

    let o = run(&["hull", "--weight", s(&w), "--b", "1.5", "--K", "25"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn pairing_of_constants() {
    let dir = TempDir::new().unwrap();
    let w = write(&dir, "w.json", r#"{"family": "unit"}"#);
    let one = write(&dir, "one.json", "[[1, 0]]");
    let i = write(&dir, "i.json", "[[0, 1]]");
    let o = run(&["pairing", "--f", s(&one), "--g", s(&i), "--weight", s(&w)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let z: Value = serde_json::from_slice(&o.stdout).unwrap();
    // ⟨1, i⟩ = conj(i) W₀ with W₀ = ∫₀¹ r dr
    assert!(z["re"].as_f64().unwrap().abs() < 1e-14);
    assert!((z["im"].as_f64().unwrap() + 0.5).abs() < 1e-12);
}

#[test]
fn small_report_passes() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "plane.json", r#"{"density": "exp-log2", "domain": "plane"}"#);
    let json = dir.path().join("r.json");
    let csv = dir.path().join("r.csv");
    let o = run(&[
        "report", "--measure", s(&m), "--blocks", "12", "--count", "10", "--seeds", "2", "--block-count", "5", "--out",
        s(&json), "--csv", s(&csv),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc = read_json(&json);
    let ids: Vec<&str> = doc["records"].as_array().unwrap().iter().map(|r| r["id"].as_str().unwrap()).collect();
    for id in ["equivalence.ratio", "equivalence.seed-stability", "equivalence.block-additivity", "khintchine.lower-bound"] {
        assert!(ids.contains(&id), "{ids:?}");
    }
    assert!(csv.exists());

    let again = dir.path().join("again.json");
    let o = run(&[
        "report", "--measure", s(&m), "--blocks", "12", "--count", "10", "--seeds", "2", "--block-count", "5", "--out",
        s(&again),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read(&json).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--suite", "nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));

    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", r#"{"family": "exponential", "alpha": 1, "beta": "x", "ell": 1}"#);
    let one = write(&dir, "one.json", "[[1, 0]]");
    let o = run(&["pairing", "--f", s(&one), "--g", s(&one), "--weight", s(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`beta`"), "{}", stderr(&o));

    let unknown = write(&dir, "unknown.json", r#"{"family": "unit", "gama": 2}"#);
    let o = run(&["decompose", "--measure", s(&unknown)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("gama"), "{}", stderr(&o));

    let o = run(&["pairing", "--f", s(&dir.path().join("missing.json")), "--g", s(&one), "--weight", s(&bad)]);
    assert_eq!(o.status.code(), Some(2));

    let o = bin().args(["verify"]).env("BERGMAN_SOLID_THREADS", "zero").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn degree_beyond_coverage_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "area.json", r#"{"family": "unit"}"#);
    let d = dir.path().join("d.json");
    assert_eq!(run(&["decompose", "--measure", s(&m), "--blocks", "2", "--out", s(&d)]).status.code(), Some(0));
    let big: Vec<[f64; 2]> = (0..200).map(|_| [1.0, 0.0]).collect();
    let f = write(&dir, "f.json", &serde_json::to_string(&big).unwrap());
    let o = run(&["norms", "--poly", s(&f), "--decomp", s(&d), "--measure", s(&m)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("exceeds the covered range"));
}
