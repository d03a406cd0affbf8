use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const SIMPLEX: &str = r#"{"dim": 2, "facets": [
    {"normal": [1, 0], "offset": 0}, {"normal": [0, 1], "offset": 0},
    {"normal": [-1, -1], "offset": -1}]}"#;
const SQUARE: &str = r#"{"dim": 2, "facets": [
    {"normal": [1, 0], "offset": 0}, {"normal": [0, 1], "offset": 0},
    {"normal": [-1, 0], "offset": -1}, {"normal": [0, -1], "offset": -1}]}"#;
const TRAPEZOID: &str = r#"{"dim": 2, "facets": [
    {"normal": [1, 0], "offset": 0}, {"normal": [0, 1], "offset": 0},
    {"normal": [1, 1], "offset": 0.5}, {"normal": [-1, -1], "offset": -1}]}"#;
const WEIGHTED: &str = r#"{"dim": 2, "facets": [
    {"normal": [1, 0], "offset": 0}, {"normal": [0, 1], "offset": 0},
    {"normal": [-1, -2], "offset": -1}]}"#;
const CALABI: &str = r#"{"perturbation": {"kind": "radial", "direction": [1, 1], "profile": "calabi", "parameters": [0.5]}}"#;

struct Scratch(TempDir);

impl Scratch {
    fn new() -> Self {
        Self(tempfile::tempdir().unwrap())
    }

    fn file(&self, name: &str, text: &str) -> PathBuf {
        let path = self.0.path().join(name);
        fs::write(&path, text).unwrap();
        path
    }
}

fn abreu(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_abreu"))
        .args(args)
        .env_remove("ABREU_MAX_SUBDIV")
        .output()
        .unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn validate_reports_and_exit_codes() {
    let s = Scratch::new();
    let out = abreu(&["validate", p(&s.file("simplex.json", SIMPLEX))]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out), serde_json::json!({"is_delzant": true, "failures": []}));

    let out = abreu(&["validate", p(&s.file("w.json", WEIGHTED))]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["is_delzant"], false);
    assert_eq!(v["failures"].as_array().unwrap().len(), 1);
    assert!(v["failures"][0]["reason"].as_str().unwrap().contains("±2"));
    assert!(stderr(&out).contains("[0.0, 0.5]"));

    let out = abreu(&["--quiet", "validate", p(&s.file("w.json", WEIGHTED))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stderr.is_empty());
}

#[test]
fn input_errors_exit_one() {
    let s = Scratch::new();
    let out = abreu(&["validate", p(&s.0.path().join("missing.json"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("cannot read"));
    assert!(out.stdout.is_empty());

    let out = abreu(&["validate", p(&s.file("bad.json", "{\"dim\": 2"))]);
    assert_eq!(out.status.code(), Some(1));

    let unbounded = r#"{"dim": 2, "facets": [{"normal": [1, 0], "offset": 0}, {"normal": [0, 1], "offset": 0}, {"normal": [-1, 1], "offset": -1}]}"#;
    let out = abreu(&["validate", p(&s.file("u.json", unbounded))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("unbounded"));
}

#[test]
fn curvature_at_a_point() {
    let s = Scratch::new();
    let simplex = s.file("simplex.json", SIMPLEX);
    let out = abreu(&["curvature", p(&simplex), "--point", "0.333", "0.333"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out)["R"].as_f64().unwrap();
    assert!((r - 6.0).abs() < 1e-9);

    let out = abreu(&["curvature", p(&simplex), "--point", "0", "0.5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("point not interior"));

    let out = abreu(&["curvature", p(&simplex), "--point", "0.2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn curvature_grid_as_csv() {
    let s = Scratch::new();
    let out = abreu(&["curvature", p(&s.file("sq.json", SQUARE)), "--grid", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("y1,y2,R"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 16);
    for row in rows {
        let r: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
        assert!((r - 4.0).abs() < 1e-9, "{row}");
    }
}

#[test]
fn extremal_verdicts() {
    let s = Scratch::new();
    let out = abreu(&["extremal", p(&s.file("simplex.json", SIMPLEX))]);
    assert_eq!(out.status.code(), Some(0));
    let fit = json(&out);
    assert!((fit["constant"].as_f64().unwrap() - 6.0).abs() < 1e-8);
    for g in fit["gradient"].as_array().unwrap() {
        assert!(g.as_f64().unwrap().abs() < 1e-8);
    }

    let trap = s.file("trap.json", TRAPEZOID);
    let out = abreu(&["extremal", p(&trap)]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["is_extremal"], false);

    let out = abreu(&["extremal", p(&trap), p(&s.file("calabi.json", CALABI))]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["is_extremal"], true);

    let out = abreu(&["extremal", p(&trap), "--threshold", "10"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn identity_reports() {
    let s = Scratch::new();
    for (name, text, sides) in [("simplex", SIMPLEX, 3.0), ("square", SQUARE, 4.0), ("trap", TRAPEZOID, 2.5)] {
        let out = abreu(&["identity", p(&s.file(name, text))]);
        assert_eq!(out.status.code(), Some(0), "{name}");
        let v = json(&out);
        assert_eq!(v["lhs"].as_f64().unwrap(), sides);
        assert!((v["rhs"].as_f64().unwrap() - sides).abs() < 1e-4);
        assert_eq!(v["normalization"], "no 2pi factors");
    }
}

#[test]
fn subdivision_cap_comes_from_the_environment() {
    let s = Scratch::new();
    let out = Command::new(env!("CARGO_BIN_EXE_abreu"))
        .args(["identity", p(&s.file("simplex.json", SIMPLEX))])
        .env("ABREU_MAX_SUBDIV", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("did not converge"));
}

#[test]
fn calabi_command() {
    let out = abreu(&["calabi", "--a", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["c1"].as_f64().unwrap() - 8.0 / 13.0).abs() < 1e-12);
    assert!((v["c2"].as_f64().unwrap() - 2.0 / 13.0).abs() < 1e-12);
    assert_eq!(v["fit"]["is_extremal"], true);
    assert!((v["fit"]["constant"].as_f64().unwrap() - 12.0 / 13.0).abs() < 1e-5);

    let out = abreu(&["calabi", "--a", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("out of range"));

    let out = abreu(&["calabi", "--a", "0.8"]);
    assert_eq!(out.status.code(), Some(0));
    let g = json(&out)["fit"]["gradient"].clone();
    let (g0, g1) = (g[0].as_f64().unwrap(), g[1].as_f64().unwrap());
    assert!((g0 - g1).abs() <= 1e-6 * g0.abs());
}

#[test]
fn volume_report() {
    let s = Scratch::new();
    let out = abreu(&["volume", p(&s.file("trap.json", TRAPEZOID))]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["volume"].as_f64().unwrap(), 0.375);
    assert_eq!(v["volume_derivative_sum"].as_f64().unwrap(), 2.5);
    let out = abreu(&["--output", "csv", "volume", p(&s.file("trap.json", TRAPEZOID))]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 5);
}

#[test]
fn output_is_deterministic() {
    let s = Scratch::new();
    let trap = s.file("trap.json", TRAPEZOID);
    let calabi = s.file("calabi.json", CALABI);
    for args in [
        vec!["curvature", p(&trap), p(&calabi), "--grid", "6"],
        vec!["extremal", p(&trap), p(&calabi)],
        vec!["identity", p(&trap)],
    ] {
        assert_eq!(abreu(&args).stdout, abreu(&args).stdout);
    }
}

#[test]
fn shipped_data_files_parse() {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data");
    for name in ["simplex", "square", "trapezoid", "hirzebruch", "simplex3"] {
        let out = abreu(&["validate", p(&data.join(format!("{name}.json")))]);
        assert_eq!(out.status.code(), Some(0), "{name}");
    }
    let out = abreu(&["validate", p(&data.join("weighted-triangle.json"))]);
    assert_eq!(out.status.code(), Some(2));
    let out = abreu(&[
        "extremal",
        p(&data.join("trapezoid.json")),
        p(&data.join("calabi-0.5.json")),
    ]);
    assert_eq!(out.status.code(), Some(0));
    for pot in ["canonical", "polynomial"] {
        let out = abreu(&["curvature", p(&data.join("simplex.json")), p(&data.join(format!("{pot}.json"))), "--point", "0.3", "0.3"]);
        assert_eq!(out.status.code(), Some(0), "{pot}");
    }
}
