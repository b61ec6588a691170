use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn lipfree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lipfree")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

/// Runs `gen` with the given arguments and returns the written files.
fn generate(dir: &TempDir, name: &str, args: &[&str]) -> (PathBuf, PathBuf) {
    let space = dir.path().join(format!("{name}.space.json"));
    let pairs = dir.path().join(format!("{name}.pairs.json"));
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--space-out", path_str(&space), "--pairs-out", path_str(&pairs)]);
    let out = lipfree(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    (space, pairs)
}

fn analyze(space: &Path, pairs: &Path) -> Value {
    let out = lipfree(&["analyze", "--json", "--space", path_str(space), "--pairs", path_str(pairs)]);
    assert!(out.status.success());
    json_of(&out)
}

fn write_equilateral(dir: &TempDir) -> (PathBuf, PathBuf) {
    let space = dir.path().join("eq.space.json");
    let pairs = dir.path().join("eq.pairs.json");
    std::fs::write(&space, r#"{"labels":["0","a","b"],"base":0,"d":[[0,1,1],[1,0,1],[1,1,0]]}"#).unwrap();
    std::fs::write(&pairs, r#"{"pairs":[[1,0],[2,0]]}"#).unwrap();
    (space, pairs)
}

#[test]
fn triangle_cycle_is_not_interpolating() {
    let dir = TempDir::new().unwrap();
    let (space, pairs) = generate(&dir, "cycle", &["--kind", "cycle", "--size", "3"]);
    let report = analyze(&space, &pairs);
    assert_eq!(report["interpolating"], false);
    assert_eq!(report["M"], "inf");
    assert_eq!(report["cycle_witness"], serde_json::json!([0, 1, 2]));
    assert_eq!(report["beurling"]["applicable"], false);
}

#[test]
fn disjoint_clusters_have_constant_one() {
    let dir = TempDir::new().unwrap();
    let (space, pairs) = generate(&dir, "ex1", &["--kind", "ex1", "--clusters", "3"]);
    let report = analyze(&space, &pairs);
    assert!((report["M"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert!((report["beurling"]["t_star"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert_eq!(report["beurling"]["beurling_exists"], true);
    assert_eq!(report["beurling"]["matching"]["is_min_matching"], true);
}

#[test]
fn equilateral_values_float_and_exact() {
    let dir = TempDir::new().unwrap();
    let (space, pairs) = write_equilateral(&dir);
    for extra in [None, Some("--exact")] {
        let mut args = vec!["analyze", "--json", "--space", path_str(&space), "--pairs", path_str(&pairs)];
        args.extend(extra);
        let report = json_of(&lipfree(&args));
        assert!((report["M"].as_f64().unwrap() - 2.0).abs() < 1e-9);
        assert!((report["N"].as_f64().unwrap() - 0.5).abs() < 1e-9);
        assert!((report["separation"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn text_mode_renders_the_same_fields() {
    let dir = TempDir::new().unwrap();
    let (space, pairs) = write_equilateral(&dir);
    let out = lipfree(&["analyze", "--space", path_str(&space), "--pairs", path_str(&pairs)]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "M=2.0"));
    assert!(text.lines().any(|l| l == "N=0.5"));
    assert!(text.lines().any(|l| l.starts_with("beurling.t_star=")));
}

#[test]
fn generated_files_round_trip() {
    let dir = TempDir::new().unwrap();
    let (space, pairs) = generate(&dir, "rand", &["--kind", "random", "--size", "6", "--count", "3", "--seed", "7"]);
    let out = lipfree(&["validate", "--json", "--space", path_str(&space), "--pairs", path_str(&pairs)]);
    assert!(out.status.success());
    assert_eq!(json_of(&out)["points"], 6);
    let first = analyze(&space, &pairs);
    let again = generate(&dir, "rand2", &["--kind", "random", "--size", "6", "--count", "3", "--seed", "7"]);
    assert_eq!(std::fs::read(&space).unwrap(), std::fs::read(&again.0).unwrap());
    assert_eq!(first, analyze(&again.0, &again.1));
}

#[test]
fn triangle_violation_is_a_domain_error() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"labels":["0","1","2"],"base":0,"d":[[0,1,5],[1,0,1],[5,1,0]]}"#).unwrap();
    let out = lipfree(&["validate", "--json", "--space", path_str(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    let err = &json_of(&out)["error"];
    assert_eq!(err["kind"], "TriangleViolation");
    assert_eq!(err["witness"], serde_json::json!([0, 2, 1]));
}

#[test]
fn missing_file_and_usage_errors() {
    let out = lipfree(&["validate", "--json", "--space", "/nonexistent/space.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json_of(&out)["error"]["kind"], "Io");
    assert_eq!(lipfree(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(lipfree(&["interpolate", "--space", "x"]).status.code(), Some(2));
}

#[test]
fn interpolate_norm_and_rho() {
    let dir = TempDir::new().unwrap();
    let (space, pairs) = write_equilateral(&dir);
    let (s, p) = (path_str(&space), path_str(&pairs));
    let r = json_of(&lipfree(&["interpolate", "--json", "--space", s, "--pairs", p, "--alpha", "1,-1"]));
    assert!((r["norm"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    let n = json_of(&lipfree(&["norm", "--json", "--space", s, "--coeffs", "0,1,-1"]));
    assert!((n["norm"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(n["decomposition"]["terms"][0]["pair"], serde_json::json!([1, 2]));
    let rho = json_of(&lipfree(&["rho", "--json", "--space", s, "--p", "1,0", "--q", "2,0"]));
    assert!((rho["rho"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn extraction_on_spokes() {
    let dir = TempDir::new().unwrap();
    let (space, _) = generate(&dir, "chain", &["--kind", "triple-chain", "--size", "4"]);
    let spokes = dir.path().join("spokes.json");
    std::fs::write(&spokes, r#"{"pairs":[[1,0],[3,0],[5,0],[7,0]]}"#).unwrap();
    let out = lipfree(&["extract", "--json", "--space", path_str(&space), "--pairs", path_str(&spokes), "--epsilon", "0.1"]);
    let r = json_of(&out);
    assert_eq!(r["selected"], serde_json::json!([0, 1, 2, 3]));
    assert!((r["certified_N"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(r["necessary"]["decreasing_trend"], true);
}

#[test]
fn probe_is_reproducible() {
    let run = || json_of(&lipfree(&["beurling", "--json", "--probe", "5", "--seed", "3"]));
    let a = run();
    assert_eq!(a["instances"], 5);
    assert_eq!(a, run());
}

#[test]
fn thread_cap_is_honoured_and_checked() {
    let dir = TempDir::new().unwrap();
    let (space, pairs) = write_equilateral(&dir);
    let with = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_lipfree"))
            .args(["analyze", "--json", "--space", path_str(&space), "--pairs", path_str(&pairs)])
            .env("LIPFREE_THREADS", threads)
            .output()
            .unwrap()
    };
    assert!(with("1").status.success());
    assert_eq!(with("many").status.code(), Some(2));
}
