use std::path::Path;
use std::process::Command;

use minkpoly_cli::{load, load_str, save, CliError, Loaded};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_minkpoly"))
}

fn run(args: &[&str]) -> (i32, String) {
    let out = bin().args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).expect("report is JSON")
}

const QUAD: &str = r#"{
  "k1": 2,
  "k2": 2,
  "alpha": [1.0, 1.0, 2.0, 1.0],
  "sides": [
    [1.118033988749895, 0.0, 1.5],
    [-1.118033988749895, 0.0, 1.5],
    [0.0, 0.0, -2.0],
    [0.0, 0.0, -1.0]
  ]
}"#;

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn sampled_configuration_survives_save_and_load() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "s.json", "");
    let (code, _) = run(&["sample", "--alpha", "1,1.3,0.8,1.7,0.9", "--seed", "4", "--output", &path]);
    assert_eq!(code, 0);
    let first = load(Path::new(&path)).unwrap();
    assert!(matches!(first, Loaded::Hyper(_)));
    let copy = dir.path().join("copy.json");
    save(&copy, &first).unwrap();
    assert_eq!(load(&copy).unwrap(), first);
}

#[test]
fn polygon_round_trips_through_text() {
    let poly = load_str(QUAD).unwrap();
    let text = serde_json::to_string(&poly.to_json()).unwrap();
    assert_eq!(load_str(&text).unwrap(), poly);
}

#[test]
fn malformed_complex_pair_reports_its_line() {
    let text = "{\n  \"alpha\": [1, 1, 1, 1],\n  \"p\": [[[0, 0], [0, 0]], [[0, 0], [0, 0]], [[0, 0], [0]], [[0, 0], [0, 0]]],\n  \"q\": []\n}";
    match load_str(text) {
        Err(CliError::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("expected a parse error, got {other:?}"),
    }
    assert!(matches!(load_str("{ \"alpha\": [1, 2"), Err(CliError::Parse { line: 1, .. })));
}

#[test]
fn block_sizes_must_add_up() {
    let text = QUAD.replace("\"k2\": 2", "\"k2\": 3");
    assert!(matches!(load_str(&text), Err(CliError::SchemaMismatch(_))));
    assert!(matches!(load_str("{\"beta\": [1]}"), Err(CliError::SchemaMismatch(_))));
    let short = r#"{"alpha": [1, 1, 1, 1], "p": [], "q": []}"#;
    assert!(matches!(load_str(short), Err(CliError::SchemaMismatch(_))));
}

#[test]
fn census_of_the_quadrilateral_weights() {
    let (code, out) = run(&["census", "--alpha", "1,1,2,1"]);
    assert_eq!(code, 0);
    let v = json(&out);
    let comps = v["components"].as_array().unwrap();
    assert_eq!(comps.len(), 4);
    assert_eq!(comps.iter().filter(|c| c["compact"] == true).count(), 1);
    let labels: Vec<&str> = comps.iter().map(|c| c["label"].as_str().unwrap()).collect();
    assert_eq!(labels, ["M(alpha)", "Z_{1,2}", "Z_{1,4}", "Z_{2,4}"]);
}

#[test]
fn bend_sweep_keeps_the_diagonal() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "quad.json", QUAD);
    let (code, out) = run(&["bend", "--sweep", "64", "--input", &path, "--format", "csv"]);
    assert_eq!(code, 0);
    let mut reader = csv::Reader::from_reader(out.as_bytes());
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["theta", "ell", "closure_inf_norm", "max_norm_error"]);
    let rows: Vec<[f64; 4]> = reader.deserialize().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 64);
    for r in &rows {
        assert!((r[1] - 3.0).abs() < 1e-9);
        assert!(r[2] < 1e-9 && r[3] < 1e-9);
    }
}

#[test]
fn normalize_reaches_the_level_set() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "s.json", "");
    run(&["sample", "--alpha", "0.7,1.21,1.33,0.96,2.15,1.47", "--seed", "9", "--output", &path]);
    let (code, out) = run(&["normalize", "--input", &path]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert!(v["residual"].as_f64().unwrap() < 1e-8);
    assert_eq!(v["on_level_set"], true);
}

#[test]
fn fixed_seed_gives_identical_output() {
    let args = ["sample", "--alpha", "1,1.3,0.8,1.7,0.9", "--seed", "17"];
    let (_, a) = run(&args);
    let (_, b) = run(&args);
    assert_eq!(a, b);
    let (_, c) = run(&["sample", "--alpha", "1,1.3,0.8,1.7,0.9", "--seed", "18"]);
    assert_ne!(a, c);
}

#[test]
fn z_s_point_converts_to_a_polygon_and_back() {
    let dir = tempfile::tempdir().unwrap();
    let quad = write(dir.path(), "quad.json", QUAD);
    let (code, out) = run(&["convert", "--to", "hyper", "--input", &quad]);
    assert_eq!(code, 0);
    let hyper = write(dir.path(), "h.json", &out);
    let (code, out) = run(&["classify", "--input", &hyper]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["class"], "z_s");
    let (code, out) = run(&["convert", "--to", "minkowski", "--input", &hyper]);
    assert_eq!(code, 0);
    let Loaded::Polygon(back) = load_str(&out).unwrap() else {
        panic!("expected a polygon");
    };
    assert_eq!(back.alpha, vec![1.0, 1.0, 2.0, 1.0]);
    let ell = minkpoly::minkowski::diagonal_length(&back, 2).unwrap();
    assert!((ell - 3.0).abs() < 1e-12);
}

#[test]
fn exit_codes() {
    let (code, out) = run(&["census", "--alpha", "1,1,2,1", "--tol", "-1"]);
    assert_eq!(code, 1);
    assert_eq!(json(&out)["error"], "UsageError");
    let (code, out) = run(&["census", "--alpha", "1,1,1,1"]);
    assert_eq!(code, 1);
    assert_eq!(json(&out)["error"], "NonGeneric");
    let (code, _) = run(&["census", "--input", "/nonexistent/file.json"]);
    assert_eq!(code, 1);

    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "s.json", "");
    run(&["sample", "--alpha", "0.7,1.21,1.33,0.96,2.15,1.47", "--seed", "2", "--output", &path]);
    let (code, out) = run(&["normalize", "--input", &path, "--max-iters", "1", "--kn-tol", "1e-15"]);
    assert_eq!(code, 2);
    assert_eq!(json(&out)["error"], "NoConvergence");

    let (code, _) = run(&["selftest"]);
    assert_eq!(code, 0);
}

#[test]
fn error_payload_goes_to_the_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let (code, stdout) = run(&["census", "--alpha", "1,1,1,1", "--output", out.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(stdout.is_empty());
    let v = json(&std::fs::read_to_string(out).unwrap());
    assert_eq!(v["error"], "NonGeneric");
}
