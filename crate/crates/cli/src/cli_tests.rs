use super::*;
use std::path::PathBuf;

use crnlap::corpus::random_network;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name).display().to_string()
}

fn crnlap(args: &[&str]) -> (i32, Value, String) {
    let out = run(std::iter::once("crnlap").chain(args.iter().copied()));
    let report = if out.stdout.is_empty() { Value::Null } else { serde_json::from_str(&out.stdout).unwrap() };
    (out.code, report, out.stderr)
}

fn write_temp(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn analyze_running_example() {
    let (code, report, _) = crnlap(&["analyze", &data("running_example.json")]);
    assert_eq!(code, 0);
    assert_eq!(report["components"], serde_json::json!([["1", "2", "3"]]));
    assert_eq!(report["weakly_reversible"], Value::Bool(true));
    assert_eq!(report["tree_constants"]["backends_agree"], Value::Bool(true));
    assert_eq!(report["tree_constants"]["enumeration"][0], serde_json::json!({"num": 2, "den": 1}));
    for d in report["decompositions"].as_array().unwrap() {
        assert_eq!(d["passed"], Value::Bool(true));
        assert_eq!(d["residual"], serde_json::json!({"num": 0, "den": 1}));
    }
    assert_eq!(report["cycle_decomposition"].as_array().unwrap().len(), 2);
}

#[test]
fn certify_three_cycle() {
    let (code, report, _) = crnlap(&["certify", &data("three_cycle.json"), "--x", "0.5,0.5"]);
    assert_eq!(code, 0);
    assert_eq!(report["verdict"], "strict_decrease");
    assert!((report["value"].as_f64().unwrap() + 0.43321).abs() < 1e-5);
    assert_eq!(report["core"], serde_json::json!([[1.0, 1.0], [0.0, 1.0]]));
}

#[test]
fn simulate_writes_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("traj.json").display().to_string();
    let (code, report, _) = crnlap(&["simulate", &data("three_cycle.json"), "--x0", "0.5,0.5", "--t", "50", "--out", &out]);
    assert_eq!(code, 0);
    assert_eq!(report["lyapunov_nonincreasing"], Value::Bool(true));
    let traj: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let states = traj["states"].as_array().unwrap();
    let last = states.last().unwrap();
    assert!((last[0].as_f64().unwrap() - 1.0).abs() < 1e-6);
    let csv = dir.path().join("traj.csv").display().to_string();
    let (code, _, _) = crnlap(&["simulate", &data("three_cycle.json"), "--x0", "0.5,0.5", "--t", "5", "--out", &csv]);
    assert_eq!(code, 0);
    assert!(std::fs::read_to_string(&csv).unwrap().starts_with("t,X1,X2,L\n"));
}

#[test]
fn decompose_with_aux_specs() {
    let file = data("two_component.json");
    let (code, report, _) = crnlap(&["decompose", &file, "--aux", "chain:1,2,3;4,5"]);
    assert_eq!(code, 0);
    assert_eq!(report["aux"]["spec"], "chain:1,2,3;4,5");
    assert_eq!(report["chain_nonnegative"], Value::Bool(true));
    let (code, report, _) = crnlap(&["decompose", &file, "--aux", "star:root=1;root=4", "--mode", "float"]);
    assert_eq!(code, 0);
    assert_eq!(report["star_dominant"], Value::Bool(true));
    let (code, _, err) = crnlap(&["decompose", &file, "--aux", "chain:1,2;4,5"]);
    assert_eq!(code, 2);
    assert!(err.contains("BadOrder"));
}

#[test]
fn validation_errors_exit_two_with_paths() {
    let dir = tempfile::tempdir().unwrap();
    let missing = write_temp(
        &dir,
        "missing.json",
        r#"{"species": ["A"], "vertices": [{"id": "a", "complex": {"A": 1}}, {"id": "b"}],
            "edges": [{"from": "a", "to": "b", "k": 1}, {"from": "b", "to": "a"}]}"#,
    );
    let (code, _, err) = crnlap(&["analyze", &missing]);
    assert_eq!(code, 2);
    let err: Value = serde_json::from_str(&err).unwrap();
    assert_eq!(err["error"]["kind"], "SchemaError");
    assert_eq!(err["error"]["path"], "edges[1]");
    let zero = write_temp(
        &dir,
        "zero.json",
        r#"{"species": ["A"], "vertices": [{"id": "a", "complex": {"A": 1}}, {"id": "b"}],
            "edges": [{"from": "a", "to": "b", "k": 1}, {"from": "b", "to": "a", "k": "0"}]}"#,
    );
    let (code, _, err) = crnlap(&["analyze", &zero]);
    assert_eq!(code, 2);
    let err: Value = serde_json::from_str(&err).unwrap();
    assert_eq!(err["error"]["kind"], "NonPositiveLabel");
    assert_eq!(err["error"]["path"], "edges[1].k");
    let (code, _, _) = crnlap(&["certify", &data("three_cycle.json"), "--x", "0.5"]);
    assert_eq!(code, 2);
}

#[test]
fn infeasible_equilibria_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_temp(
        &dir,
        "infeasible.json",
        r#"{"species": ["X"], "vertices": [{"id": "0"}, {"id": "1", "complex": {"X": 1}}, {"id": "2", "complex": {"X": 2}}],
            "edges": [{"from": "0", "to": "1", "k": 1}, {"from": "1", "to": "0", "k": 1},
                      {"from": "1", "to": "2", "k": 1}, {"from": "2", "to": "1", "k": 3}]}"#,
    );
    let (code, report, err) = crnlap(&["equilibria", &file]);
    assert_eq!(code, 3);
    assert_eq!(report["cbe"]["status"], "infeasible");
    assert!(err.contains("Inconclusive"));
}

#[test]
fn boundary_state_velocity_check() {
    let (code, report, _) = crnlap(&["bdi-check", &data("three_cycle.json"), "--x", "0.25,0.5"]);
    assert_eq!(code, 0);
    assert_eq!(report["orders_checked"], 2);
    let (code, report, _) = crnlap(&["bdi-check", &data("three_cycle.json"), "--x", "0.5,0.5"]);
    assert_eq!(code, 0);
    assert_eq!(report["verdict"], "member");
}

#[test]
fn equilibria_sampling_depends_only_on_seed() {
    let file = data("running_example.json");
    let a = run(["crnlap", "equilibria", &file, "--samples", "3", "--seed", "7", "--class", "1,2"]);
    let b = run(["crnlap", "equilibria", &file, "--samples", "3", "--seed", "7", "--class", "1,2"]);
    assert_eq!(a.code, 0);
    assert_eq!(a, b);
    let report: Value = serde_json::from_str(&a.stdout).unwrap();
    assert!(report["birch_point"]["class_residual"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn help_exits_zero() {
    let out = run(["crnlap", "--help"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("analyze"));
}

#[test]
fn canonical_documents_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let net = random_network(&mut rng, 4, 6);
        let doc = NetworkDocument::from_network(&net, Default::default());
        let (parsed, back) = parse_network(&doc.to_json()).unwrap();
        assert_eq!(parsed, doc);
        assert_eq!(back.complexes(), net.complexes());
        assert_eq!(back.graph().labels(), net.graph().labels());
        assert_eq!(back.graph().vertex_ids(), net.graph().vertex_ids());
    }
}
