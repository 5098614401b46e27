use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_affine-fair"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn polygons(path: &Path) -> usize {
    std::fs::read_to_string(path).unwrap().matches("<polygon").count()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn chr_json_lists_facets() {
    let out = run(&["chr", "--n", "2", "--level", "2"]);
    assert!(out.status.success());
    let doc = json(&out);
    assert_eq!(doc["n"], 2);
    assert_eq!(doc["facets"].as_array().unwrap().len(), 9);
}

#[test]
fn chr_off_for_four_processes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("chr4.off");
    let out = run(&["chr", "--n", "4", "--format", "off", "--out", s(&path)]);
    assert!(out.status.success());
    assert!(std::fs::read_to_string(&path).unwrap().starts_with("OFF"));
    assert_eq!(run(&["chr", "--n", "4", "--format", "svg"]).status.code(), Some(2));
}

#[test]
fn highlight_draws_exactly_the_task_facets() {
    let dir = tempfile::tempdir().unwrap();
    let task = dir.path().join("task.json");
    let direct = dir.path().join("direct.svg");
    let out = run(&["affine", "build", "--adversary", s(&fixture("1res.json")), "--out", s(&task), "--svg", s(&direct)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&task).unwrap()).unwrap();
    assert_eq!(doc["facets"].as_array().unwrap().len(), 142);
    assert_eq!(doc["alpha"].as_array().unwrap().len(), 8);
    assert_eq!(polygons(&direct), 142);
    let over = dir.path().join("over.svg");
    let out = run(&["chr", "--n", "3", "--level", "2", "--format", "svg", "--highlight", s(&task), "--out", s(&over)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(polygons(&over), 142);
}

#[test]
fn intersection_form_builds_smaller_task() {
    let out = run(&["affine", "build", "--adversary", s(&fixture("fig6b.json")), "--intersection"]);
    assert!(out.status.success());
    let union = run(&["affine", "build", "--adversary", s(&fixture("fig6b.json"))]);
    let count = |o: &Output| json(o)["facets"].as_array().unwrap().len();
    assert!(count(&out) < count(&union));
}

#[test]
fn adversary_queries() {
    let out = run(&["adv", "setcon", "--adversary", s(&fixture("2of.json"))]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "2");
    let out = run(&["adv", "alpha", "--adversary", s(&fixture("1res.json"))]);
    let rows = json(&out);
    let full = rows.as_array().unwrap().iter().find(|r| r["set"] == serde_json::json!([1, 2, 3])).unwrap();
    assert_eq!(full["alpha"], 2);
    let out = run(&["adv", "fair", "--adversary", s(&fixture("fig6b.json"))]);
    assert!(out.status.success());
    assert_eq!(json(&out)["fair"], true);
}

#[test]
fn unfair_adversary_exits_one() {
    let out = run(&["adv", "fair", "--adversary", s(&fixture("unfair_singleton.json"))]);
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out);
    assert_eq!(report["witness"]["p"], serde_json::json!([1, 2]));
    let out = run(&["affine", "build", "--adversary", s(&fixture("unfair_singleton.json"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn classify_sweeps_all_families() {
    let out = run(&["adv", "classify", "--n", "3"]);
    assert!(out.status.success());
    let table = json(&out);
    assert_eq!(table["families"], 128);
    assert_eq!(table["fair"], 44);
    let sampled = json(&run(&["adv", "classify", "--n", "4"]));
    assert_eq!(sampled["families"], 512);
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(run(&["adv", "setcon", "--adversary", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(run(&["chr", "--level", "3"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let out = run(&["leader", "verify", "--adversary", s(&fixture("1of.json")), "--Q", "4"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["simulate", "check", "--adversary", s(&fixture("1of.json")), "--n", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"n": 3, "kind": "k_of"}"#).unwrap();
    assert_eq!(run(&["adv", "setcon", "--adversary", s(&bad)]).status.code(), Some(2));
}

#[test]
fn lemma_and_leader_verification() {
    for lemma in ["distribution", "single-carrier", "subtraction"] {
        let out = run(&["affine", "verify", lemma, "--adversary", s(&fixture("fig6b.json"))]);
        assert!(out.status.success(), "{lemma}");
        assert_eq!(json(&out)["violations"], serde_json::json!([]));
    }
    let out = run(&["leader", "verify", "--adversary", s(&fixture("2of.json")), "--Q", "1,3"]);
    assert!(out.status.success());
    assert!(json(&out)["checked"].as_u64().unwrap() > 0);
}

#[test]
fn state_cap_comes_from_environment() {
    let path = fixture("1of.json");
    let args = ["simulate", "check", "--adversary", s(&path)];
    let out = bin().args(args).env("AFFINE_STATE_CAP", "10").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(args).env("AFFINE_STATE_CAP", "lots").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(args).output().unwrap();
    assert!(out.status.success());
    assert_eq!(json(&out)["safety_violations"], 0);
}

#[test]
fn violations_are_traced_and_replayable() {
    let dir = tempfile::tempdir().unwrap();
    let traces = dir.path().join("traces");
    let out = run(&[
        "simulate",
        "check",
        "--adversary",
        s(&fixture("fig6b.json")),
        "--safety",
        "--intersection",
        "--trace-out",
        s(&traces),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out)["safety_violations"].as_u64().unwrap() > 0);
    let mut files: Vec<_> = std::fs::read_dir(&traces).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    assert!(!files.is_empty());
    let replayed = run(&["simulate", "replay", s(&files[0])]);
    assert!(replayed.status.success());
    let outcome = json(&replayed);
    assert_eq!(outcome["stable"], true);
    assert!(!outcome["outputs"].as_array().unwrap().is_empty());
}

#[test]
fn liveness_only_check_with_extra_crashes_fails() {
    let out = run(&["simulate", "check", "--adversary", s(&fixture("1res.json")), "--liveness", "--extra-crashes", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["safety_violations"], 0);
}

#[test]
fn repro_with_superset_closed_adversary() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["repro", "--adversary", s(&fixture("fig6b.json")), "--out", s(dir.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = json(&out);
    assert_eq!(summary["passed"], true);
    assert_eq!(summary["files"].as_array().unwrap().len(), 10);
    // Both R_A panels: 1-OF (73 facets) and the chosen adversary (145).
    assert_eq!(polygons(&dir.path().join("fig6_ra.svg")), 73 + 145);
    assert_eq!(polygons(&dir.path().join("fig1b_r1res.svg")), 142);
    let sim: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("simulate.json")).unwrap()).unwrap();
    assert_eq!(sim["reports"].as_array().unwrap().len(), 4);
    assert_eq!(run(&["repro", "--n", "4", "--out", s(dir.path())]).status.code(), Some(2));
}

#[test]
fn repro_manifest_is_frozen() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["repro", "--n", "3", "--out", s(dir.path())]);
    assert!(out.status.success());
    let files = json(&out)["files"].clone();
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/repro_manifest_n3.json");
    if std::env::var_os("AFFINE_BLESS").is_some() {
        std::fs::write(&golden, serde_json::to_string_pretty(&files).unwrap() + "\n").unwrap();
    }
    let frozen: Value = serde_json::from_str(&std::fs::read_to_string(&golden).unwrap()).unwrap();
    assert_eq!(files, frozen);
}
