use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn gather(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gather")).args(args).env_remove("GATHER_OUT_DIR").output().unwrap()
}

fn suites() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../suites")
}

fn suite(name: &str) -> String {
    suites().join(name).to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn star_manifest_gathers_within_two_epochs() {
    let dir = TempDir::new().unwrap();
    let out = gather(&["simulate", &suite("star.manifest.json"), "--out-dir", p(dir.path())]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).starts_with("gathered algorithm=terminal"));
    let doc = read_json(&dir.path().join("star.manifest.trace.json"));
    assert_eq!(doc["schema"], "gather-run/1");
    assert!(doc["trace"]["epochs"].as_u64().unwrap() <= 2);
    assert_eq!(doc["checks"]["conformance"]["violations"].as_array().unwrap().len(), 0);
}

#[test]
fn same_manifest_twice_gives_identical_traces() {
    let dir = TempDir::new().unwrap();
    let manifest = dir.path().join("bf.json");
    let first = dir.path().join("a.json");
    let second = dir.path().join("b.json");
    let made = gather(&[
        "simulate", "--family", "butterfly", "2", "--placement", "0,0,5,8", "--seed", "3", "--adversary", "per-epoch",
        "--write-manifest", p(&manifest), "--out", p(&first),
    ]);
    assert_eq!(made.status.code(), Some(0), "{}", stdout(&made));
    let again = gather(&["simulate", p(&manifest), "--out", p(&second)]);
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(fs::read(&first).unwrap(), fs::read(&second).unwrap());
    let doc = read_json(&second);
    assert_eq!(doc["trace"]["algorithm"], "nonterminal");
    assert_eq!(doc["trace"]["outcome"], "gathered");
}

#[test]
fn out_dir_comes_from_the_environment() {
    let dir = TempDir::new().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_gather"))
        .args(["simulate", "--family", "star", "3", "--placement", "1,2", "--seed", "7"])
        .env("GATHER_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("run-7.trace.json").exists());
}

#[test]
fn exceeding_the_epoch_cap_is_a_violation() {
    let dir = TempDir::new().unwrap();
    // delta 3 needs at least two epochs
    let out = gather(&[
        "simulate", "--family", "butterfly", "2", "--placement", "0,5,9", "--max-epochs", "1", "--out-dir", p(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(1), "{}", stdout(&out));
    assert!(stdout(&out).starts_with("epoch-cap-exceeded"));
}

#[test]
fn bad_input_exits_with_two() {
    let dir = TempDir::new().unwrap();
    let d = p(dir.path());
    let missing = dir.path().join("missing.json");
    assert_eq!(gather(&["simulate", p(&missing), "--out-dir", d]).status.code(), Some(2));
    assert_eq!(gather(&["simulate", "--family", "star", "3", "--placement", "1,9", "--out-dir", d]).status.code(), Some(2));
    assert_eq!(gather(&["simulate", "--family", "cycle", "6", "--placement", "0,3", "--out-dir", d]).status.code(), Some(2));

    let wrong = dir.path().join("wrong.json");
    fs::write(&wrong, r#"{"schema": "gather-manifest/9"}"#).unwrap();
    assert_eq!(gather(&["simulate", p(&wrong), "--out-dir", d]).status.code(), Some(2));

    let disconnected = dir.path().join("g.txt");
    fs::write(&disconnected, "3\n0 1\n").unwrap();
    let out = gather(&["analyze", p(&disconnected)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("disconnected"));
    assert_eq!(gather(&["generate", "nope", "3"]).status.code(), Some(2));
    assert_eq!(gather(&["analyze", "--family", "star", "x"]).status.code(), Some(2));
}

fn analysis(args: &[&str]) -> Value {
    let mut all = vec!["analyze", "--json"];
    all.extend_from_slice(args);
    let out = gather(&all);
    assert_eq!(out.status.code(), Some(0));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn terminal_flags(doc: &Value) -> Vec<Value> {
    doc["report"]["orbits"].as_array().unwrap().iter().map(|o| o["terminal"].clone()).collect()
}

#[test]
fn analyze_small_graphs() {
    let k32 = analysis(&["--family", "complete-bipartite", "3", "2"]);
    assert_eq!(k32["schema"], "gather-analysis/1");
    assert_eq!(terminal_flags(&k32), vec![Value::Bool(true), Value::Bool(true)]);

    let dir = TempDir::new().unwrap();
    let file = dir.path().join("h.txt");
    let made = gather(&["generate", "h-family", "2K1", "K1", "3", "--out", p(&file)]);
    assert_eq!(made.status.code(), Some(0));
    let h = analysis(&[p(&file)]);
    assert_eq!(h["report"]["n"], 9);
    assert_eq!(terminal_flags(&h), vec![Value::Bool(false), Value::Bool(false)]);

    let c6 = analysis(&["--family", "cycle", "6"]);
    assert_eq!(c6["report"]["vertex_transitive"], true);
    assert_eq!(terminal_flags(&c6), vec![Value::Null]);
    let text = stdout(&gather(&["analyze", "--family", "cycle", "6"]));
    assert!(text.contains("terminal orbit analysis skipped"));
}

#[test]
fn check_trace_flags_a_tampered_trace() {
    let dir = TempDir::new().unwrap();
    let run = dir.path().join("run.json");
    let out = gather(&["simulate", "--family", "star", "4", "--placement", "1,2,3", "--out", p(&run)]);
    assert_eq!(out.status.code(), Some(0));

    let checked = gather(&["check-trace", p(&run)]);
    assert_eq!(checked.status.code(), Some(0), "{}", stdout(&checked));
    assert!(stdout(&checked).contains("PASS"));

    // a bare trace is checked on its labels alone
    let mut doc = read_json(&run);
    let bare = dir.path().join("bare.json");
    fs::write(&bare, serde_json::to_string(&doc["trace"]).unwrap()).unwrap();
    let out = gather(&["check-trace", p(&bare)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("invariants not checked"));

    let rounds = doc["trace"]["rounds"].as_array_mut().unwrap();
    assert!(rounds.len() >= 2);
    rounds[0]["task"] = "AT.T2".into();
    rounds[1]["task"] = "AT.T1".into();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, serde_json::to_string(&doc).unwrap()).unwrap();
    let out = gather(&["check-trace", p(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("round 1: AT.T2 -> AT.T1"));
}

#[test]
fn reference_graph_suite_matches() {
    let dir = TempDir::new().unwrap();
    let out = gather(&["batch", &suite("reference_graphs.json"), "--out-dir", p(dir.path())]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("analyses: 3/3 passed"));
}

#[test]
fn predicate_suite_holds() {
    let dir = TempDir::new().unwrap();
    let out = gather(&["batch", &suite("predicates.json"), "--out-dir", p(dir.path())]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let report = read_json(&dir.path().join("predicates.report.json"));
    let analyses = report["analyses"].as_array().unwrap();
    assert!(analyses.len() >= 30);
    assert!(analyses.iter().all(|a| a["predicate_implication"] == true));
}

#[test]
fn parallel_batch_report_equals_sequential() {
    let dir = TempDir::new().unwrap();
    let seq = dir.path().join("seq.json");
    let par = dir.path().join("par.json");
    assert_eq!(gather(&["batch", &suite("terminal.json"), "--out", p(&seq)]).status.code(), Some(0));
    assert_eq!(gather(&["batch", &suite("terminal.json"), "--parallel", "--out", p(&par)]).status.code(), Some(0));
    assert_eq!(fs::read(&seq).unwrap(), fs::read(&par).unwrap());
    let report = read_json(&seq);
    assert_eq!(report["schema"], "gather-batch/1");
    assert!(report["aggregate"]["runs"].as_u64().unwrap() >= 100);
}

#[test]
fn nonterminal_suite_gathers_and_conforms() {
    let dir = TempDir::new().unwrap();
    let out = gather(&["batch", &suite("nonterminal.json"), "--parallel", "--out-dir", p(dir.path())]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let report = read_json(&dir.path().join("nonterminal.report.json"));
    assert!(report["runs"].as_array().unwrap().iter().all(|r| r["algorithm"] == "nonterminal" && r["gathered"] == true));
}

/// The scaling suite reaches the one missing transition-graph edge; every
/// run still gathers and nothing else is flagged.
#[test]
fn scaling_suite_reports_a_fit() {
    let dir = TempDir::new().unwrap();
    let report_path = dir.path().join("scaling.json");
    let out = gather(&["batch", &suite("scaling.json"), "--parallel", "--out", p(&report_path)]);
    let report = read_json(&report_path);
    let runs = report["runs"].as_array().unwrap();
    assert!(runs.iter().all(|r| r["gathered"] == true));
    for r in runs.iter().filter(|r| r["passed"] == false) {
        assert_eq!(r["failures"], serde_json::json!(["transitions"]));
        for v in r["table_violations"].as_array().unwrap() {
            assert_eq!((v["from"].as_str(), v["to"].as_str()), (Some("T2.i"), Some("T2.iii")));
        }
    }
    let failed = runs.iter().any(|r| r["passed"] == false);
    assert_eq!(out.status.code(), Some(if failed { 1 } else { 0 }));
    assert!(report["aggregate"]["fit"]["slope"].as_f64().unwrap() > 0.0);
}
