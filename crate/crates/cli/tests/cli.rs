use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn clonewt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clonewt")).args(args).env_remove("CLONEWT_CAPS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn three(dir: &Path) -> String {
    let p = dir.join("three.json");
    fs::write(&p, r#"{"labels":["p","q","r"],"kind":"points","dim":1,"points":[[0],[0.4],[2]]}"#).unwrap();
    p.to_str().unwrap().to_string()
}

fn paw(dir: &Path) -> String {
    let p = dir.join("paw.edges");
    fs::write(&p, "labels a b c d\na b\na c\nb c\nc d\n").unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn weigh_three_points_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let o = clonewt(&["weigh", "--input", &three(dir.path()), "--rule", "cu", "--alpha", "1", "--nu", "uniform", "--exact"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["weights"]["p"], "17/60");
    assert_eq!(v["weights"]["q"], "17/60");
    assert_eq!(v["weights"]["r"], "13/30");
    assert_eq!(v["rule"], "cu");
}

#[test]
fn unknown_rule_lists_registry() {
    let dir = tempfile::tempdir().unwrap();
    let o = clonewt(&["weigh", "--input", &three(dir.path()), "--rule", "nosuch", "--alpha", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    for name in ["uniform", "cu", "lift:<base>", "smooth:<base>", "mcca", "mccp", "entropy"] {
        assert!(err.contains(name), "{err}");
    }
}

#[test]
fn validation_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"kind":"matrix","distances":[[0,1],[2,0]]}"#).unwrap();
    let bad = bad.to_str().unwrap();
    assert_eq!(clonewt(&["weigh", "--input", bad, "--rule", "cu", "--alpha", "1"]).status.code(), Some(1));
    let t = three(dir.path());
    assert_eq!(clonewt(&["weigh", "--input", &t, "--rule", "cu", "--alpha", "-1"]).status.code(), Some(1));
    assert_eq!(clonewt(&["weigh", "--input", &t, "--rule", "entropy", "--alpha", "1", "--exact"]).status.code(), Some(1));
    assert_eq!(clonewt(&["weigh", "--rule", "cu"]).status.code(), Some(1));
    assert_eq!(clonewt(&["nosuch"]).status.code(), Some(1));
}

#[test]
fn cap_errors_name_the_flag() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("big.edges");
    // 14 isolated vertices exceed the default partition cap of 12.
    fs::write(&p, "n 14\n").unwrap();
    let o = clonewt(&["entropy", "--input", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("CLONEWT_CAPS"), "{}", stderr(&o));
}

#[test]
fn graph_suite_passes_for_cu() {
    let o = clonewt(&["audit", "graph", "--rule", "cu", "--seeds", "50"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn axiom_audit_gates_with_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let g = paw(dir.path());
    let o = clonewt(&["audit", "--input", &g, "--rule", "mcca", "--axioms", "1,2,3,4"]);
    assert_eq!(o.status.code(), Some(2));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["results"][1]["axiom"], 2);
    assert_eq!(v["results"][1]["holds"], false);

    let tri = dir.path().join("tri.edges");
    fs::write(&tri, "labels a b c\na b\nb c\na c\n").unwrap();
    let report = dir.path().join("cu.json");
    let o = clonewt(&["audit", "axioms", "--input", tri.to_str().unwrap(), "--rule", "cu", "--report", report.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("axioms hold"));
    let v: Value = serde_json::from_str(&fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(v["results"].as_array().unwrap().len(), 4);
}

#[test]
fn demo_reaches_the_contradiction() {
    let o = clonewt(&["audit", "demo"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["contradiction"], true);
    assert_eq!(v["total_mass"], "0");
}

#[test]
fn conjecture_search_reports_witnesses() {
    let o = clonewt(&["audit", "conjecture", "--target", "mcc_axiom2", "--budget", "10"]);
    assert_eq!(o.status.code(), Some(2));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(!v["witnesses"].as_array().unwrap().is_empty());
    assert_eq!(clonewt(&["audit", "conjecture", "--target", "bogus"]).status.code(), Some(1));
}

#[test]
fn output_is_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("square.json");
    fs::write(&p, r#"{"kind":"points","dim":2,"points":[[0,0],[0.3,0.1],[1,1],[0.9,0.2],[0.2,0.8]]}"#).unwrap();
    let p = p.to_str().unwrap();
    let runs: Vec<String> = ["1", "4", "4"]
        .iter()
        .map(|t| {
            let o = clonewt(&["--threads", t, "share", "--input", p, "--family", "gr", "--r", "0.4", "--samples", "20000", "--seed", "5"]);
            assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
            stdout(&o)
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[1], runs[2]);
}

#[test]
fn monte_carlo_needs_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("pair.json");
    fs::write(&p, r#"{"kind":"points","dim":2,"points":[[0,0],[0.5,0]]}"#).unwrap();
    let o = clonewt(&["share", "--input", p.to_str().unwrap(), "--family", "gr", "--r", "0.4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--seed"));
}

#[test]
fn one_dimensional_sharing_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("pair.json");
    fs::write(&p, r#"{"kind":"points","dim":1,"points":[[0],[1]]}"#).unwrap();
    let o = clonewt(&["share", "--input", p.to_str().unwrap(), "--family", "gr", "--r", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["exact"]["weights"][0], "1/2");
    assert_eq!(v["exact"]["chi"][0][1], "1/6");
    assert_eq!(v["exact"]["chi"][0][0], "1/3");
}

#[test]
fn graph_and_cliques_round_trip_through_edge_lists() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.edges");
    let o = clonewt(&["graph", "--input", &three(dir.path()), "--r", "0.5", "--output", g.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read_to_string(&g).unwrap(), "labels p q r\n0 1\n");
    let o = clonewt(&["cliques", "--input", g.to_str().unwrap()]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["cliques"], serde_json::json!([["p", "q"], ["r"]]));
}

#[test]
fn weights_documents_feed_sampling() {
    let dir = tempfile::tempdir().unwrap();
    let t = three(dir.path());
    for format in ["json", "csv"] {
        let w = dir.path().join(format!("w.{format}"));
        let o = clonewt(&["weigh", "--input", &t, "--rule", "cu", "--alpha", "1", "--exact", "--format", format, "-o", w.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        let a = clonewt(&["sample", "--input", w.to_str().unwrap(), "--k", "20", "--seed", "3"]);
        let b = clonewt(&["sample", "--input", w.to_str().unwrap(), "--k", "20", "--seed", "3"]);
        assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
        assert_eq!(stdout(&a), stdout(&b));
        let v: Value = serde_json::from_str(&stdout(&a)).unwrap();
        assert_eq!(v["draws"].as_array().unwrap().len(), 20);
    }
}

#[test]
fn perfect_clone_attack_leaves_far_weights() {
    let dir = tempfile::tempdir().unwrap();
    let o = clonewt(&["attack", "--input", &three(dir.path()), "--rule", "cu", "--alpha", "1", "--exact", "--target", "p", "--k", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["far"][0]["label"], "r");
    assert_eq!(v["far"][0]["exactly_zero"], true);
    assert_eq!(v["uniform"]["after"], v["uniform_expected"]);
}

#[test]
fn entropy_on_an_edge() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("e.edges");
    fs::write(&p, "labels a b c\na b\n").unwrap();
    let o = clonewt(&["entropy", "--input", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["value_bits"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((v["weights"]["c"].as_f64().unwrap() - 0.5).abs() < 1e-6);
}
