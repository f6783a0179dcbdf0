use std::path::{Path, PathBuf};
use std::process::Command;

use ssred_cli::run;

fn fixture(rel: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(rel).to_str().unwrap().to_string()
}

fn ssred(args: &[&str]) -> ssred_cli::CommandResult {
    let mut argv = vec!["ssred"];
    argv.extend_from_slice(args);
    run(argv)
}

fn write_tmp(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn hull_of_chain_has_a_thickness_three_edge() {
    let r = ssred(&["hull", &fixture("models/chain_two_minus_two.json")]);
    assert_eq!(r.exit_code, 0, "{}", r.stderr);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["edges"].as_array().unwrap().len(), 1);
    assert_eq!(v["edges"][0]["thickness"], 3);
    assert_eq!(r.stdout, std::fs::read_to_string(fixture("golden/hull_chain_two_minus_two.json")).unwrap());
}

#[test]
fn cover_stable_gives_two_point_cover() {
    let r = ssred(&["cover-stable", &fixture("covers/stable_g.json")]);
    assert_eq!(r.exit_code, 0);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["source"]["vertices"].as_array().unwrap().len(), 1);
    assert_eq!(v["target"]["vertices"].as_array().unwrap().len(), 1);
    assert_eq!(v["steps"].as_array().unwrap().len(), 1);
}

#[test]
fn thickness_zero_is_rule_thickness_positive() {
    let r = ssred(&["validate", &fixture("invalid/thickness-positive.json")]);
    assert_eq!(r.exit_code, 1);
    assert!(r.stderr.contains("[thickness-positive]"));
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["valid"], false);
    assert_eq!(v["diagnostics"][0]["rule"], "thickness-positive");
}

#[test]
fn strict_model_rules_apply_to_hull() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(fixture("models/chain_two_minus_two.json")).unwrap();
    let legged = text.replacen("{\"genus\": 0, \"id\": 1}", "{\"genus\": 0, \"id\": 1, \"legs\": [0]}", 1);
    let p = write_tmp(&dir, "m.json", &legged);
    let r = ssred(&["hull", p.to_str().unwrap()]);
    assert_eq!(r.exit_code, 1);
    assert!(r.stderr.contains("[marked-exceptional]"), "{}", r.stderr);
}

#[test]
fn exit_codes_for_preconditions_and_usage() {
    let r = ssred(&["cover-stable", &fixture("covers/node_over_smooth_point.json")]);
    assert_eq!(r.exit_code, 2);
    assert!(r.stderr.contains("[node-over-smooth-point]"));
    let r = ssred(&["marked-hull", &fixture("models/marked_half.json")]);
    assert_eq!(r.exit_code, 2);
    assert!(r.stderr.contains("[non-integral-marking]") && r.stderr.contains("base change by 2"));
    let r = ssred(&["basechange", &fixture("graphs/cycle4_genus1.json"), "-e", "0"]);
    assert_eq!(r.exit_code, 2);
    assert_eq!(ssred(&["frobnicate"]).exit_code, 2);
    assert_eq!(ssred(&["genus", "/nonexistent.json"]).exit_code, 2);
    assert_eq!(ssred(&["contract", &fixture("graphs/cycle4_genus1.json"), "--victims", "x"]).exit_code, 2);
    assert_eq!(ssred(&["genus", &fixture("covers/stable_g.json")]).exit_code, 1);
    let r = ssred(&["--help"]);
    assert_eq!(r.exit_code, 0);
    assert!(r.stdout.contains("cover-stable"));
}

#[test]
fn scalar_outputs() {
    let r = ssred(&["genus", &fixture("graphs/cycle4_genus1.json")]);
    assert_eq!(r.stdout, "{\n  \"arithmetic_genus\": 1\n}\n");
    let r = ssred(&["omega", &fixture("graphs/marked_tails.json"), "--marked"]);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["total"], 5);
    let r = ssred(&["omega", &fixture("graphs/marked_tails.json")]);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["total"], 2);
    let r = ssred(&["split-index", &fixture("models/marked_loop.json")]);
    assert!(r.stdout.contains("\"splitting_index\": 4"));
    let r = ssred(&["rh", &fixture("covers/marked_tail_double.json")]);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert!(v["marked_rh_defect"].as_object().unwrap().values().all(|x| x == 0));
}

#[test]
fn outputs_validate_when_fed_back() {
    let dir = tempfile::tempdir().unwrap();
    let runs: Vec<Vec<String>> = vec![
        vec!["desing".into(), fixture("graphs/loop_and_thick.json")],
        vec!["contract".into(), fixture("graphs/cycle4_genus1.json"), "--victims".into(), "1,2".into()],
        vec!["basechange".into(), fixture("models/marked_thirds.json"), "-e".into(), "3".into()],
        vec!["basechange".into(), fixture("graphs/loop_and_thick.json"), "-e".into(), "2".into()],
        vec!["hull".into(), fixture("models/triangle_two_exceptional.json")],
        vec!["marked-model".into(), fixture("graphs/marked_tails.json")],
        vec!["join".into(), fixture("models/chain_partial.json"), fixture("models/chain_two_minus_two.json")],
        vec!["cover-stable".into(), fixture("covers/degree_two_chain.json")],
        vec!["cover-basechange".into(), fixture("covers/stable_g.json"), "-e".into(), "5".into()],
        vec!["cover-hull".into(), fixture("covers/subdivided_leaf.json"), "--ex-source".into(), "3".into(), "--ex-target".into(), "3".into()],
        vec!["quotient".into(), fixture("graphs/quotient_swap_input.json"), "--action".into(), fixture("actions/swap.json")],
    ];
    for (i, args) in runs.iter().enumerate() {
        let argv: Vec<&str> = args.iter().map(String::as_str).collect();
        let r = ssred(&argv);
        assert_eq!(r.exit_code, 0, "{args:?}: {}", r.stderr);
        let p = write_tmp(&dir, &format!("out{i}.json"), &r.stdout);
        let back = ssred(&["validate", p.to_str().unwrap()]);
        assert_eq!(back.exit_code, 0, "{args:?} output: {}", back.stderr);
    }
}

#[test]
fn marked_hull_after_splitting() {
    let dir = tempfile::tempdir().unwrap();
    let r = ssred(&["basechange", &fixture("models/marked_half.json"), "-e", "2"]);
    let p = write_tmp(&dir, "b.json", &r.stdout);
    let r = ssred(&["marked-hull", p.to_str().unwrap()]);
    assert_eq!(r.exit_code, 0, "{}", r.stderr);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert!(v["edge_markings"].as_array().unwrap().is_empty());
}

#[test]
fn dot_exports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.dot");
    let r = ssred(&["export-dot", &fixture("covers/stable_g.json"), "-o", out.to_str().unwrap()]);
    assert_eq!(r.exit_code, 0);
    assert_eq!(std::fs::read_to_string(&out).unwrap(), std::fs::read_to_string(fixture("golden/stable_g.dot")).unwrap());
    let r = ssred(&["oracle", &fixture("models/chain_two_minus_two.json"), "--format", "dot"]);
    assert!(r.stdout.starts_with("digraph") && r.stdout.contains("doublecircle"), "{}", r.stdout);
    let r = ssred(&["genus", &fixture("graphs/cycle4_genus1.json"), "--format", "dot"]);
    assert_eq!(r.exit_code, 2);
}

#[test]
fn oracle_output_is_independent_of_jobs() {
    let f = fixture("models/chain_two_minus_two.json");
    let a = ssred(&["oracle", &f, "--jobs", "1"]);
    let b = ssred(&["oracle", &f, "--jobs", "4"]);
    assert_eq!(a.exit_code, 0);
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a.stdout).unwrap();
    assert_eq!(v["confluent"], true);
    assert_eq!(v["elements"].as_array().unwrap().len(), 4);
    let c = ssred(&["oracle", &fixture("covers/stable_g.json")]);
    let v: serde_json::Value = serde_json::from_str(&c.stdout).unwrap();
    assert_eq!(v["covers_relation"], serde_json::json!([[1, 0]]));
    let small = ssred(&["oracle", &f, "--bound", "3"]);
    assert_eq!(small.exit_code, 2);
    assert!(small.stderr.contains("[bound-exceeded]"));
}

#[test]
fn binary_matches_library() {
    let f = fixture("covers/stable_g.json");
    let out = Command::new(env!("CARGO_BIN_EXE_ssred")).args(["cover-stable", &f]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), ssred(&["cover-stable", &f]).stdout);
    let bad = Command::new(env!("CARGO_BIN_EXE_ssred"))
        .args(["validate", &fixture("invalid/harmonicity.json")])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8(bad.stderr).unwrap().contains("[harmonicity]"));
}
