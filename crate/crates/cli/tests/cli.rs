use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use freelines::arrangement::{Arrangement, ArrangementDoc};
use freelines::gallery;
use freelines::report::analyze;
use freelines::syzygy::ProfileOptions;
use serde_json::Value;

fn freelines(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freelines"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_freelines"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON on stdout")
}

#[test]
fn analyze_a13_human_summary() {
    let o = freelines(&["analyze", "gallery:A13"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(
        text.contains("free, exponents (6,6), τ=108, divisionally free via L4, L8, ν=0, type 0"),
        "{text}"
    );
    assert!(text.contains(">> tau_max(13, 6) = 108"), "{text}");
}

#[test]
fn analyze_a10_reports_defect_and_type() {
    let o = freelines(&["analyze", "gallery:A10"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("4-syzygy, exponents (5,6,6,6), τ="), "{}", stdout(&o));
    assert!(stdout(&o).contains("ν=3, type 2"));
}

#[test]
fn analyze_json_is_deterministic_and_versioned() {
    let a = freelines(&["analyze", "gallery:A9", "--json"]);
    let b = freelines(&["analyze", "gallery:A9", "--json"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["schema"], "freelines.report/1");
    assert_eq!(v["profile"]["degrees"], serde_json::json!([5, 5, 5, 5]));
    assert_eq!(v["freeness_routes"]["agree"], true);
}

#[test]
fn emit_then_analyze_matches_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a13.json");
    let o = freelines(&["gallery", "emit", "A13", "-o", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let from_file = freelines(&["analyze", path.to_str().unwrap(), "--json"]);
    assert_eq!(code(&from_file), 0);

    let emitted = stdout(&freelines(&["gallery", "emit", "A13"]));
    let from_stdin = with_stdin(&["analyze", "-", "--json"], &emitted);
    assert_eq!(from_file.stdout, from_stdin.stdout);

    let a = gallery::build("A13").unwrap();
    let internal = analyze(&a, Some("A13"), &ProfileOptions::default(), &[]).unwrap().to_json();
    assert_eq!(stdout(&from_file).trim_end(), internal.trim_end());
}

#[test]
fn two_lines_are_free_zero_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("two-lines.json");
    fs::write(&path, r#"{"field":{"modulus":["0","1"]},"lines":[["1","0","0"],["0","1","0"]]}"#).unwrap();
    let o = freelines(&["analyze", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("free, exponents (0,1)"), "{}", stdout(&o));
}

#[test]
fn parse_errors_exit_two() {
    assert_eq!(code(&freelines(&["analyze", "/nonexistent/arrangement.json"])), 2);
    assert_eq!(code(&with_stdin(&["analyze", "-"], "{")), 2);
    assert_eq!(code(&freelines(&["analyze", "gallery:A99"])), 2);
    assert_eq!(code(&freelines(&["verify", "gallery:A13", "thm99"])), 2);
    let bad_point = freelines(&["scan", "gallery:monomial(3)", "--mode", "add", "--point", "0:0"]);
    assert_eq!(code(&bad_point), 2);
    // repeated line
    let doc = r#"{"field":{"modulus":["0","1"]},"lines":[["1","0","0"],["2","0","0"],["0","1","0"]]}"#;
    assert_eq!(code(&with_stdin(&["analyze", "-"], doc)), 2);
}

#[test]
fn small_cap_exits_three() {
    let o = freelines(&["analyze", "gallery:A10", "--cap", "5", "--no-defect"]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn unmet_hypothesis_is_reported_not_failed() {
    let o = freelines(&["verify", "gallery:A13", "thm02"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("hypothesis not satisfied"), "{}", stdout(&o));
}

#[test]
fn dichotomy_gate_passes_on_the_gallery() {
    let o = freelines(&["verify", "--gallery", "thmAe1"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("0 disagreements"));
}

fn witness_files(dir: &Path) -> Vec<Value> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        assert!(p.file_name().unwrap().to_str().unwrap().starts_with("witness-corAe1-ex15-"));
        out.push(serde_json::from_str(&fs::read_to_string(&p).unwrap()).unwrap());
    }
    out
}

#[test]
fn corollary_disagreement_on_ex15_writes_witnesses() {
    let dir = tempfile::tempdir().unwrap();
    let o = freelines(&["verify", "gallery:ex15", "corAe1", "--witness-dir", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 5);
    let witnesses = witness_files(dir.path());
    assert_eq!(witnesses.len(), 14);
    for w in &witnesses {
        assert_eq!(w["schema"], "freelines.witness/1");
        assert_eq!(w["case"]["agreement"], false);
        let doc: ArrangementDoc = serde_json::from_value(w["arrangement"].clone()).unwrap();
        let a = Arrangement::from_document(&doc).unwrap();
        assert_eq!(a.d(), 15);
    }
}

fn reports(v: &Value) -> &Vec<Value> {
    v["reports"].as_array().unwrap()
}

#[test]
fn scan_additions_on_monomial3() {
    let o = freelines(&["scan", "gallery:monomial(3)", "--mode", "add", "--point", "0:0:1", "--json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let case_of = |cov: &str| {
        reports(&v)
            .iter()
            .find(|r| r["covector"] == cov)
            .unwrap_or_else(|| panic!("no report for {cov}"))["case"]
            .clone()
    };
    assert_eq!(case_of("(1, 0, 0)"), 2);
    assert_eq!(case_of("(1, 2, 0)"), 3);
}

#[test]
fn scan_additions_accept_extra_lines() {
    let o = freelines(&[
        "scan",
        "gallery:monomial(4)",
        "--mode",
        "add",
        "--point",
        "0:0:1",
        "--line",
        "1,3,0",
        "--json",
    ]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert!(reports(&v).iter().any(|r| r["covector"] == "(1, 3, 0)"));
}

#[test]
fn scan_deletions_on_pentagram_land_in_case_four() {
    let o = freelines(&["scan", "gallery:pentagram", "--mode", "delete", "--json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let corollary: Vec<&Value> = reports(&v).iter().filter(|r| r["theorem"] == "corAe1").collect();
    assert_eq!(corollary.len(), 11);
    assert!(corollary.iter().all(|r| r["case"] == 4 && r["agreement"] == true));
}

#[test]
fn scan_deletions_on_ex15_find_case_one() {
    let o = freelines(&["scan", "gallery:ex15", "--mode", "delete"]);
    let text = stdout(&o);
    let line = text
        .lines()
        .find(|l| l.starts_with("[thm02]") && l.contains("L=(1, -2, 0)"))
        .unwrap_or_else(|| panic!("{text}"));
    assert!(line.contains("r_L=10: case (1)") && line.ends_with("=> agree"), "{line}");
    // the corollary rows for the other lines disagree, so the scan reports it
    assert_eq!(code(&o), 5);
}

#[test]
fn gallery_list_carries_expected_invariants() {
    let o = freelines(&["gallery", "list", "--json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let row = |name: &str| v.as_array().unwrap().iter().find(|r| r["name"] == name).unwrap().clone();
    let a13 = row("A13");
    assert_eq!(a13["expected"]["exponents"], serde_json::json!([6, 6]));
    assert_eq!(a13["expected"]["tau"], 108);
    let a10 = row("A10");
    assert_eq!(a10["expected"]["exponents"], serde_json::json!([5, 6, 6, 6]));
    assert_eq!(a10["expected"]["nu"], 3);
    assert_eq!(row("monomial(3)")["expected"]["exponents"], serde_json::json!([4, 4]));
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|r| r["name"].as_str().unwrap()).collect();
    assert_eq!(names, gallery::CATALOG);
}
