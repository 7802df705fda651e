use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn sonckit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sonckit"))
        .args(args)
        .env("SONCKIT_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn analyze_robinson() {
    let o = sonckit(&["analyze", arg(&data("robinson1.poly"))]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("not SONC (exact; necessary condition violated: 6 > 3)"), "{}", stdout(&o));
}

#[test]
fn analyze_motzkin() {
    let o = sonckit(&["analyze", arg(&data("motzkin.poly")), "--mms"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("nonnegative circuit (boundary)"), "{out}");
    assert!(out.contains("not SOS (β ∉ Δ*)"), "{out}");
}

#[test]
fn analyze_zero_form() {
    let o = sonckit(&["analyze", arg(&data("zero.poly")), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["zero_form"], true);
    assert!(v["verdicts"].as_array().unwrap().is_empty());
}

#[test]
fn analyze_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.poly");
    std::fs::write(&bad, "x1^2 + x2^3").unwrap();
    assert_eq!(sonckit(&["analyze", arg(&bad)]).status.code(), Some(1));
    std::fs::write(&bad, "x1^2 + * x2").unwrap();
    assert_eq!(sonckit(&["analyze", arg(&bad)]).status.code(), Some(1));
    assert_eq!(sonckit(&["analyze", arg(&dir.path().join("missing.poly"))]).status.code(), Some(1));
}

#[test]
fn json_report_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let first = sonckit(&["analyze", arg(&data("robinson1.poly")), "--json"]);
    let report = dir.path().join("report.json");
    std::fs::write(&report, &first.stdout).unwrap();
    let second = sonckit(&["analyze", arg(&report), "--json"]);
    assert_eq!(second.status.code(), Some(0));
    let a: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    let b: serde_json::Value = serde_json::from_slice(&second.stdout).unwrap();
    assert_eq!(a["verdicts"], b["verdicts"]);
    assert_eq!(a["form_name"], "robinson_r1");
}

#[test]
fn analyze_with_search() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.poly");
    std::fs::write(
        &f,
        "4*x1^4*x3^4 + 4*x1^4*x2^4 + 1/4*x2^4*x3^4 + 8*x1^4*x2^2*x3^2 - 2*x1^2*x2^2*x3^4 - 2*x1^2*x2^4*x3^2",
    )
    .unwrap();
    let o = sonckit(&["analyze", arg(&f), "--search"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("not SONC (numeric, margin"), "{}", stdout(&o));
    let o = sonckit(&["analyze", arg(&f), "--search", "--max-params", "0"]);
    assert!(stdout(&o).contains("inconclusive"), "{}", stdout(&o));
}

#[test]
fn corpus_full_and_filtered() {
    let o = sonckit(&["corpus"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = sonckit(&["corpus", "--filter", "robinson", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Vec<serde_json::Value> = serde_json::from_slice(&o.stdout).unwrap();
    let names: std::collections::BTreeSet<&str> = v.iter().map(|r| r["entry"].as_str().unwrap()).collect();
    assert_eq!(names.len(), 2);
    let checks: std::collections::BTreeSet<&str> = v.iter().map(|r| r["check"].as_str().unwrap()).collect();
    assert!(checks.contains("grid vanishing") && checks.contains("necessary condition"));
    let o = sonckit(&["corpus", "--filter", "^no_such_entry$"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0 checks"));
    assert_eq!(sonckit(&["corpus", "--filter", "("]).status.code(), Some(1));
}

#[test]
fn corpus_output_is_deterministic() {
    assert_eq!(sonckit(&["corpus"]).stdout, sonckit(&["corpus"]).stdout);
}

#[test]
fn mms_command() {
    let o = sonckit(&["mms", "--points", "4,2,0; 2,4,0; 0,0,6"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("classification: MSimplex") && out.contains("star (6)"), "{out}");
    let o = sonckit(&["mms", "--points", "0,0; 2,0; 0,2"]);
    assert!(stdout(&o).contains("HSimplex"));
    assert_eq!(sonckit(&["mms", "--points", "1,1"]).status.code(), Some(1));
    assert_eq!(sonckit(&["mms", "--points", "1,x"]).status.code(), Some(1));
}

#[test]
fn grid_command() {
    let o = sonckit(&["grid", arg(&data("robinson1.poly")), "--grid", "X"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("grid X: 9 points, 8 zeros"), "{out}");
    assert!(out.contains("(0,0,1)  1  nonzero"), "{out}");
    assert_eq!(sonckit(&["grid", arg(&data("robinson1.poly")), "--grid", "Y"]).status.code(), Some(1));
    assert_eq!(sonckit(&["grid", arg(&data("robinson1.poly")), "--grid", "Z"]).status.code(), Some(1));
}
