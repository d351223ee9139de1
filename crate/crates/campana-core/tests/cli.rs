//! End-to-end tests of the `campana` binary: exit codes, record shapes,
//! and byte-level determinism.

use std::process::{Command, Output};

fn campana(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_campana"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stdout);
    let line = text.lines().next().unwrap_or_else(|| panic!("no output: {out:?}"));
    serde_json::from_str(line).unwrap_or_else(|e| panic!("bad json {line:?}: {e}"))
}

#[test]
fn decompose_success_and_domain_error() {
    let ok = campana(&["decompose", "72", "--m", "2"]);
    assert_eq!(ok.status.code(), Some(0));
    let rec = stdout_json(&ok);
    assert_eq!(rec["record"], "decomposition");
    assert_eq!(rec["result"]["u"], 3);
    assert_eq!(rec["result"]["v"][0], 2);
    assert_eq!(rec["result"]["sign"], 1);

    let err = campana(&["decompose", "12", "--m", "2"]);
    assert_eq!(err.status.code(), Some(3), "non-m-full input is a domain error");
    let msg = String::from_utf8_lossy(&err.stderr);
    assert!(msg.contains("prime 3"), "witnessing prime named: {msg}");

    let trivial = campana(&["decompose", "1", "--m", "5"]);
    assert_eq!(trivial.status.code(), Some(0));
    let rec = stdout_json(&trivial);
    assert_eq!(rec["result"]["u"], 1);
    assert_eq!(rec["result"]["v"].as_array().unwrap().len(), 4);
}

#[test]
fn usage_errors_exit_2() {
    let bad_flag = campana(&["decompose", "72"]);
    assert_eq!(bad_flag.status.code(), Some(2), "missing --m is a usage error");

    let dir = std::env::temp_dir().join("campana-bad-spec.json");
    std::fs::write(&dir, "{\"k\": 2, \"c\": [1, -1]").unwrap();
    let bad_spec = campana(&["admissible", "--spec", dir.to_str().unwrap()]);
    assert_eq!(bad_spec.status.code(), Some(2), "malformed spec file is a usage error");

    let missing = campana(&["admissible"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn admissible_boundary_via_spec_file() {
    let dir = std::env::temp_dir().join("campana-spec-17.json");
    let c: Vec<i64> = (0..16).map(|_| 1).chain([-1]).collect();
    let spec = serde_json::json!({"k": 2, "c": c, "m": vec![2; 17]});
    std::fs::write(&dir, spec.to_string()).unwrap();
    let out = campana(&["admissible", "--spec", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let rec = stdout_json(&out);
    assert_eq!(rec["result"]["condition_main"], true);
    assert!(String::from_utf8_lossy(&out.stderr).contains("PASS"));

    let out = campana(&[
        "admissible",
        "--k",
        "2",
        "--c",
        "1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,-1",
        "--m",
        "2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rec = stdout_json(&out);
    assert_eq!(rec["result"]["condition_main"], false, "16 twos fail");
}

#[test]
fn count_modes() {
    let camp = campana(&["count", "--mode", "campana", "--k", "2", "--c", "1,-1", "--m", "2,2", "--B", "10"]);
    assert_eq!(camp.status.code(), Some(0));
    assert_eq!(stdout_json(&camp)["result"]["count"], 2);

    let n = campana(&["count", "--mode", "n", "--k", "2", "--c", "1,-1", "--m", "2,2", "--B", "10"]);
    assert_eq!(stdout_json(&n)["result"]["count"], 4);

    let nstar = campana(&["count", "--mode", "nstar", "--k", "2", "--c", "1,1,-2", "--m", "2,2,2", "--B", "10"]);
    assert_eq!(stdout_json(&nstar)["result"]["count"], 1);

    let m = campana(&["count", "--mode", "m", "--quadratic7", "--B", "64"]);
    let rec = stdout_json(&m);
    assert_eq!(rec["result"]["count"], 13202);
    assert_eq!(rec["result"]["method"], "histogram-convolution");
    // records carry no timing: byte-identical across runs
    assert!(rec["result"]["elapsed"].is_null());
}

#[test]
fn budget_exceeded_exits_4() {
    let out = campana(&[
        "count", "--mode", "m", "--quadratic7", "--B", "1000000",
        "--budget-mem", "64",
    ]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}

#[test]
fn predict_is_byte_deterministic() {
    let args = [
        "predict", "--quadratic7", "--B", "4096", "--seed", "1",
        "--mc-samples", "400000", "--qmax", "120",
    ];
    let a = campana(&args);
    let b = campana(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout, "same seed must give identical bytes");
    let rec = stdout_json(&a);
    assert_eq!(rec["record"], "prediction");
    assert_eq!(rec["config"]["seed"], 1);
    assert_eq!(rec["version"], campana_core::VERSION);
    assert!(rec["result"]["main_term"].as_f64().unwrap() > 0.0);
}

#[test]
fn predict_euler_and_oscillatory_flags() {
    let out = campana(&[
        "predict", "--quadratic7", "--B", "1024", "--seed", "2",
        "--euler", "--pmax", "47", "--level", "2",
        "--oscillatory", "--lambda-cutoff", "200",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let rec = stdout_json(&out);
    let trunc = &rec["result"]["truncation"];
    assert_eq!(trunc["series_mode"]["mode"], "euler");
    assert_eq!(trunc["integral"], "oscillatory");
    let main = rec["result"]["main_term"].as_f64().unwrap();
    // S * J * 1024^(5/2) with S ~ 1.128, J ~ 0.462
    let reference = 1.128 * 0.462 * 1024f64.powf(2.5);
    assert!((main / reference - 1.0).abs() < 0.05, "{main} vs {reference}");
}

#[test]
fn compare_emits_rows_and_fit() {
    let out = campana(&[
        "compare", "--quadratic7", "--grid", "256,512,1024",
        "--mc-samples", "200000", "--qmax", "80", "--seed", "5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rec = stdout_json(&out);
    let rows = rec["result"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    let fitted = rec["result"]["fitted_exponent"].as_f64().unwrap();
    assert!((fitted - 2.5).abs() < 0.2, "fitted {fitted}");

    // CSV output for spreadsheets
    let csv = campana(&[
        "compare", "--quadratic7", "--grid", "256,512",
        "--mc-samples", "200000", "--qmax", "80", "--seed", "5",
        "--format", "csv",
    ]);
    let text = String::from_utf8_lossy(&csv.stdout);
    assert!(text.starts_with("bound,exact,predicted,ratio"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn series_modes_and_cross_check_exit_5() {
    let qs = campana(&["series", "--quadratic7", "--mode", "qsum", "--qmax", "300"]);
    assert_eq!(qs.status.code(), Some(0));
    let v1 = stdout_json(&qs)["result"]["value"].as_f64().unwrap();
    let eu = campana(&["series", "--quadratic7", "--mode", "euler", "--pmax", "101", "--level", "3"]);
    let v2 = stdout_json(&eu)["result"]["value"].as_f64().unwrap();
    assert!(((v1 - v2) / v1).abs() < 0.01, "{v1} vs {v2}");

    // a level-1 Euler product truncated at p = 2 is 1.0, far from the q-sum:
    // the cross-check must fail with the disagreement exit code
    let bad = campana(&[
        "series", "--quadratic7", "--cross-check", "--qmax", "300",
        "--pmax", "2", "--level", "1",
    ]);
    assert_eq!(bad.status.code(), Some(5));
}

#[test]
fn constant_reports_partials() {
    let out = campana(&[
        "constant", "--k", "2", "--c", "1,1,-1", "--m", "2,2,2",
        "--tcap", "3", "--mc-samples", "150000", "--constant-pmax", "7",
        "--constant-level", "2", "--seed", "5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rec = stdout_json(&out);
    assert_eq!(rec["record"], "leading-constant");
    assert_eq!(rec["result"]["triples_used"], 1);
    assert!(rec["result"]["value"].as_f64().unwrap().is_finite());
    // outside the theorem's range and flagged as such
    assert_eq!(rec["result"]["admissible"], false);

    let full = campana(&[
        "constant", "--k", "2", "--c", "1,1,-1", "--m", "2,2,2", "--full",
        "--tcap", "3", "--mc-samples", "150000", "--constant-pmax", "7",
        "--constant-level", "2", "--seed", "5",
    ]);
    let rec_full = stdout_json(&full);
    // even k: full constant is 2^n times the single-pattern value
    let single = rec["result"]["value"].as_f64().unwrap();
    let assembled = rec_full["result"]["value"].as_f64().unwrap();
    assert!((assembled - 4.0 * single).abs() < 1e-9 * single.abs().max(1.0));
}

#[test]
fn compare_on_orbifold_spec() {
    let out = campana(&[
        "compare", "--k", "2", "--c", "1,1,1,-1,-1", "--m", "2,2,2,2,2",
        "--grid", "20,40", "--mc-samples", "150000", "--tcap", "4",
        "--constant-pmax", "7", "--constant-level", "2", "--seed", "2",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let rec = stdout_json(&out);
    assert_eq!(rec["result"]["rows"].as_array().unwrap().len(), 2);
    assert_eq!(rec["result"]["expected_exponent"], 0.5);
}

#[test]
fn varpi_table_is_csv() {
    let out = campana(&["varpi-table", "--m", "2,2", "--cap", "16"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("s,t,varpi,weight"));
    // (1,1) first with weight 1
    assert_eq!(lines.next(), Some("1|1,1;1,1,1"));
    assert_eq!(text.lines().count(), 7, "{text}");
}

#[test]
fn integral_both_methods_cross_check() {
    let out = campana(&[
        "integral", "--quadratic7", "--method", "both",
        "--mc-samples", "400000", "--seed", "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().count(), 2, "one record per method");
}

#[test]
fn scan_reports_rows() {
    let out = campana(&[
        "scan", "--d", "1,-1", "--mtilde", "2,2", "--B", "2048",
        "--delta", "0.02", "--samples", "200",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rec = stdout_json(&out);
    assert_eq!(rec["result"].as_array().unwrap().len(), 2);
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join("campana-out-test.jsonl");
    let _ = std::fs::remove_file(&path);
    let out = campana(&[
        "count", "--mode", "campana", "--k", "2", "--c", "1,-1", "--m", "2,2",
        "--B", "10", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let rec: serde_json::Value = serde_json::from_str(text.trim()).unwrap();
    assert_eq!(rec["result"]["count"], 2);
}
