use std::process::{Command, Output};

use serde_json::Value;

fn wbasket(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wbasket")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = wbasket(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

#[test]
fn eval_golden_basket() {
    let out = ok(&["eval", "7x(1,2),2x(2,5),2x(1,3),(1,4)", "--p2", "1", "--chi", "1", "--m", "2..8"]);
    for line in ["K3 = 1/60", "r_X = 60", "P5 = 2", "P6 = 3", "P7 = 3"] {
        assert!(out.lines().any(|l| l == line), "missing {line:?} in\n{out}");
    }
}

#[test]
fn eval_empty_basket() {
    let out = ok(&["eval", "", "--p2", "0", "--chi", "1", "--m", "2..3"]);
    assert!(out.contains("K3 = 6"));
    // χ3 = (5/2)·6 − 5·1
    assert!(out.lines().any(|l| l == "P3 = 10"), "{out}");
}

#[test]
fn eval_json_matches_library() {
    let out = ok(&["eval", "4x(1,2),(1,3),2x(2,5),(5,12)", "--p2", "1", "--chi", "1", "--out", "json"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["k3"], "1/60");
}

#[test]
fn malformed_input_exit_codes() {
    let o = wbasket(&["eval", "(1,2", "--p2", "1", "--chi", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("parse error"));
    let o = wbasket(&["eval", "(2,4)", "--p2", "1", "--chi", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("coprime"));
}

#[test]
fn pack_example_gives_two_baskets() {
    let out = ok(&[
        "pack",
        "4x(1,2),(3,7),3x(2,5),(1,3)",
        "--p2",
        "1",
        "--chi",
        "1",
        "--min-k3",
        "1/60",
        "--preserve-pm",
        "8",
        "--out",
        "json",
    ]);
    let v: Value = serde_json::from_str(&out).unwrap();
    let text = v.to_string();
    assert!(text.contains("4x(1,2),(1,3),3x(2,5),(3,7)"));
    assert!(text.contains("4x(1,2),(1,3),2x(2,5),(5,12)"));
}

#[test]
fn pack_dot_and_csv() {
    let dot = ok(&["pack", "(1,2),(1,3)", "--p2", "1", "--chi", "1", "--out", "dot"]);
    assert!(dot.starts_with("digraph"));
    assert!(dot.contains("(1,2)+(1,3)"));
    let csv = ok(&["pack", "(1,2),(1,3)", "--p2", "1", "--chi", "1", "--out", "csv"]);
    assert_eq!(csv.lines().count(), 3, "{csv}");
}

#[test]
fn xi_transcript() {
    let out = ok(&[
        "xi", "--m0", "5", "--mu", "1/5", "--beta", "1/5", "--deg-kc", "4", "--range", "2..15", "--m1", "5",
    ]);
    assert!(out.contains("4/11"));
    assert!(out.contains("curve-degree m=14: ξ ≥ 3/7 (was 4/11)"));
    assert!(out.trim_end().ends_with("ξ ≥ 3/7; birational level 16"), "{out}");
}

#[test]
fn b5_point_and_infeasible() {
    let out = ok(&["b5", "--chi", "1", "--p2", "1", "--p3", "1", "--p4", "2", "--p5", "2", "--p6", "3", "--sigma5", "0"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["candidates"][0]["coefficients"], serde_json::json!([7, 2, 2, 1]));
    let o = wbasket(&["b5", "--chi", "1", "--p2", "1", "--p3", "1", "--p4", "2", "--p5", "2", "--p6", "3", "--sigma5", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("σ5 ≤ 2χ−P3+2P5−P6"));
}

#[test]
fn classify_pg1_replay_and_diff() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.json");
    let second = dir.path().join("second.json");
    let out = ok(&["classify", "pg1", "--out", "json"]);
    std::fs::write(&first, &out).unwrap();
    let a: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(a["refined"].as_array().unwrap().len(), 5);

    let replay = ok(&["classify", "pg1", "--config", first.to_str().unwrap(), "--out", "json"]);
    std::fs::write(&second, &replay).unwrap();
    let strip = |s: &str| {
        let mut v: Value = serde_json::from_str(s).unwrap();
        v["manifest"].as_object_mut().unwrap().remove("elapsed_ms");
        serde_json::to_string_pretty(&v).unwrap()
    };
    assert_eq!(strip(&out), strip(&replay));

    let d = ok(&["diff", first.to_str().unwrap(), second.to_str().unwrap()]);
    assert!(d.contains("only left 0, only right 0"), "{d}");
}

#[test]
fn diff_reports_differences() {
    let dir = tempfile::tempdir().unwrap();
    let full = dir.path().join("full.json");
    let part = dir.path().join("part.json");
    let out = ok(&["classify", "pg1", "--out", "json"]);
    std::fs::write(&full, &out).unwrap();
    let mut v: Value = serde_json::from_str(&out).unwrap();
    v["refined"].as_array_mut().unwrap().pop();
    std::fs::write(&part, v.to_string()).unwrap();
    let o = wbasket(&["diff", full.to_str().unwrap(), part.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("only left 1"), "{}", stdout(&o));
}

#[test]
fn print_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("pg3.json");
    let text = ok(&["classify", "pg3", "--print-config"]);
    std::fs::write(&cfg, &text).unwrap();
    let again = ok(&["classify", "pg3", "--config", cfg.to_str().unwrap(), "--print-config"]);
    assert_eq!(text, again);
    assert!(text.contains("P_6(X) ≤ 63"));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"name":"x","bogus":1}"#).unwrap();
    let o = wbasket(&["classify", "pg3", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}
