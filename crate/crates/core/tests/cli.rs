//! End-to-end checks of the `expdom` binary: subcommands, exit codes, and
//! output formats.

use std::path::PathBuf;
use std::process::{Command, Output};

fn expdom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_expdom"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("expdom-cli-{}-{name}", std::process::id()));
    p
}

#[test]
fn bound_float_reports_denominator() {
    let out = expdom(&["bound", "--r", "13", "--arith", "float"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("13.7618919392"), "missing denominator: {text}");
    assert!(text.contains("tiling-upper"));
}

#[test]
fn bound_rejects_even_window() {
    let out = expdom(&["bound", "--r", "12"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("odd"), "stderr: {err}");
}

#[test]
fn bound_json_is_machine_readable() {
    let out = expdom(&["bound", "--r", "13", "--arith", "float", "--json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).expect("valid JSON");
    let denom = v["denominator"].as_f64().unwrap();
    assert!((denom - 13.7618919392).abs() < 1e-6);
    assert!(v["provenance"][0]["instance_hash"].as_str().unwrap().len() == 64);
}

#[test]
fn verify_exit_codes() {
    let good = tmp("tiling.json");
    let tiling = expdom::domination::diagonal_tiling(5, 1, 1).unwrap();
    std::fs::write(&good, tiling.to_json()).unwrap();
    let out = expdom(&["verify", good.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));

    let bad = tmp("single.json");
    std::fs::write(&bad, r#"{"m":3,"n":3,"vertices":[[0,0]]}"#).unwrap();
    let out = expdom(&["verify", bad.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["dominating"], false);
    assert_eq!(v["deficient"].as_array().unwrap().len(), 4);

    let broken = tmp("broken.json");
    std::fs::write(&broken, "{nope").unwrap();
    let out = expdom(&["verify", broken.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bruteforce_exit_codes() {
    let out = expdom(&["bruteforce", "--dims", "3x3", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["gamma"], 2);

    // cap too small: NOT_FOUND
    let out = expdom(&["bruteforce", "--dims", "3x3", "--cap", "1"]);
    assert_eq!(out.status.code(), Some(5));

    // guard: SIZE_LIMIT
    let out = expdom(&["bruteforce", "--dims", "9x9"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn export_solve_round_trip() {
    let problem = tmp("main5.json");
    let out = expdom(&[
        "export",
        "--variant",
        "main",
        "--r",
        "5",
        "--output",
        problem.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let out = expdom(&[
        "solve",
        problem.to_str().unwrap(),
        "--arith",
        "exact",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["status"], "OPTIMAL");
    assert_eq!(v["value"]["exact"], "298/25");
    assert_eq!(v["certificate"]["ok"], true);

    // float and exact agree within 1e-6
    let out = expdom(&["solve", problem.to_str().unwrap(), "--arith", "float"]);
    let vf: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let f: f64 = vf["value"]["decimal"].as_str().unwrap().parse().unwrap();
    assert!((f - 11.92).abs() < 1e-6);
}

#[test]
fn solve_milp_file() {
    let problem = tmp("milp.json");
    let out = expdom(&[
        "export",
        "--variant",
        "milp",
        "--output",
        problem.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = expdom(&["solve", problem.to_str().unwrap(), "--arith", "float"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["status"], "OPTIMAL");
    assert!(v["nodes_explored"].as_u64().unwrap() > 0);
}

#[test]
fn solve_reports_infeasible_with_code_2() {
    let problem = tmp("infeasible.json");
    std::fs::write(
        &problem,
        serde_json::json!({
            "num_vars": 1,
            "objective": ["1/2^0"],
            "matrix": [["1/2^0"]],
            "row_lower": ["-5/2^0"],
            "row_upper": ["-1/2^0"],
            "var_lower": ["0/2^0"],
            "var_upper": [null],
            "integer_marks": null,
        })
        .to_string(),
    )
    .unwrap();
    let out = expdom(&["solve", problem.to_str().unwrap(), "--arith", "exact"]);
    assert_eq!(out.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["status"], "INFEASIBLE");
}

#[test]
fn deterministic_output_for_fixed_config() {
    let a = expdom(&["bound", "--r", "9", "--arith", "float", "--json"]);
    let b = expdom(&["bound", "--r", "9", "--arith", "float", "--json"]);
    assert_eq!(a.stdout, b.stdout);
}
