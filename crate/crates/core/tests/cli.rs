//! Runs the `semicong` binary end to end.

use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semicong")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = run(&full);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout));
    });
    (out.status.code().unwrap(), v)
}

#[test]
fn minmax_four_is_not_c_principal() {
    let (code, v) = json(&["semiring", "c-principal", "minmax:4"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["principal"], false);
    assert_eq!(v["inputs_digest"].as_str().unwrap().len(), 64);
    let out = run(&["semiring", "c-principal", "minmax:4"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("{0,1}{2,3}"));
}

#[test]
fn semiring_subcommands_accept_catalog_names_and_files() {
    for cmd in ["validate", "enumerate", "c-principal", "bg-check"] {
        let out = run(&["semiring", cmd, "zmod:4"]);
        assert_eq!(out.status.code(), Some(0), "{cmd}");
    }
    let dir = std::env::temp_dir().join(format!("semicong-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bool.json");
    let tables = semicong::semiring::make_boolean().to_json();
    std::fs::write(&path, tables).unwrap();
    let (code, v) = json(&["semiring", "bg-check", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["is_ring"], false);
    let (code, _) = json(&["semiring", "validate", "no-such-semiring"]);
    assert_eq!(code, 2);
}

#[test]
fn plane_cover_matches_the_worked_example() {
    let (code, v) = json(&["flat", "cover", "--field", "x^2-2@1", "--gamma", "1;w", "--target", "-1,1"]);
    assert_eq!(code, 0);
    let cover = &v["result"]["cover"];
    assert_eq!(cover["chain"]["steps"].as_array().unwrap().len(), 1);
    assert_eq!(cover["certificates"][0]["coefficients"], serde_json::json!([0, 1]));
    assert_eq!(v["verification"]["chain"], true);
}

#[test]
fn cover_reports_round_trip_through_verify() {
    let out = run(&["--json", "flat", "cover", "--field", "x^3-2@0", "--gamma", "1;w;w^2", "--target", "2,-1,0;1,1,-1"]);
    assert_eq!(out.status.code(), Some(0));
    let dir = std::env::temp_dir().join(format!("semicong-verify-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let good = dir.join("good.json");
    std::fs::write(&good, &out.stdout).unwrap();
    let (code, v) = json(&["flat", "verify", good.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["passed"], true);

    let mut report: Value = serde_json::from_slice(&out.stdout).unwrap();
    report["result"]["cover"]["certificates"][1]["coefficients"][0] = Value::from(7);
    let bad = dir.join("bad.json");
    std::fs::write(&bad, report.to_string()).unwrap();
    let (code, v) = json(&["flat", "verify", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(v["result"]["passed"], false);
}

#[test]
fn cover_from_a_problem_file() {
    let dir = std::env::temp_dir().join(format!("semicong-problem-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("problem.json");
    std::fs::write(&path, r#"{"field": "x^2-3@1", "gamma": ["1", "w"], "start": ["1,0", "0,1"], "targets": ["-1,1", "2,-1"]}"#)
        .unwrap();
    let (code, v) = json(&["flat", "cover", "--problem", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["cover"]["certificates"].as_array().unwrap().len(), 2);
}

#[test]
fn exit_codes_for_bad_input_and_budget() {
    assert_eq!(run(&["flat", "cover", "--field", "x^2-2@1", "--gamma", "1;w", "--target", "1,x"]).status.code(), Some(2));
    assert_eq!(run(&["flat", "cover", "--field", "x^2-2@1", "--gamma", "1;w", "--target", "-1,-1"]).status.code(), Some(2));
    let budget = run(&["--budget", "3", "flat", "cover", "--field", "x^2-2@1", "--gamma", "1;w", "--target", "-100,71"]);
    assert_eq!(budget.status.code(), Some(3));
    assert_eq!(run(&["order", "quotient", "--field", "x^2-2@7", "--ideal", "w"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn order_quotient_has_three_elements() {
    let (code, v) = json(&["order", "quotient", "--field", "x^2-2@1", "--ideal", "w", "--j", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["size"], 3);
    assert_eq!(v["verification"]["axioms_hold"], true);
}

#[test]
fn order_commands() {
    let (code, v) = json(&["order", "classify", "--field", "x^2-2@1", "--pairs", "2~2+w"]);
    assert_eq!(code, 0);
    assert_eq!(v["verification"]["sound"], true);
    let (code, v) = json(&["order", "related", "--field", "x^2-2@1", "--ideal", "2", "--j", "0", "--x", "1+w", "--y", "3+w"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["related"], true);
    let (code, v) = json(&["order", "integer-relation", "--field", "x^3-2@0", "--a", "1", "--u", "w"]);
    assert_eq!(code, 0);
    assert_eq!(v["verification"]["identity_holds"], true);
    let (code, _) = json(&["order", "k-ideal", "--field", "x^2-2@1", "--ideal", "w", "--contains", "w;2;1"]);
    assert_eq!(code, 0);
}

#[test]
fn nat_and_bx() {
    let (code, v) = json(&["nat", "classify", "--pairs", "2~5;3~9"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["congruence"]["Tail"]["n"], 2);
    assert_eq!(v["result"]["congruence"]["Tail"]["k"], 3);
    let (code, v) = json(&["--degree-bound", "8", "bx", "check", "--n", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["related"], false);
}

#[test]
fn acceptance_suite_from_the_cli() {
    let out = run(&["acceptance", "lattice", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 3);
}

#[test]
fn order_problem_file_with_flag_override() {
    let dir = std::env::temp_dir().join(format!("semicong-order-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("order.json");
    std::fs::write(&path, r#"{"field": "x^2-2@1", "ideal": ["w"], "j": 1}"#).unwrap();
    let p = path.to_str().unwrap();
    let (code, v) = json(&["order", "quotient", "--problem", p]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["size"], 3);
    let (code, v) = json(&["order", "quotient", "--problem", p, "--j", "0"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["size"], 2);
    std::fs::write(&path, r#"{"field": "x^2-2@1", "idea": "w"}"#).unwrap();
    assert_eq!(run(&["order", "quotient", "--problem", p]).status.code(), Some(2));
}

#[test]
fn reports_are_deterministic_apart_from_timing() {
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("elapsed_ms");
        v.to_string()
    };
    for args in [
        &["--seed", "5", "flat", "search", "--field", "x^3-2@0", "--gamma", "1;w;w^2", "--samples", "40"][..],
        &["order", "classify", "--field", "x^3-2@0", "--pairs", "1~1+w;2~2+w^2"],
        &["semiring", "enumerate", "truncnat:2:3"],
    ] {
        let (c1, a) = json(args);
        let (c2, b) = json(args);
        assert_eq!((c1, c2), (0, 0));
        assert_eq!(strip(a), strip(b));
    }
}
