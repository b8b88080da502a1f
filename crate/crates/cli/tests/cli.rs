//! End-to-end checks of the folcalc binary: subcommand output, JSON wire
//! format, exit codes, and the corpus run inside its time budget.

use std::process::Command;
use std::time::{Duration, Instant};

fn folcalc(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_folcalc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &std::process::Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn classify_json_output() {
    let out = folcalc(&["-p", "3", "--json", "classify", "x*dx + y*dy"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["op"], "classify");
    assert_eq!(v["status"], "p_closed");
    assert_eq!(v["multiplier"]["num"], "1");
}

#[test]
fn discrepancy_wire_format() {
    let out = folcalc(&[
        "-p", "2", "--json", "discrepancy", "x*dx + y*dy", "--center", "x,y", "--chart", "x",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["a_F"], -1);
    assert_eq!(v["epsilon"], 1);
    assert_eq!(v["content"], "x (mod 2)");
    assert!(v["pullback"].as_str().unwrap().contains("dx"));
}

#[test]
fn weighted_chart_flag() {
    let out = folcalc(&[
        "-p", "3", "--vars", "x1,x2,x3", "--json", "discrepancy", "dx1",
        "--center", "x1", "--chart", "x1", "--weight", "x3=3",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["a_F"], 0);
}

#[test]
fn exit_codes() {
    // 0: success
    let out = folcalc(&["-p", "5", "classify", "x*dx"]);
    assert_eq!(out.status.code(), Some(0));
    // 1: negative verdict under --strict
    let out = folcalc(&["-p", "2", "--strict", "lc-check", "x^2*dx + y^2*dy"]);
    assert_eq!(out.status.code(), Some(1));
    // without --strict the same verdict exits 0
    let out = folcalc(&["-p", "2", "lc-check", "x^2*dx + y^2*dy"]);
    assert_eq!(out.status.code(), Some(0));
    // 2: parse error
    let out = folcalc(&["-p", "5", "classify", "x +"]);
    assert_eq!(out.status.code(), Some(2));
    // 2: usage error (missing -p)
    let out = folcalc(&["classify", "x*dx"]);
    assert_eq!(out.status.code(), Some(2));
    // 3: internal limit via the degree-cap override
    let out = Command::new(env!("CARGO_BIN_EXE_folcalc"))
        .env("FOLCALC_DEGREE_CAP", "3")
        .args(["-p", "5", "classify", "x^3*dx"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn schema_prints_json() {
    let out = folcalc(&["--schema"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["title"], "folcalc report line");
}

#[test]
fn corpus_filter_and_json() {
    let out = folcalc(&["--json", "corpus", "--filter", "parse"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines.len() >= 3);
    for line in &lines[..lines.len() - 1] {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["passed"], true);
    }
    let summary: serde_json::Value = serde_json::from_str(lines.last().unwrap()).unwrap();
    assert_eq!(summary["op"], "corpus-summary");
    assert_eq!(summary["passed"], true);
}

fn assert_exact_numbers(v: &serde_json::Value) {
    match v {
        serde_json::Value::Number(n) => {
            assert!(n.is_i64() || n.is_u64(), "float leaked into report: {n}");
        }
        serde_json::Value::Array(items) => items.iter().for_each(assert_exact_numbers),
        serde_json::Value::Object(map) => map.values().for_each(assert_exact_numbers),
        _ => {}
    }
}

#[test]
fn reports_conform_to_schema() {
    let ops = [
        (
            vec!["-p", "3", "--json", "classify", "x*dx + 2*y*dy"],
            "classify",
        ),
        (vec!["-p", "2", "--json", "constants", "x*dx + y*dy"], "constants"),
        (
            vec![
                "-p", "2", "--json", "blowup", "x*dx + y*dy", "--center", "x,y", "--chart",
                "x",
            ],
            "blowup",
        ),
        (
            vec![
                "-p", "2", "--json", "discrepancy", "x^2*dx + y^2*dy", "--center", "x,y",
                "--chart", "x",
            ],
            "discrepancy",
        ),
        (
            vec!["-p", "2", "--json", "lc-check", "x^2*dx + y^2*dy"],
            "lc-check",
        ),
        (
            vec!["-p", "2", "--json", "nonlc-cert", "x^2*dx + y^2*dy"],
            "nonlc-cert",
        ),
        (vec!["-p", "3", "--json", "fedder", "x"], "fedder"),
        (vec!["-p", "5", "--json", "ann", "x*y", "--classify"], "ann"),
        (
            vec![
                "--json",
                "quotient-class",
                "--x-class",
                "klt",
                "--f-class",
                "lc",
            ],
            "quotient-class",
        ),
        (
            vec![
                "-p", "2", "--vars", "x,y,z,t", "--json", "family-fiber",
                "x^2*dx + y^2*dy + t*dz", "--base", "t",
            ],
            "family-fiber",
        ),
    ];
    let allowed = [
        "classify", "constants", "blowup", "discrepancy", "sequence-end", "lc-check",
        "nonlc-cert", "fedder", "ann", "quotient-class", "family-fiber", "corpus-summary",
    ];
    for (args, expected_op) in ops {
        let out = folcalc(&args);
        assert!(
            out.status.code() == Some(0),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        for line in stdout(&out).lines() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            let op = v["op"].as_str().unwrap();
            assert!(allowed.contains(&op), "unknown op {op}");
            assert_exact_numbers(&v);
        }
        let first: serde_json::Value =
            serde_json::from_str(stdout(&out).lines().next().unwrap()).unwrap();
        assert_eq!(first["op"], expected_op, "{args:?}");
    }
}

#[test]
fn corpus_full_run_within_budget() {
    let start = Instant::now();
    let out = folcalc(&["corpus"]);
    let elapsed = start.elapsed();
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(
        elapsed <= Duration::from_secs(60),
        "corpus run took {elapsed:?}"
    );
    println!(
        "acceptance criterion 12 (corpus subcommand): PASS [{} ms]",
        elapsed.as_millis()
    );
}
