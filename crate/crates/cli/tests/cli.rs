//! The `nlpdhg` binary end to end: gen-data, solve and bench.

use std::path::Path;
use std::process::{Command, Output};

fn nlpdhg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlpdhg")).args(args).env("NLPDHG_THREADS", "1").output().unwrap()
}

fn ok(out: Output) -> Output {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_data_then_solve_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    // λ = 1 keeps the small logistic instance non-separable
    for (kind, method, m, d, lambda) in [
        ("logreg", "nlpdhg", "20", "8", "1"),
        ("game", "omwu", "6", "7", "0.1"),
        ("lasso", "fista", "15", "10", "0.1"),
        ("game", "nlpdhg", "5", "5", "0.1"),
    ] {
        let prob = dir.path().join(format!("{kind}-{method}"));
        let args =
            ["gen-data", "--kind", kind, "--m", m, "--d", d, "--seed", "3", "--lambda", lambda, "--out", s(&prob)];
        ok(nlpdhg(&args));
        assert!(prob.join("problem.json").exists());

        let report = prob.join("report.json");
        let args = ["solve", "--problem", s(&prob), "--method", method, "--tol", "1e-6", "--report", s(&report)];
        ok(nlpdhg(&args));
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
        let obj = v.as_object().unwrap();
        let mut keys: Vec<&str> = obj.keys().map(String::as_str).collect();
        keys.sort();
        assert_eq!(
            keys,
            [
                "converged",
                "k",
                "problem_id",
                "regime",
                "residual_trace",
                "terminal_dual_norm",
                "terminal_primal_norm",
                "wall_ms"
            ]
        );
        assert_eq!(obj["converged"], true, "{kind} {method}");
        assert!(obj["k"].as_u64().unwrap() > 0);
    }

    // without --report the JSON goes to standard output
    let prob = dir.path().join("game-nlpdhg");
    let out = ok(nlpdhg(&["solve", "--problem", s(&prob.join("problem.json"))]));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v.get("residual_trace").is_some());
}

#[test]
fn bench_writes_the_results_table() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    std::fs::write(
        &spec,
        r#"{"kind":"game","m":8,"n":9,"seed":1,"solvers":["nlpdhg","pu"],"repetitions":2,"tol":1e-6}"#,
    )
    .unwrap();
    let csv = dir.path().join("out.csv");
    ok(nlpdhg(&["bench", "--spec", s(&spec), "--out", s(&csv)]));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "solver,variant,m,n,lambda,seed,iters,wall_ms,residual,converged");
    // nlpdhg gets a regular and an ergodic row per repetition
    assert_eq!(lines.count(), 2 * 3);
}

#[test]
fn bad_input_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = nlpdhg(&["gen-data", "--kind", "tensor", "--m", "2", "--d", "2", "--out", s(dir.path())]);
    assert!(!out.status.success());
    let out = nlpdhg(&["gen-data", "--kind", "game", "--m", "0", "--d", "2", "--out", s(dir.path())]);
    assert!(!out.status.success());
    let out = nlpdhg(&["solve", "--problem", s(&dir.path().join("missing"))]);
    assert!(!out.status.success());
    let prob = dir.path().join("p");
    ok(nlpdhg(&["gen-data", "--kind", "lasso", "--m", "4", "--d", "4", "--out", s(&prob)]));
    let out = nlpdhg(&["solve", "--problem", s(&prob), "--method", "pu"]);
    assert!(!out.status.success(), "pu does not apply to the Lasso");
}
