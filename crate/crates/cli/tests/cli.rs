//! Contract tests for the `svc` binary: flags, outputs, exit codes and
//! report determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn svc() -> Command {
    Command::new(env!("CARGO_BIN_EXE_svc"))
}

fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .canonicalize()
        .unwrap()
}

fn instance(name: &str) -> String {
    workspace_root()
        .join("instances")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    svc().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn solve_prints_cover_and_query_count() {
    let out = run(&[
        "solve",
        "--algorithm",
        "main",
        "--eps",
        "0.05",
        "--seed",
        "7",
        &instance("single_edge.txt"),
    ]);
    assert!(out.status.success(), "{out:?}");
    let text = stdout(&out);
    assert!(text.contains("cover:"), "{text}");
    assert!(text.contains("queried:"), "{text}");
    assert!(text.contains("tau:"), "{text}");
}

#[test]
fn solve_is_deterministic_per_seed() {
    let args = [
        "solve",
        "--algorithm",
        "best-of-two",
        "--eps",
        "0.05",
        "--seed",
        "11",
        &instance("triangle.txt"),
    ];
    assert_eq!(stdout(&run(&args)), stdout(&run(&args)));
}

#[test]
fn marginals_estimate_reports_prescribed_sample_count() {
    let out = run(&[
        "marginals",
        "--mode",
        "estimate",
        "--eps",
        "0.5",
        "--delta",
        "0.1666",
        &instance("six_vertex.txt"),
    ]);
    assert!(out.status.success(), "{out:?}");
    assert!(stdout(&out).contains("samples: 77"), "{}", stdout(&out));
}

#[test]
fn marginals_exact_reports_opt() {
    let out = run(&["marginals", "--mode", "exact", &instance("six_vertex.txt")]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("provenance: exact"));
    assert!(text.contains("opt: 1.05"), "{text}");
}

#[test]
fn validate_accepts_shipped_instances() {
    for name in [
        "single_edge.txt",
        "triangle.txt",
        "six_vertex.txt",
        "rs_6cycle.txt",
    ] {
        let out = run(&["validate", &instance(name)]);
        assert!(out.status.success(), "{name}: {out:?}");
        assert!(stdout(&out).starts_with("ok:"), "{name}");
    }
}

#[test]
fn validation_failures_exit_one() {
    let dir = std::env::temp_dir().join("svc-cli-test-bad");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("zero_prob.txt");
    std::fs::write(&path, "svc-instance v1\nn 2\ne 0 1 0\n").unwrap();
    let out = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "{out:?}");
}

#[test]
fn runtime_failures_exit_two() {
    // 24 stochastic edges exceed the exact-enumeration budget.
    let dir = std::env::temp_dir().join("svc-cli-test-big");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("too_big.txt");
    let mut text = String::from("svc-instance v1\nn 30\n");
    for i in 0..24u32 {
        text.push_str(&format!("e {} {} 1/2\n", i, i + 1));
    }
    std::fs::write(&path, &text).unwrap();
    let out = run(&["marginals", "--mode", "exact", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn lowerbound_validate_and_evaluate() {
    let out = run(&["lowerbound", "validate", &instance("rs_6cycle.txt")]);
    assert!(out.status.success(), "{out:?}");
    assert!(
        stdout(&out).contains("ok: side=3 r=2 t=3"),
        "{}",
        stdout(&out)
    );

    let out = run(&[
        "lowerbound",
        "evaluate",
        "--eps2",
        "0.5",
        "--budget",
        "0",
        &instance("rs_6cycle.txt"),
    ]);
    assert!(out.status.success(), "{out:?}");
    let text = stdout(&out);
    assert!(text.contains("forced: 4"), "{text}");
    assert!(text.contains("expected_opt: 3"), "{text}");
    assert!(text.contains("ratio: 1.333333333"), "{text}");
}

#[test]
fn lowerbound_build_round_trips() {
    let dir = std::env::temp_dir().join("svc-cli-test-build");
    std::fs::create_dir_all(&dir).unwrap();
    let built = dir.join("lb.txt");
    let out = run(&[
        "lowerbound",
        "build",
        "--eps2",
        "0.5",
        "--out",
        built.to_str().unwrap(),
        &instance("rs_6cycle.txt"),
    ]);
    assert!(out.status.success(), "{out:?}");
    let out = run(&["validate", built.to_str().unwrap()]);
    assert!(out.status.success(), "{out:?}");
    assert!(stdout(&out).contains("correlated"), "{}", stdout(&out));

    // The built instance is a runnable correlated model.
    let out = run(&[
        "solve",
        "--algorithm",
        "main",
        "--seed",
        "3",
        built.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
}

#[test]
fn experiment_reports_are_deterministic_and_exact_on_single_edge() {
    let dir = std::env::temp_dir().join("svc-cli-test-exp");
    std::fs::create_dir_all(&dir).unwrap();
    let config_path = dir.join("sweep.json");
    let config = serde_json::json!({
        "instances": [instance("single_edge.txt"), instance("triangle.txt")],
        "algorithms": ["hallucinate", "threshold", "best-of-two", "main", "analysis"],
        "eps": 0.05,
        "delta": 0.1,
        "oracle": "exact",
        "marginal_mode": "exact",
        "mode": "exact",
        "trials": 64,
        "seed": 7,
        "format": "csv"
    });
    std::fs::write(&config_path, config.to_string()).unwrap();

    let args = ["experiment", "--config", config_path.to_str().unwrap()];
    let first = run(&args);
    assert!(first.status.success(), "{first:?}");
    let second = run(&args);
    assert_eq!(first.stdout, second.stdout, "reports must be bit-identical");

    let text = stdout(&first);
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert_eq!(
        header,
        "instance,algorithm,n,m,p_min,eps,trials,mean_cover,opt,opt_se,ratio,mean_queries,norm_queries"
    );
    // Exact hallucination row on the half-probability single edge:
    // ratio is exactly 1.5.
    let hallucinate = lines
        .clone()
        .find(|l| l.starts_with("single-edge,hallucinate"))
        .unwrap();
    let ratio: f64 = hallucinate.split(',').nth(10).unwrap().parse().unwrap();
    assert!((ratio - 1.5).abs() < 1e-9, "{hallucinate}");
    assert_eq!(lines.count(), 10, "one row per (instance, algorithm)");
}

#[test]
fn experiment_jsonl_mirrors_csv_fields() {
    let dir = std::env::temp_dir().join("svc-cli-test-jsonl");
    std::fs::create_dir_all(&dir).unwrap();
    let config_path = dir.join("sweep.json");
    let config = serde_json::json!({
        "instances": [instance("single_edge.txt")],
        "algorithms": ["main"],
        "oracle": "exact",
        "marginal_mode": "exact",
        "mode": "monte-carlo",
        "trials": 32,
        "seed": 1,
        "format": "jsonl"
    });
    std::fs::write(&config_path, config.to_string()).unwrap();
    let out = run(&["experiment", "--config", config_path.to_str().unwrap()]);
    assert!(out.status.success(), "{out:?}");
    let text = stdout(&out);
    let row: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    for column in svc_cli::report::REPORT_COLUMNS {
        assert!(row.get(column).is_some(), "missing {column} in {row}");
    }
}

#[test]
fn experiment_reports_ignore_worker_count() {
    let dir = std::env::temp_dir().join("svc-cli-test-workers");
    std::fs::create_dir_all(&dir).unwrap();
    let config_path = dir.join("sweep.json");
    let config = serde_json::json!({
        "instances": [instance("triangle.txt")],
        "algorithms": ["main", "best-of-two"],
        "oracle": "exact",
        "marginal_mode": "estimate",
        "marginal_samples": 200,
        "mode": "monte-carlo",
        "trials": 96,
        "seed": 13,
        "format": "csv"
    });
    std::fs::write(&config_path, config.to_string()).unwrap();

    let run_with_threads = |threads: &str| {
        let out = svc()
            .args(["experiment", "--config", config_path.to_str().unwrap()])
            .env("RAYON_NUM_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success(), "{out:?}");
        out.stdout
    };
    assert_eq!(run_with_threads("1"), run_with_threads("4"));
}
