//! End-to-end runs of the `baskakov` binary: outputs, formats and exit codes.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_baskakov"))
        .args(args)
        .env("BASKAKOV_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .take_while(|l| !l.is_empty())
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn moments_exact_output() {
    let out = run(&["moments", "--n", "3", "--K", "2"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "0: 1\n1: z\n2: 4/3 z^2 + 2/3 z\n");
}

#[test]
fn moments_json_parses() {
    let out = run(&["moments", "--n", "5", "--K", "4", "--format", "json"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["n"], 5);
}

#[test]
fn converge_quadratic_halves_each_doubling() {
    let out = run(&["converge", "--fn", "poly:0,0,1", "--n", "8,16,32"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("n,sup_error,n_error,resid,n2_resid,bound_thm1,bound_thm2,K\n"));
    let rows = csv_rows(&text);
    let errs: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(errs, vec![0.375, 0.1875, 0.09375]);
    assert!(text.contains("# slope: -1.0000000000000"));
    assert!(text.contains("# verdict: PASS"));
}

#[test]
fn converge_linear_reports_exact_reproduction() {
    let out = run(&["converge", "--fn", "poly:0,1", "--n", "8,16,32"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("exact reproduction"));
}

#[test]
fn voronovskaja_cubic_gives_fourteen() {
    let out = run(&["voronovskaja", "--fn", "poly:0,0,0,1", "--n", "8,16,32"]);
    assert_eq!(out.status.code(), Some(0));
    for row in csv_rows(&stdout(&out)) {
        let scaled: f64 = row[4].parse().unwrap();
        assert!((scaled - 14.0).abs() < 1e-12, "{row:?}");
    }
}

#[test]
fn hypothesis_violations_exit_two() {
    let out = run(&["voronovskaja", "--fn", "exp:a=1/2", "--n", "8,16"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("A(r+1) < 1"));

    let out = run(&["converge", "--fn", "exp:a=1/2", "--r", "2.4", "--n", "8,16"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("rA < 1"));

    let out = run(&["converge", "--fn", "nonsense", "--n", "8"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["converge", "--fn", "exp:a=1/2", "--n", "8:2:x2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn derivative_of_quadratic() {
    let out = run(&["derivative", "--fn", "poly:0,0,1", "--p", "1", "--n", "8,16,32"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&stdout(&out));
    let first: f64 = rows[0][1].parse().unwrap();
    assert_eq!(first, 0.5);
    assert!(stdout(&out).contains("# verdict: PASS"));
}

#[test]
fn verify_suites_pass() {
    let out = run(&["verify", "--suite", "tail-inequality", "--failures-only"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 1);

    let out = run(&["verify", "--suite", "remainder", "--n", "3:6", "--k", "2:8"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).lines().last().unwrap().starts_with("PASS remainder"));

    // ρ >= 1 is outside the inequality's range.
    let out = run(&["verify", "--suite", "tail-inequality", "--rho", "1.5", "--n", "1:4"]);
    assert_eq!(out.status.code(), Some(2), "{}", stdout(&out));
}

#[test]
fn config_file_and_json_echo() {
    let dir = std::env::temp_dir().join(format!("baskakov-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.toml");
    std::fs::write(&cfg, "fn = \"exp:a=1/4\"\nn = \"8,16,32\"\nformat = \"json\"\n").unwrap();
    let out = run(&["converge", "--config", cfg.to_str().unwrap(), "--r", "1.5"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["config"]["fn"], "exp:a=1/4");
    assert_eq!(doc["config"]["r"], 1.5);
    assert_eq!(doc["rows"].as_array().unwrap().len(), 3);
    assert_eq!(doc["summary"]["verdict"], "PASS");

    std::fs::write(&cfg, "fn = \"exp:a=1/4\"\nbogus = 1\n").unwrap();
    let out = run(&["converge", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let table = dir.join("table.csv");
    let out = run(&[
        "converge",
        "--fn",
        "poly:0,0,1",
        "--n",
        "8,16",
        "--out",
        table.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(std::fs::read_to_string(&table).unwrap().starts_with("n,sup_error"));
    assert!(stdout(&out).starts_with("# "));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn plot_format_has_named_blocks() {
    let out = run(&["converge", "--fn", "poly:0,0,1", "--n", "8,16", "--format", "plot"]);
    let text = stdout(&out);
    assert!(text.starts_with("# sup_error\n8 3.7500000000000000e-1\n16 1.8750000000000000e-1\n\n# n_error\n"));
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_baskakov"))
        .args(["moments", "--n", "3", "--K", "1"])
        .env("BASKAKOV_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
