//! End-to-end checks of the binary: exit codes, the error envelope, report
//! shapes, and byte determinism of repeated runs.

use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn obayes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_obayes"))
        .args(args)
        .output()
        .expect("failed to spawn obayes")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

/// Runs expecting success; returns the parsed stdout payload.
fn ok_json(args: &[&str]) -> Value {
    let out = obayes(args);
    assert!(
        out.status.success(),
        "expected success for {args:?}, got {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(out.stderr.is_empty(), "stderr not empty on success");
    serde_json::from_str(&stdout_str(&out)).expect("stdout is JSON")
}

/// Runs expecting failure; returns (exit code, parsed stderr envelope).
fn err_json(args: &[&str]) -> (i32, Value) {
    let out = obayes(args);
    assert!(!out.status.success(), "expected failure for {args:?}");
    assert!(out.stdout.is_empty(), "stdout not empty on failure");
    let v = serde_json::from_slice(&out.stderr).expect("stderr is a JSON envelope");
    (out.status.code().unwrap(), v)
}

fn temp_csv(tag: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!(
        "obayes_cli_{}_{tag}.csv",
        std::process::id()
    ));
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn missing_required_flag_is_a_usage_error() {
    // clap reports usage errors on code 2 before run() is reached
    let out = obayes(&["prior", "--grid", "1,2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_family_reports_config_and_exits_2() {
    let (code, v) = err_json(&["prior", "--family", "weibull", "--grid", "1"]);
    assert_eq!(code, 2);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["error"]["kind"], "config");
    assert!(v["error"]["message"].as_str().unwrap().contains("weibull"));
}

#[test]
fn conflicting_data_sources_exit_2() {
    let csv = temp_csv("conflict", "1\n2\n");
    let (code, v) = err_json(&[
        "test-intrinsic",
        "--family",
        "poisson",
        "--data",
        csv.to_str().unwrap(),
        "--n",
        "2",
        "--mean",
        "1.5",
        "--null",
        "1",
    ]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "config");
}

#[test]
fn improper_posterior_is_numerical_and_exits_3() {
    // all-zero Poisson counts under the scale-invariant prior
    let csv = temp_csv("zeros", "0\n0\n0\n");
    let (code, v) = err_json(&[
        "test-intrinsic",
        "--family",
        "poisson",
        "--data",
        csv.to_str().unwrap(),
        "--null",
        "1.0",
        "--prior",
        "scale_invariant",
    ]);
    assert_eq!(code, 3);
    assert_eq!(v["error"]["kind"], "numerical");
}

#[test]
fn improper_spread_is_config_and_exits_2() {
    // a uniform spread over the whole real line cannot be normalized
    let (code, v) = err_json(&[
        "test-mixed",
        "--family",
        "normal_known_sigma",
        "--sigma",
        "1",
        "--n",
        "4",
        "--mean",
        "0.5",
        "--null",
        "0",
        "--spread",
        "uniform",
    ]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "config");
}

#[test]
fn lindley_emits_csv_only() {
    let (code, v) = err_json(&[
        "lindley",
        "--family",
        "normal_known_sigma",
        "--sigma",
        "1",
        "--z",
        "2",
        "--n-list",
        "1,10",
        "--out",
        "json",
    ]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "config");
}

#[test]
fn csv_with_header_and_crlf_matches_inline_stats() {
    let csv = temp_csv("crlf", "value\r\n1.0\r\n2.0\r\n");
    let from_file = obayes(&[
        "test-intrinsic",
        "--family",
        "normal_known_sigma",
        "--sigma",
        "1",
        "--data",
        csv.to_str().unwrap(),
        "--null",
        "0",
    ]);
    let from_stats = obayes(&[
        "test-intrinsic",
        "--family",
        "normal_known_sigma",
        "--sigma",
        "1",
        "--n",
        "2",
        "--mean",
        "1.5",
        "--null",
        "0",
    ]);
    assert!(from_file.status.success());
    assert_eq!(stdout_str(&from_file), stdout_str(&from_stats));
}

#[test]
fn prior_report_is_anchored_at_the_first_grid_point() {
    let v = ok_json(&["prior", "--family", "poisson", "--grid", "1,2,4"]);
    assert_eq!(v["command"], "prior");
    assert_eq!(v["family"], "poisson");
    assert_eq!(v["label"], "jeffreys");
    assert_eq!(v["log_density"][0], 0.0);
    // 1/sqrt(lambda): each doubling of lambda drops the log by ln(2)/2
    let d1 = v["log_density"][1].as_f64().unwrap();
    let d2 = v["log_density"][2].as_f64().unwrap();
    assert!((d1 + 0.5 * 2f64.ln()).abs() < 1e-9, "d1 = {d1}");
    assert!((d2 + 0.5 * 4f64.ln()).abs() < 1e-9, "d2 = {d2}");
    // Fisher information 1/lambda
    assert_eq!(v["fisher"][0], 1.0);
    assert_eq!(v["fisher"][2], 0.25);
}

#[test]
fn intrinsic_report_carries_decision_and_method() {
    let v = ok_json(&[
        "test-intrinsic",
        "--family",
        "normal_known_sigma",
        "--sigma",
        "2",
        "--n",
        "4",
        "--mean",
        "1",
        "--null",
        "0",
    ]);
    assert_eq!(v["command"], "test-intrinsic");
    assert_eq!(v["n"], 4);
    assert_eq!(v["method"], "closed_form");
    assert_eq!(v["decision"], "accept");
    // z = 1 / (2/2) = 1, d = (1 + z^2) / 2
    assert_eq!(v["d"], 1.0);
    assert_eq!(v["z"], 1.0);
}

#[test]
fn lindley_reports_the_pinned_header_and_monotone_null_probability() {
    let out = obayes(&[
        "lindley",
        "--family",
        "normal_known_sigma",
        "--sigma",
        "1",
        "--z",
        "2",
        "--n-list",
        "10,1000,100000",
    ]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,bayes_factor_01,posterior_null_prob,intrinsic_d,z_fixed"
    );
    let rows: Vec<Vec<String>> = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0][0], "10");
    assert_eq!(rows[2][0], "100000");
    for r in &rows {
        assert_eq!(r.len(), 5);
        assert_eq!(r[4], "2");
        // the intrinsic statistic ignores n at fixed z
        assert_eq!(r[3], "2.5");
    }
    let pnp: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(pnp[0] < pnp[1] && pnp[1] < pnp[2], "pnp = {pnp:?}");
}

#[test]
fn normal_prior_grid_is_constant() {
    let v = ok_json(&[
        "prior",
        "--family",
        "normal_known_sigma",
        "--sigma",
        "1",
        "--grid",
        "-1,0,1",
    ]);
    for i in 0..3 {
        assert_eq!(v["log_density"][i], 0.0);
        assert_eq!(v["fisher"][i], 1.0);
    }
}

#[test]
fn poisson_coverage_matches_nominal_within_mc_error() {
    // 90% intervals at true lambda = 3, n = 20; first-order matching keeps
    // empirical coverage close to nominal
    let v = ok_json(&[
        "coverage",
        "--family",
        "poisson",
        "--true-param",
        "3",
        "--n",
        "20",
        "--reps",
        "2000",
        "--mass",
        "0.9",
        "--seed",
        "99",
    ]);
    let c = v["coverage"].as_f64().unwrap();
    assert!((c - 0.90).abs() < 0.03, "coverage = {c}");
}

#[test]
fn coverage_with_one_replicate_is_zero_or_one() {
    let v = ok_json(&[
        "coverage",
        "--family",
        "poisson",
        "--true-param",
        "3",
        "--n",
        "20",
        "--reps",
        "1",
        "--seed",
        "11",
    ]);
    assert_eq!(v["reps"], 1);
    let c = v["coverage"].as_f64().unwrap();
    assert!(c == 0.0 || c == 1.0, "coverage = {c}");
    assert_eq!(v["contained"].as_u64().unwrap() as f64, c);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let cases: Vec<Vec<&str>> = vec![
        vec!["prior", "--family", "bernoulli", "--grid", "0.1,0.5,0.9"],
        vec![
            "test-intrinsic",
            "--family",
            "poisson",
            "--n",
            "4",
            "--sum",
            "4",
            "--null",
            "1",
        ],
        vec![
            "test-mixed",
            "--family",
            "bernoulli",
            "--n",
            "4",
            "--sum",
            "3",
            "--null",
            "0.5",
            "--spread",
            "uniform",
        ],
        vec![
            "lindley",
            "--family",
            "normal_known_sigma",
            "--sigma",
            "1",
            "--z",
            "2",
            "--n-list",
            "1,100,10000",
        ],
        vec![
            "coverage",
            "--family",
            "normal_known_sigma",
            "--sigma",
            "1",
            "--true-param",
            "0",
            "--n",
            "5",
            "--reps",
            "40",
            "--seed",
            "7",
        ],
    ];
    for args in &cases {
        let first = obayes(args);
        let second = obayes(args);
        assert!(first.status.success(), "args: {args:?}");
        assert_eq!(
            stdout_str(&first),
            stdout_str(&second),
            "non-deterministic output for {args:?}"
        );
    }
}
