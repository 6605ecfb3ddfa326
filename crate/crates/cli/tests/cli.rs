use std::process::Command;

use ds_core::{estimate_sigma_a, SeriesSpec};
use serde_json::Value;

fn ds_with_env(args: &[&str], threads: Option<&str>) -> (i32, String, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ds"));
    cmd.args(args);
    if let Some(t) = threads {
        cmd.env("DS_THREADS", t);
    }
    let out = cmd.output().expect("spawn ds");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn ds(args: &[&str]) -> (i32, String, String) {
    ds_with_env(args, None)
}

fn ok_json(args: &[&str]) -> Value {
    let (code, stdout, stderr) = ds(args);
    assert_eq!(code, 0, "ds {args:?} failed: {stderr}");
    serde_json::from_str(&stdout).expect("stdout is JSON")
}

#[test]
fn eval_zeta_at_two() {
    let v = ok_json(&["eval", "--series", "zeta", "--s", "2", "--limit", "1000"]);
    let re = v["value"]["re"].as_f64().unwrap();
    assert!((re - 1.643_934_566_681_559_7).abs() < 1e-12, "{re}");
    assert!(v["tail_bound"].as_f64().is_some());
}

#[test]
fn eval_accepts_complex_point() {
    let v = ok_json(&["eval", "--series", "zeta", "--s", "2,-1.5", "--limit", "1000"]);
    assert_eq!(v["s"]["im"].as_f64(), Some(-1.5));
}

#[test]
fn rho_of_zeta_minus_one() {
    let v = ok_json(&["rho", "--series", "recip:alpha=1,base=zeta-minus-one", "--alpha", "1", "--tol", "1e-8"]);
    let rho = v["rho"].as_f64().unwrap();
    assert!((rho - 1.728_647_238_998_183_6).abs() < 1e-8, "{rho}");
}

#[test]
fn rhom_and_smooth_rho() {
    let v = ok_json(&["rhom", "--m", "2", "--tol", "1e-10"]);
    assert!((v["result"]["rho"].as_f64().unwrap() - 2.335_206_780_243_765_6).abs() < 1e-8);
    let v = ok_json(&["rho", "--series", "zeta-minus-one", "--alpha", "1", "--tol", "1e-8", "--smooth-index", "1"]);
    assert!((v["smooth"]["result"]["rho"].as_f64().unwrap() - 1.0).abs() <= 1e-8);
}

#[test]
fn primes_and_smooth() {
    let v = ok_json(&["primes", "--count", "5"]);
    assert_eq!(v["primes"], serde_json::json!([2, 3, 5, 7, 11]));
    let v = ok_json(&["smooth", "--index", "2", "--limit", "20"]);
    assert_eq!(v["numbers"], serde_json::json!([1, 2, 3, 4, 6, 8, 9, 12, 16, 18]));
}

#[test]
fn json_round_trips_bit_identically() {
    let (_, stdout, _) = ds(&["abscissa", "--series", "cii:r=1.5", "--limit", "100000"]);
    let v: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", stdout);
    let spec: SeriesSpec = "cii:r=1.5".parse().unwrap();
    let direct = estimate_sigma_a(&spec.materialize(100_000).unwrap(), 100_000, 8).unwrap();
    let parsed: ds_core::AbscissaReport = serde_json::from_value(v["report"].clone()).unwrap();
    assert_eq!(parsed.estimate.to_bits(), direct.estimate.to_bits());
    for (a, b) in parsed.checkpoint_slopes.iter().zip(&direct.checkpoint_slopes) {
        assert_eq!(a.0, b.0);
        assert_eq!(a.1.to_bits(), b.1.to_bits());
    }
}

#[test]
fn csv_and_json_carry_the_same_numbers() {
    for series in ["ci:r=0.5", "kalmar:m=2", "recip:alpha=1.5,base=g:r=1"] {
        let v = ok_json(&["coeffs", "--series", series, "--limit", "300"]);
        let (code, csv, _) = ds(&["coeffs", "--series", series, "--limit", "300", "--format", "csv"]);
        assert_eq!(code, 0);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("n,value"));
        let json_values = v["values"].as_array().unwrap();
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), json_values.len());
        for (i, (row, jv)) in rows.iter().zip(json_values).enumerate() {
            let (n, value) = row.split_once(',').unwrap();
            assert_eq!(n.parse::<usize>().unwrap(), i + 1);
            let x: f64 = value.parse().unwrap();
            assert_eq!(x.to_bits(), jv.as_f64().unwrap().to_bits(), "{series} n={n}");
        }
    }
}

#[test]
fn output_is_identical_across_runs_and_thread_counts() {
    let args = ["delta", "--series", "cii:r=2", "--max-index", "4", "--limit", "1000000000000"];
    let one = ds_with_env(&args, Some("1"));
    let four = ds_with_env(&args, Some("4"));
    let again = ds_with_env(&args, Some("4"));
    assert_eq!(one.0, 0);
    assert_eq!(one.1, four.1);
    assert_eq!(four.1, again.1);
    let gram_points = std::env::temp_dir().join("ds_cli_points.json");
    std::fs::write(&gram_points, r#"[{"re":1.0,"im":0.0},{"re":1.5,"im":3.0},{"re":0.9,"im":-7.0}]"#).unwrap();
    let path = gram_points.to_str().unwrap();
    let args = ["kernel", "gram", "--series", "zeta", "--points", path, "--limit", "20000"];
    assert_eq!(ds_with_env(&args, Some("1")).1, ds_with_env(&args, Some("3")).1);
}

#[test]
fn kernel_commands() {
    let points = std::env::temp_dir().join("ds_cli_kernel_points.json");
    std::fs::write(&points, r#"[{"re":2.0,"im":0.0},{"re":2.0,"im":0.0}]"#).unwrap();
    let v = ok_json(&["kernel", "gram", "--series", "zeta", "--points", points.to_str().unwrap(), "--limit", "10000"]);
    assert_eq!(v["gram"]["psd"], Value::Bool(true));
    assert_eq!(v["halfplanes"]["common_domain_edge"].as_f64(), Some(0.5));
    let v = ok_json(&["kernel", "member", "--series", "zeta", "--b", "power:t=-1", "--limit", "1000000"]);
    let ratio = v["ratio"].as_f64().unwrap();
    assert!((1.6449..=1.6450).contains(&ratio), "{ratio}");
}

fn error_line(stderr: &str) -> Value {
    let line = stderr.lines().last().expect("stderr line");
    serde_json::from_str(line).expect("single-line JSON error")
}

#[test]
fn parse_errors_exit_two() {
    let (code, stdout, stderr) = ds(&["coeffs", "--series", "zeta(", "--limit", "5"]);
    assert_eq!(code, 2);
    assert!(stdout.is_empty());
    assert_eq!(error_line(&stderr)["code"], "parse");
    let (code, _, stderr) = ds(&["frobnicate"]);
    assert_eq!(code, 2);
    assert!(error_line(&stderr)["message"].is_string());
}

#[test]
fn domain_errors_exit_one() {
    let (code, _, stderr) = ds(&["rhom", "--m", "1", "--tol", "0"]);
    assert_eq!(code, 1);
    assert_eq!(error_line(&stderr)["code"], "invalid-argument");
    let (code, _, stderr) = ds(&["smooth", "--index", "0", "--limit", "10"]);
    assert_eq!(code, 1);
    assert_eq!(error_line(&stderr)["code"], "invalid-argument");
    let (code, _, stderr) = ds(&["coeffs", "--series", "kalmar:m=1", "--limit", "5", "--format", "csv"]);
    assert_eq!(code, 0, "{stderr}");
}
