use std::path::PathBuf;
use std::process::{Command, Output};

fn uentropy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uentropy"))
        .args(args)
        .env_remove("UENTROPY_TOL")
        .output()
        .expect("spawn uentropy")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("uentropy-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn compute_examples() {
    let o = uentropy(&["compute", "--p", "0.5,0.5", "--u", "log", "--q", "h"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("log h 0.693147"), "{}", stdout(&o));

    let o = uentropy(&["compute", "--p", "0.8,0.2", "--u", "iso:0.5", "--q", "h"]);
    assert!(stdout(&o).starts_with("iso:0.5 h 0.385662"));

    let o = uentropy(&["compute", "--p", "0.5,0.5", "--pq", "1,0", "--u", "log", "--q", "H"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("log H inf"));
}

#[test]
fn one_row_per_utility_and_quantity() {
    let o = uentropy(&[
        "compute", "--p", "0.6,0.3,0.1", "--pq", "0.2,0.3,0.5", "--u", "log", "--u", "iso:-1",
        "--q", "h", "--q", "N", "--q", "fhs_H", "--alloc",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 6);
    assert!(lines[0].starts_with("log h ") && lines[0].contains("alloc=["));
    assert!(lines[4].starts_with("iso:-1 N "));
}

#[test]
fn domain_errors_exit_3() {
    let o = uentropy(&["compute", "--p", "0.5,0.5", "--pq", "1,0", "--u", "log", "--q", "fhs_D"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("p << q"), "{}", stderr(&o));

    let o = uentropy(&["compute", "--p", "0.5,0.6", "--u", "log", "--q", "h"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("renormalize"));

    let o = uentropy(&["compute", "--p", "0.5,0.5", "--u", "iso:2", "--q", "h"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn renormalize_flag_rescales() {
    let o = uentropy(&["compute", "--p", "1,1", "--renormalize", "--u", "log", "--q", "h"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("log h 0.693147"));
}

#[test]
fn parse_errors_exit_2_with_position() {
    let o = uentropy(&["compute", "--p", "0.5,x", "--u", "log", "--q", "h"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 1, column 5"), "{}", stderr(&o));

    let o = uentropy(&["compute", "--p", "0.5,0.5", "--u", "affine:2:log", "--q", "h"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("column"));

    let bad = scratch("bad.json", "{\"p\": [0.5,\n 0.5,]}");
    let o = uentropy(&["compute", "--input", bad.to_str().unwrap(), "--u", "log", "--q", "h"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    let o = uentropy(&["compute", "--p", "0.5,0.5", "--u", "log", "--q", "entropy"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn csv_input_one_vector_per_line() {
    let path = scratch("pq.csv", "0.8,0.2\n0.5,0.5\n");
    let o = uentropy(&["compute", "--input", path.to_str().unwrap(), "--u", "iso:0.5", "--q", "fhs_D"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("iso:0.5 fhs_D 0.332381"));
}

#[test]
fn csv_output_full_precision() {
    let o = uentropy(&["compute", "--p", "0.5,0.5", "--u", "log", "--q", "h", "--format", "csv"]);
    let out = stdout(&o);
    let row = out.lines().nth(1).unwrap();
    let value: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
    assert_eq!(value, std::f64::consts::LN_2);
}

#[test]
fn json_round_trip_is_exact() {
    let args = ["--u", "iso:-2", "--u", "log", "--q", "H", "--q", "h", "--q", "frittelli", "--format", "json"];
    let mut first_args = vec!["compute", "--p", "0.1,0.2,0.7", "--pq", "0.3,0.3,0.4"];
    first_args.extend(args);
    let first = uentropy(&first_args);
    assert_eq!(first.status.code(), Some(0));
    let path = scratch("report.json", &stdout(&first));
    let mut second_args = vec!["compute", "--input", path.to_str().unwrap()];
    second_args.extend(args);
    let second = uentropy(&second_args);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn verify_passes_and_is_deterministic() {
    let a = uentropy(&["verify", "--seed", "42", "--trials", "100"]);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    let b = uentropy(&["verify", "--seed", "42", "--trials", "100"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("primal_dual"));
}

#[test]
fn verify_zero_tolerance_reports_counterexamples() {
    let o = Command::new(env!("CARGO_BIN_EXE_uentropy"))
        .args(["verify", "--seed", "42", "--trials", "1"])
        .env("UENTROPY_TOL", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("counterexample identity="));
    assert!(out.contains("p=["));
}

#[test]
fn verify_zero_trials_is_usage_error() {
    assert_eq!(uentropy(&["verify", "--trials", "0"]).status.code(), Some(2));
}

#[test]
fn oracle_command() {
    let o = uentropy(&["oracle", "--p", "0.5,0.5", "--u", "log", "--resolution", "10000"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("gap"));

    let o = uentropy(&["oracle", "--p", "1,0", "--u", "iso:0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let o = uentropy(&["oracle", "--p", "0.2,0.2,0.2,0.2,0.2"]);
    assert_eq!(o.status.code(), Some(3));
}
