use std::path::Path;
use std::process::{Command, Output};

fn ifp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ifp"))
        .args(args)
        .output()
        .expect("ifp runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn value(out: &str, key: &str) -> f64 {
    out.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in {out}"))
        .parse()
        .unwrap()
}

const R0: [&str; 8] = ["--rho", "0.08", "--gamma", "0.5", "--y", "3", "--r", "0"];

fn with(base: &[&'static str], extra: &[&'static str]) -> Vec<&'static str> {
    base.iter().chain(extra).copied().collect()
}

#[test]
fn eval_at_zero_assets() {
    let o = ifp(&with(&["eval"], &with(&R0, &["--a", "0"])));
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(value(&out, "c"), 3.0);
    assert_eq!(value(&out, "T_exact_r0"), 0.0);
    assert_eq!(value(&out, "T_numeric"), 0.0);
}

#[test]
fn eval_at_income_level() {
    let o = ifp(&with(&["eval"], &with(&R0, &["--a", "3"])));
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!((value(&out, "c") - 5.031048175690952).abs() < 1e-12);
    assert!((value(&out, "T_exact_r0") - 3.2313503660228147).abs() < 1e-12);
    assert!(value(&out, "d2c_dady") > 0.0);
    assert!(value(&out, "dc_da") > 0.16);
}

#[test]
fn eval_positive_rate_has_no_derivatives() {
    let out = stdout(&ifp(&["eval", "--r", "0.01", "--a", "3"]));
    assert!(!out.contains("dc_da"));
    assert!(!out.contains("T_exact_r0"));
    assert!(value(&out, "T_numeric") > 0.0);
}

#[test]
fn impatience_violation_exits_2() {
    let o = ifp(&["eval", "--r", "0.08", "--a", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("impatience violated"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(ifp(&["check", "--level", "medium"]).status.code(), Some(2));
    assert_eq!(ifp(&["eval"]).status.code(), Some(2));
    assert_eq!(ifp(&["figure", "--which", "3"]).status.code(), Some(2));
    assert_eq!(ifp(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(ifp(&["eval", "--a", "-1"]).status.code(), Some(2));
}

#[test]
fn quick_check_passes_and_broken_tolerance_fails() {
    let o = ifp(&["check", "--level", "quick"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.lines().any(|l| l.starts_with("PASS [1a]")));
    let o = ifp(&["check", "--level", "full", "--lambert-residual-tol", "1e-30"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).lines().any(|l| l.starts_with("FAIL [1a]")));
}

fn read(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    let header = rdr.headers().unwrap().iter().map(str::to_string).collect();
    let rows = rdr
        .records()
        .map(|r| r.unwrap().iter().map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn sweep_with_two_points() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = ifp(&["sweep", "--n", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.ends_with('\n') && !text.contains('\r'));
    let (header, rows) = read(&out);
    assert_eq!(header, vec!["a_over_y", "c_over_y"]);
    assert_eq!(rows[0][0], 0.0);
    assert_eq!(rows[1][0], 10.0);
}

#[test]
fn log_sweeps_of_derivatives() {
    let o = ifp(&with(
        &["sweep"],
        &with(&R0, &["--a-min", "1e-3", "--a-max", "1e3", "--n", "100", "--spacing", "log", "--outputs", "c,jacobian,hessian"]),
    ));
    assert_eq!(o.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    let header: Vec<String> = rdr.headers().unwrap().iter().map(str::to_string).collect();
    assert_eq!(
        header,
        vec!["a_over_y", "c_over_y", "dc_da", "dc_dy", "d2c_da2", "d2c_dady", "d2c_dy2"]
    );
    let rows: Vec<Vec<f64>> = rdr
        .records()
        .map(|r| r.unwrap().iter().map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 100);
    assert!(rows.windows(2).all(|w| w[1][1] > w[0][1] && w[1][2] < w[0][2]));
    assert!((rows[99][2] - 0.16).abs() < 0.02);
    assert!(rows.iter().all(|r| r[5] > 0.0));
}

#[test]
fn derivative_sweep_needs_zero_rate() {
    let o = ifp(&["sweep", "--a-min", "0.1", "--outputs", "jacobian"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}

#[test]
fn csv_round_trip_is_exact() {
    use ifp_core::figures::figure2;
    use ifp_core::sweep::{Spacing, SweepSpec};
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f2.csv");
    let o = ifp(&["figure", "--which", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = read(&out);
    let spec = SweepSpec::new(0.0, 10.0, 201, Spacing::Linear, true).unwrap();
    let table = figure2(&ifp_core::ModelParams::figure(), &spec).unwrap();
    assert_eq!(header, table.header);
    assert_eq!(rows, table.rows);
}

#[test]
fn figure_output_is_deterministic() {
    let a = ifp(&["figure", "--which", "1"]);
    let b = ifp(&["figure", "--which", "1"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("a_over_y,c_discrete_over_y,c_unconstrained_over_y,knot_flag\n"));
}

#[test]
fn figure1_rejects_zero_rate() {
    let o = ifp(&["figure", "--which", "1", "--r", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn validation_errors_leave_no_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never.csv");
    let path = out.to_str().unwrap();
    for args in [
        vec!["sweep", "--n", "1", "--out", path],
        vec!["sweep", "--a-min", "5", "--a-max", "1", "--out", path],
        vec!["sweep", "--spacing", "log", "--out", path],
        vec!["figure", "--which", "2", "--r", "0.2", "--out", path],
        vec!["figure", "--which", "1", "--delta", "0", "--out", path],
    ] {
        let o = ifp(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!out.exists(), "{args:?} wrote a file");
    }
}

#[test]
fn unwritable_path_is_reported() {
    let o = ifp(&["sweep", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent-dir/x.csv"));
}
