use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ellipsoid-spectra"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Header and rows of CSV output, after checking the schema line.
fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let (schema, body) = text.split_once('\n').unwrap();
    assert_eq!(schema, "# schema=1");
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    let header = reader.headers().unwrap().iter().map(String::from).collect();
    let rows = reader.records().map(|r| r.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

fn error_kind(out: &Output) -> String {
    let err: Value = serde_json::from_slice(&out.stderr).expect("stderr is a JSON error object");
    err["error"].as_str().unwrap().to_string()
}

#[test]
fn spectrum_reproduces_the_reference_values() {
    let out = run(&["spectrum", "--a", "3", "--b", "2", "--c", "1", "--lambda-max", "6", "--parity", "000"]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = csv_rows(&stdout(&out));
    let lambda = column(&header, "lambda");
    let values: Vec<f64> = rows.iter().map(|r| r[lambda].parse().unwrap()).collect();
    for want in [0.0, 1.074471, 2.134154, 5.029767] {
        assert!(values.iter().any(|v| (v - want).abs() < 5e-6), "{want} missing from {values:?}");
    }
    assert!(values.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn equal_axes_are_a_usage_error() {
    let out = run(&["spectrum", "--a", "1", "--b", "1", "--c", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "usage");
    assert!(out.stdout.is_empty());
}

#[test]
fn zero_limit_prints_only_the_header() {
    let out = run(&["spectrum", "--a", "2", "--b", "1.5", "--c", "1", "--lambda-max", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 2);
}

#[test]
fn negative_limit_is_a_usage_error() {
    let out = run(&["spectrum", "--a", "2", "--b", "1.5", "--c", "1", "--lambda-max=-1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn lower_eigencurve_rises_slower_than_k2() {
    let out = run(&[
        "eigencurve", "--a", "3", "--b", "2", "--c", "1", "--family", "h", "--index", "0", "--lambda-max", "6",
        "--samples", "61", "--backend", "galerkin",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 61);
    let (l, v) = (column(&header, "lambda"), column(&header, "value"));
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r[l].parse().unwrap(), r[v].parse().unwrap())).collect();
    assert_eq!(points[60].0, 6.0);
    for w in points.windows(2) {
        let slope = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
        assert!(slope > 0.0 && slope < 0.625, "slope {slope}");
    }
}

#[test]
fn upper_eigencurve_starts_at_zero_with_both_backends() {
    let out = run(&[
        "eigencurve", "--a", "3", "--b", "2", "--c", "1", "--family", "H", "--lambda-max", "6", "--samples", "7",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 14);
    let (b, v) = (column(&header, "backend"), column(&header, "value"));
    assert_eq!(rows[0][b], "galerkin");
    assert_eq!(rows[1][b], "prufer");
    for row in &rows[..2] {
        assert!(row[v].parse::<f64>().unwrap().abs() < 1e-9);
    }
}

#[test]
fn eigencurve_rejects_a_single_sample() {
    let out = run(&["eigencurve", "--a", "3", "--b", "2", "--c", "1", "--family", "h", "--lambda-max", "6", "--samples", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "usage");
}

#[test]
fn perturbation_matches_the_closed_form() {
    for (k2, m, n, exact) in [("0.625", "0", "1", -1.5), ("0.5", "1", "0", 2.0 - 2.0 + 8.0 / 7.0 * 0.75f64.sqrt())] {
        let out = run(&["--format", "json", "perturb", "--k2", k2, "--m", m, "--n", n]);
        assert_eq!(out.status.code(), Some(0));
        let record: Value = serde_json::from_slice(&out.stdout).unwrap();
        let row = &record["rows"][0];
        assert!((row["closed_form"].as_f64().unwrap() - exact).abs() < 1e-12);
        assert!(row["diff_quadrature"].as_f64().unwrap() < 1e-4);
        assert!(row["diff_fd"].as_f64().unwrap() < 1e-4);
    }
}

#[test]
fn perturbation_without_a_closed_form_leaves_it_empty() {
    let out = run(&["perturb", "--k2", "0.4", "--m", "0", "--n", "0", "--parity", "100"]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = csv_rows(&stdout(&out));
    assert_eq!(rows[0][column(&header, "closed_form")], "");
}

#[test]
fn modulus_outside_the_unit_interval_is_rejected() {
    assert_eq!(run(&["perturb", "--k2", "1.5", "--m", "1", "--n", "0"]).status.code(), Some(2));
}

#[test]
fn quick_verification_passes() {
    let out = run(&["verify", "--level", "quick"]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 2);
    let passed = column(&header, "passed");
    assert!(rows.iter().all(|r| r[passed] == "true"));
}

#[test]
fn unknown_level_is_a_usage_error() {
    let out = run(&["verify", "--level", "thorough"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "usage");
}

#[test]
fn help_exits_cleanly() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("spectrum"));
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let out = run_env(&["chart", "--a", "3", "--b", "2", "--c", "1"], &[("ELLIPSOID_SPECTRA_THREADS", "0")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_is_identical_across_runs_and_thread_counts() {
    let args = ["spectrum", "--a", "3", "--b", "2", "--c", "1", "--lambda-max", "8"];
    let one = run_env(&args, &[("ELLIPSOID_SPECTRA_THREADS", "1")]);
    let four = run_env(&args, &[("ELLIPSOID_SPECTRA_THREADS", "4")]);
    let again = run(&args);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(one.stdout, again.stdout);
}

#[test]
fn csv_and_json_carry_the_same_rows() {
    let args = ["spectrum", "--a", "3", "--b", "2", "--c", "1", "--lambda-max", "4", "--backend", "galerkin"];
    let csv_out = run(&args);
    let json_out = run(&[&["--format", "json"], &args[..]].concat());
    let (header, rows) = csv_rows(&stdout(&csv_out));
    let record: Value = serde_json::from_slice(&json_out.stdout).unwrap();
    assert_eq!(record["schema_version"], "1");
    assert_eq!(record["command"], "spectrum");
    let json_rows = record["rows"].as_array().unwrap();
    assert_eq!(json_rows.len(), rows.len());
    for (csv_row, json_row) in rows.iter().zip(json_rows) {
        let keys: Vec<&String> = json_row.as_object().unwrap().keys().collect();
        assert_eq!(keys.len(), header.len());
        for (name, text) in header.iter().zip(csv_row) {
            match &json_row[name] {
                Value::Number(n) => assert_eq!(text.parse::<f64>().unwrap().to_bits(), n.as_f64().unwrap().to_bits()),
                Value::String(s) => assert_eq!(s, text),
                other => panic!("unexpected {other}"),
            }
        }
    }
}

#[test]
fn chart_points_lie_on_the_surface() {
    let out = run(&["chart", "--a", "3", "--b", "2", "--c", "1", "--s-samples", "5", "--t-samples", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 40);
    let idx: Vec<usize> = ["x", "y", "z"].iter().map(|n| column(&header, n)).collect();
    for row in rows {
        let p: Vec<f64> = idx.iter().map(|&i| row[i].parse().unwrap()).collect();
        let residual = (p[0] / 3.0).powi(2) + (p[1] / 2.0).powi(2) + p[2].powi(2) - 1.0;
        assert!(residual.abs() < 1e-12);
    }
}
