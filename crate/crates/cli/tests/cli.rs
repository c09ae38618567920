//! End-to-end tests of the binary: exit codes, schemas, precedence,
//! reproducibility, and the data-file override.

use std::io::Write;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_graphene-cp"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const CSV_HEADER: &str =
    "state,distance_m,temperature_K,u_nonres_J,u_res_J,u_total_J,force_N,n_atoms,flag";

#[test]
fn cp_happy_path() {
    let out = run(&[
        "cp",
        "--state",
        "32S1/2",
        "--distance",
        "200e-9",
        "--temperature",
        "0",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains(CSV_HEADER));
    let row = text
        .lines()
        .find(|l| l.starts_with("32S1/2,"))
        .expect("data row present");
    assert!(row.contains("2.000000e-07,0.000000e+00"));
    assert!(row.ends_with(",computed"));
    // timestamp goes to the diagnostic stream, not the data payload
    assert!(!text.contains("unix"));
    assert!(stderr(&out).contains("unix"));
}

#[test]
fn unknown_series_is_usage_error() {
    let out = run(&["cp", "--state", "32X1/2", "--distance", "200e-9"]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains("unknown series"));
}

#[test]
fn missing_state_is_usage_error() {
    let out = run(&["cp", "--distance", "200e-9"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_range_is_usage_error() {
    for bad in ["5e-7:1e-8:50:log", "1e-8:5e-7:1:lin", "1e-8:5e-7:10:banana"] {
        let out = run(&["sweep", "--state", "5S1/2", "--distance", bad]);
        assert_eq!(out.status.code(), Some(2), "spec {bad:?}");
    }
}

#[test]
fn config_file_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.conf");
    let mut f = std::fs::File::create(&path).unwrap();
    writeln!(f, "# example configuration").unwrap();
    writeln!(f, "state = 32S1/2").unwrap();
    writeln!(f, "distance = 200e-9").unwrap();
    writeln!(f, "temperature = 300").unwrap();
    drop(f);

    // flag overrides the file key
    let out = run(&[
        "cp",
        "--config",
        path.to_str().unwrap(),
        "--temperature",
        "0",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let row = text.lines().find(|l| l.starts_with("32S1/2,")).unwrap();
    assert!(row.contains(",0.000000e+00,"), "row: {row}");
}

#[test]
fn unknown_config_key_is_hard_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.conf");
    std::fs::write(&path, "state = 5S1/2\nfrobnicate = 7\n").unwrap();
    let out = run(&[
        "cp",
        "--config",
        path.to_str().unwrap(),
        "--distance",
        "200e-9",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("frobnicate"));
}

#[test]
fn sweep_shape_and_reproducibility() {
    let args = [
        "sweep",
        "--state",
        "5S1/2",
        "--distance",
        "1e-8:5e-7:50:log",
    ];
    let first = run(&args);
    assert!(first.status.success(), "stderr: {}", stderr(&first));
    let text = stdout(&first);
    let data_rows: Vec<&str> = text.lines().filter(|l| l.starts_with("5S1/2,")).collect();
    assert_eq!(data_rows.len(), 50);
    // identical configuration => byte-identical payload
    let second = run(&args);
    assert_eq!(stdout(&first), stdout(&second));
}

#[test]
fn table1_emits_computed_and_reference_rows() {
    let out = run(&["table1"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let computed = text.lines().filter(|l| l.ends_with(",computed")).count();
    let reference = text.lines().filter(|l| l.ends_with(",reference")).count();
    // 4 states x 2 temperatures x 2 distance blocks
    assert_eq!(computed, 16);
    assert_eq!(reference, 16);
    // published 32S anchor appears verbatim in a reference row
    assert!(text.contains("5.720000e-16"));
    for n in [26, 29, 32, 34] {
        assert!(text.contains(&format!("{n}S1/2,")));
    }
}

#[test]
fn table2_rows_and_rounding_conventions() {
    let out = run(&["table2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for n in [23, 30, 36, 43] {
        assert!(text.contains(&format!("{n}S1/2,")));
    }
    // ceiling and nearest differ for the boundary rows; both are emitted
    assert!(text.lines().any(|l| l.ends_with(",computed_nearest")));
    let reference = text.lines().filter(|l| l.ends_with(",reference")).count();
    assert_eq!(reference, 4);
}

#[test]
fn membrane_report_values() {
    let out = run(&["membrane"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("quantity,value"));
    let force_line = text
        .lines()
        .find(|l| l.starts_with("force_for_amplitude_N,"))
        .unwrap();
    let value: f64 = force_line.split(',').nth(1).unwrap().parse().unwrap();
    assert!((value - 1.6e-14).abs() / 1.6e-14 < 0.03);
    assert!(text.contains("f0_Hz,3.73"));
}

#[test]
fn membrane_csv_golden() {
    // closed-form chain, stable to machine precision; freezes the %.6e
    // formatting and the key-value schema
    let out = run(&["membrane"]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        "# schema_version: 1\n\
         # tool_version: 0.1.0\n\
         # command: membrane\n\
         quantity,value\n\
         f0_Hz,3.730586e+05\n\
         kappa_eff_N_per_m,1.599177e-05\n\
         amplitude_m,1.000000e-09\n\
         force_for_amplitude_N,1.599177e-14\n"
    );
}

#[test]
fn atoms_needed_reports_count() {
    let out = run(&[
        "atoms-needed",
        "--state",
        "32S1/2",
        "--distance",
        "200e-9",
        "--temperature",
        "0",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let row = text.lines().find(|l| l.starts_with("32S1/2,")).unwrap();
    let n_atoms: u64 = row.split(',').nth(7).unwrap().parse().unwrap();
    assert!(n_atoms > 0);
}

#[test]
fn non_convergence_exits_3() {
    let out = run(&[
        "force",
        "--state",
        "5S1/2",
        "--distance",
        "200e-9",
        "--rel-tol",
        "1e-14",
        "--max-subdivisions",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(3), "stderr: {}", stderr(&out));
}

#[test]
fn json_output_mirrors_schema() {
    let out = run(&[
        "cp",
        "--state",
        "5S1/2",
        "--distance",
        "200e-9",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["meta"]["command"], "cp");
    assert_eq!(v["meta"]["schema_version"], 1);
    let row = &v["rows"][0];
    assert_eq!(row["state"], "5S1/2");
    assert_eq!(row["flag"], "computed");
    assert!(row["force_n"].as_f64().unwrap() < 0.0);
    assert!(row["u_res_j"].as_f64().unwrap() == 0.0);
}

#[test]
fn line_data_env_override() {
    // doubling the D-line dipoles quadruples the ground-state potential scale
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lines.txt");
    std::fs::write(
        &path,
        "# test data\n5S1/2 5P1/2 794.978851 8.462\n5S1/2 5P3/2 780.241209 11.954\n",
    )
    .unwrap();
    let base = run(&["force", "--state", "5S1/2", "--distance", "200e-9"]);
    let modified = bin()
        .args(["force", "--state", "5S1/2", "--distance", "200e-9"])
        .env("GRAPHENE_CP_DATA", path.to_str().unwrap())
        .output()
        .unwrap();
    assert!(modified.status.success());
    let f_base: f64 = stdout(&base)
        .lines()
        .find(|l| l.starts_with("5S1/2,"))
        .unwrap()
        .split(',')
        .nth(6)
        .unwrap()
        .parse()
        .unwrap();
    let f_mod: f64 = stdout(&modified)
        .lines()
        .find(|l| l.starts_with("5S1/2,"))
        .unwrap()
        .split(',')
        .nth(6)
        .unwrap()
        .parse()
        .unwrap();
    let ratio = f_mod / f_base;
    assert!((ratio - 4.0).abs() < 0.05, "dipole-doubling ratio {ratio}");

    // malformed override is a hard error naming the line
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "5S1/2 5P1/2 oops 4.231\n").unwrap();
    let broken = bin()
        .args(["force", "--state", "5S1/2", "--distance", "200e-9"])
        .env("GRAPHENE_CP_DATA", bad.to_str().unwrap())
        .output()
        .unwrap();
    assert!(!broken.status.success());
    assert!(stderr(&broken).contains("line 1"));
}
