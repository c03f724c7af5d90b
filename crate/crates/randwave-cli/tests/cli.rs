//! End-to-end runs of the compiled binary: exit codes, the stdout JSON
//! contract, file outputs, and rerun determinism.

use std::path::Path;
use std::process::{Command, Output};

fn randwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_randwave")).args(args).output().expect("spawn binary")
}

fn stdout_json(output: &Output) -> serde_json::Value {
    serde_json::from_slice(&output.stdout).expect("stdout is one JSON document")
}

#[test]
fn kacrice_matches_the_golden_disk_value() {
    let out = randwave(&[
        "kacrice", "--domain", "disk", "--window", "long", "--lambda", "80", "--grid", "4096",
    ]);
    assert!(out.status.success());
    let json = stdout_json(&out);
    // Constant density on the disk: the quadrature is grid-independent, so
    // the 12-digit value is frozen.
    assert!((json["z"].as_f64().unwrap() - 64.2995088426).abs() < 1e-9);
    assert!((json["prediction"].as_f64().unwrap() - 65.3197264742).abs() < 1e-9);
    assert_eq!(json["modes"].as_u64(), Some(1563));
    assert_eq!(json["rule"].as_str(), Some("midpoint_periodic"));
}

#[test]
fn sim_writes_report_and_csvs_and_reruns_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("r.json");
    let args = |workers: &'static str, out: &Path| {
        vec![
            "sim".into(),
            "--domain".into(),
            "disk".into(),
            "--radius".into(),
            "1".into(),
            "--window".into(),
            "short".into(),
            "--lambda".into(),
            "30".into(),
            "--trials".into(),
            "40".into(),
            "--seed".into(),
            "42".into(),
            "--eps".into(),
            "0.0001".into(),
            "--out".into(),
            out.to_string_lossy().into_owned(),
            "--dump-zeros".into(),
            "--workers".into(),
            workers.into(),
        ]
    };
    let first = Command::new(env!("CARGO_BIN_EXE_randwave"))
        .args(args("1", &out_path))
        .output()
        .unwrap();
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(report["manifest"]["rng"].as_str(), Some("chacha12"));
    assert_eq!(report["manifest"]["gaussian_transform"].as_str(), Some("box_muller"));
    assert!(report["summary"]["mean"].as_f64().is_some());
    // stdout carries the same document that landed in the file.
    assert_eq!(stdout_json(&first), report);

    let csv_path = dir.path().join("r.per_trial.csv");
    let dump_path = dir.path().join("r.zeros.csv");
    let csv1 = std::fs::read(&csv_path).unwrap();
    let dump1 = std::fs::read(&dump_path).unwrap();
    assert!(csv1.starts_with(b"trial,count,reg_0.0001\n"));
    assert!(dump1.starts_with(b"trial,root_index,theta,deriv_at_root\n"));
    assert_eq!(csv1.iter().filter(|&&b| b == b'\n').count(), 41);

    let second = Command::new(env!("CARGO_BIN_EXE_randwave"))
        .args(args("3", &out_path))
        .output()
        .unwrap();
    assert!(second.status.success());
    assert_eq!(csv1, std::fs::read(&csv_path).unwrap());
    assert_eq!(dump1, std::fs::read(&dump_path).unwrap());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn missing_lambda_is_a_usage_error_naming_the_flag() {
    let out = randwave(&["sim", "--window", "short"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("--lambda"), "stderr must name the missing flag: {stderr}");
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = randwave(&["sim", "--window", "short", "--lambda", "20", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("--frobnicate"), "stderr must echo the unknown flag: {stderr}");
}

#[test]
fn grid_below_the_floor_is_a_usage_error() {
    let out =
        randwave(&["sim", "--window", "short", "--lambda", "30", "--trials", "5", "--grid", "64"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("floor"), "stderr must explain the floor: {stderr}");
}

#[test]
fn selftest_passes_and_says_so_on_stdout() {
    let out = randwave(&["selftest"]);
    assert!(out.status.success());
    let json = stdout_json(&out);
    assert_eq!(json["passed"].as_bool(), Some(true));
    assert_eq!(json["checks"].as_array().unwrap().len(), 3);
}

#[test]
fn weyl_writes_the_diagnostics_table() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("weyl.csv");
    let out = randwave(&[
        "weyl",
        "--lambda",
        "30",
        "--grid",
        "256",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let json = stdout_json(&out);
    assert_eq!(json["rows"].as_array().unwrap().len(), 6);
    let table = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next(), Some("lambda,window,ratio_name,value,target"));
    assert_eq!(lines.count(), 6);
}

#[test]
fn hopf_matches_on_every_seeded_trial() {
    let out = randwave(&[
        "hopf", "--window", "short", "--lambda", "20", "--trials", "20", "--seed", "7",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json = stdout_json(&out);
    assert_eq!(json["matched"].as_u64(), Some(20));
    assert_eq!(json["match_rate"].as_f64(), Some(1.0));
    assert_eq!(json["unresolved"].as_u64(), Some(0));
}

#[test]
fn slopes_reports_rows_and_the_target() {
    let out = randwave(&[
        "slopes", "--window", "short", "--lambda", "20", "--lambda", "30", "--trials", "50",
        "--seed", "3", "--workers", "2",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json = stdout_json(&out);
    assert_eq!(json["rows"].as_array().unwrap().len(), 2);
    assert_eq!(json["target"].as_f64(), Some(1.0));
    let slope = json["slope"].as_f64().unwrap();
    assert!(slope > 0.5 && slope < 1.1, "slope {slope} out of plausible range");
}
