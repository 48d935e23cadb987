//! CLI contract tests: exit codes, spec'd command examples, and the
//! determinism acceptance criterion.

use std::path::Path;
use std::process::{Command, Output};

fn sobolab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sobolab"))
        .args(args)
        .current_dir(dir)
        .env("SOBOLAB_JOBS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn value_of(json_line: &str) -> f64 {
    let v: serde_json::Value = serde_json::from_str(json_line.trim()).expect("json output");
    v["value"].as_f64().expect("value field")
}

/// Criterion 10: identical command + seed produce bit-identical JSON
/// reports, twice in a row.
#[test]
fn criterion_10_cli_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "verify",
        "thm1",
        "--q",
        "2",
        "--s",
        "0",
        "--G",
        "512",
        "--L",
        "40",
        "--corpus",
        "gaussian:24",
        "--seed",
        "7",
        "--out-json",
        "run.json",
        "--out-csv",
        "run.csv",
    ];
    let first = sobolab(&args, dir.path());
    assert!(first.status.success(), "{}", stderr(&first));
    let json1 = std::fs::read(dir.path().join("run.json")).unwrap();
    let csv1 = std::fs::read(dir.path().join("run.csv")).unwrap();

    let second = sobolab(&args, dir.path());
    assert!(second.status.success());
    let json2 = std::fs::read(dir.path().join("run.json")).unwrap();
    let csv2 = std::fs::read(dir.path().join("run.csv")).unwrap();

    assert_eq!(json1, json2, "JSON reports differ between identical runs");
    assert_eq!(csv1, csv2, "CSV reports differ between identical runs");
    assert_eq!(stdout(&first), stdout(&second));
    assert!(stdout(&first).starts_with("case=thm1 C_emp="));
    println!(
        "criterion 10: PASS — bit-identical reports across two runs ({} bytes)",
        json1.len()
    );
}

#[test]
fn norm_of_unit_constant_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = sobolab(
        &[
            "norm",
            "--kind",
            "lp",
            "--p",
            "2",
            "--analytic",
            "const:1",
            "--n",
            "1",
            "--G",
            "64",
            "--L",
            "1",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    assert!((value_of(&stdout(&out)) - 1.0).abs() < 1e-13);
}

#[test]
fn lorentz_with_unit_weight_matches_lp() {
    let dir = tempfile::tempdir().unwrap();
    let f = [
        "--analytic",
        "bumps:2,9",
        "--n",
        "1",
        "--G",
        "128",
        "--L",
        "40",
    ];
    let lorentz = sobolab(
        &[
            &[
                "norm",
                "--kind",
                "lorentz",
                "--p",
                "2",
                "--weight",
                "power:1,0",
            ],
            &f[..],
        ]
        .concat(),
        dir.path(),
    );
    let lp = sobolab(
        &[&["norm", "--kind", "lp", "--p", "2"], &f[..]].concat(),
        dir.path(),
    );
    assert!(lorentz.status.success() && lp.status.success());
    let (a, b) = (value_of(&stdout(&lorentz)), value_of(&stdout(&lp)));
    assert!((a - b).abs() <= 1e-12 * b, "{a} vs {b}");
}

#[test]
fn besov_of_constant_exits_2_with_divergence_message() {
    let dir = tempfile::tempdir().unwrap();
    let out = sobolab(
        &[
            "norm",
            "--kind",
            "besov",
            "--beta",
            "1",
            "--analytic",
            "const:1",
            "--G",
            "64",
            "--L",
            "8",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr(&out).contains("Besov norm divergent on torus"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn weight_command_examples() {
    let dir = tempfile::tempdir().unwrap();
    let bp = sobolab(
        &[
            "weight",
            "--class",
            "bp",
            "--p",
            "2",
            "--weight",
            "power:1,0",
        ],
        dir.path(),
    );
    assert!(bp.status.success());
    assert!(
        stdout(&bp).contains("\"constant\":1.0000000000000000e0"),
        "{}",
        stdout(&bp)
    );

    let rejected = sobolab(
        &[
            "weight",
            "--class",
            "bp",
            "--p",
            "2",
            "--weight",
            "power:1,2",
        ],
        dir.path(),
    );
    assert!(rejected.status.success());
    assert!(
        stdout(&rejected).contains("tail integral divergent"),
        "{}",
        stdout(&rejected)
    );

    let a1 = sobolab(
        &[
            "weight", "--class", "a1", "--field", "ones", "--G", "64", "--L", "8",
        ],
        dir.path(),
    );
    assert!(a1.status.success());
    assert!(
        stdout(&a1).contains("\"constant\":1.0000000000000000e0"),
        "{}",
        stdout(&a1)
    );
}

#[test]
fn verify_rejects_invalid_parameters_with_named_constraint() {
    let dir = tempfile::tempdir().unwrap();
    let out = sobolab(&["verify", "thm1", "--q", "2", "--s", "0.6"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr(&out).contains("s < 1/q violated"),
        "{}",
        stderr(&out)
    );
    // no partial reports on parameter errors
    assert!(!dir.path().join("report-thm1.json").exists());
    assert!(!dir.path().join("report-thm1.csv").exists());
}

#[test]
fn verify_hedberg_reports_pointwise_constant() {
    let dir = tempfile::tempdir().unwrap();
    let out = sobolab(
        &[
            "verify",
            "hedberg",
            "--s",
            "1",
            "--s1",
            "0.5",
            "--beta",
            "1",
            "--G",
            "256",
            "--corpus",
            "gaussian:4",
            "--seed",
            "3",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("report-hedberg-pointwise.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["case"]["id"], "hedberg-pointwise");
    assert!(report["aggregate"]["max_ratio"].as_f64().unwrap() > 0.0);
    // per-record ratios are the pointwise constants
    assert!(report["records"][0]["ratio"].as_f64().unwrap().is_finite());
}

#[test]
fn sweep_single_point_matches_verify() {
    let dir = tempfile::tempdir().unwrap();
    let verify = sobolab(
        &[
            "verify",
            "thm1",
            "--q",
            "2",
            "--s",
            "0",
            "--G",
            "128",
            "--corpus",
            "gaussian:4",
            "--seed",
            "5",
        ],
        dir.path(),
    );
    assert!(verify.status.success());
    let c_emp_line = stdout(&verify);
    let c_emp = c_emp_line
        .trim()
        .split("C_emp=")
        .nth(1)
        .unwrap()
        .split(' ')
        .next()
        .unwrap();

    let sweep = sobolab(
        &[
            "sweep",
            "thm1",
            "--q",
            "2",
            "--s",
            "0",
            "--G",
            "128",
            "--corpus",
            "gaussian:4",
            "--seed",
            "5",
            "--out-csv",
            "sweep.csv",
        ],
        dir.path(),
    );
    assert!(sweep.status.success());
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert!(
        csv.contains(c_emp),
        "sweep CSV {csv} missing verify constant {c_emp}"
    );
}

#[test]
fn sweep_lists_rejected_points_without_failing() {
    let dir = tempfile::tempdir().unwrap();
    let out = sobolab(
        &[
            "sweep",
            "thm1",
            "--q",
            "2,3",
            "--s",
            "0,0.4",
            "--G",
            "128",
            "--corpus",
            "gaussian:2",
            "--seed",
            "5",
            "--out-csv",
            "sweep.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    // s = 0.4 is invalid for q = 3 (s < 1/q): exactly one rejected point
    let rejected: Vec<&str> = csv
        .lines()
        .filter(|l| l.starts_with("# rejected:"))
        .collect();
    assert_eq!(rejected.len(), 1, "{csv}");
    assert!(rejected[0].contains("s < 1/q violated"));
    // the three valid points are presenturable
    assert_eq!(
        csv.lines()
            .filter(|l| l.starts_with('2') || l.starts_with('3'))
            .count(),
        3
    );
}

#[test]
fn function_files_round_trip_through_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    let grid = sobolab::grid::Grid::new(1, 64, 8.0).unwrap();
    let f = sobolab::grid::GridFunction::from_fn(grid, |x| (x[0] - 4.0).tanh()).unwrap();
    std::fs::write(dir.path().join("f.json"), f.to_json()).unwrap();
    f.write_binary_file(dir.path().join("f.sblb")).unwrap();

    let via_json = sobolab(
        &["norm", "--kind", "lp", "--p", "2", "--input", "f.json"],
        dir.path(),
    );
    let via_bin = sobolab(
        &["norm", "--kind", "lp", "--p", "2", "--input", "f.sblb"],
        dir.path(),
    );
    assert!(via_json.status.success() && via_bin.status.success());
    assert_eq!(stdout(&via_json), stdout(&via_bin));

    let missing = sobolab(
        &["norm", "--kind", "lp", "--p", "2", "--input", "nope.json"],
        dir.path(),
    );
    assert_eq!(missing.status.code(), Some(3));
}

#[test]
fn bad_descriptor_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = sobolab(
        &[
            "norm",
            "--kind",
            "lp",
            "--p",
            "2",
            "--analytic",
            "wiggle:1",
            "--G",
            "64",
            "--L",
            "1",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
}
