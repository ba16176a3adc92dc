use std::process::Command;

use greysim::harness::cli::{run, EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE};
use greysim::report::{reports_from_json, reports_to_json, RunReport, ToleranceRule};
use proptest::prelude::*;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_greysim"))
}

fn call(args: &[&str]) -> i32 {
    run(std::iter::once("greysim").chain(args.iter().copied()))
}

#[test]
fn verify_moments_emits_passing_reports() {
    let out = bin()
        .args(["verify", "--suite", "moments", "--alpha", "1.5", "--beta", "0.7", "--seed", "42"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let reports = reports_from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let ids: Vec<&str> = reports.iter().map(|r| r.check_id.as_str()).collect();
    assert!(ids.contains(&"moments.ggbm.m2") && ids.contains(&"moments.ggbm.m4"));
    assert!(reports.iter().all(|r| r.seed == 42 && r.stream_count == 8));
}

#[test]
fn substitution_suite_is_a_single_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let code = call(&[
        "verify", "--suite", "substitution", "--alpha", "1.5", "--beta", "0.6", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    let reports = reports_from_json(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(reports.len(), 1);
    assert!(reports[0].statistic <= 1e-12);
}

#[test]
fn solve_writes_paths_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("paths.csv");
    let code = call(&[
        "solve", "--field", "constant", "--sigma", "1", "--t", "1", "--paths", "1000", "--alpha", "1.5",
        "--beta", "0.7", "--steps", "16", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.starts_with("path,t,x1\n"));
    assert_eq!(text.lines().count(), 1 + 1000 * 17);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(call(&["verify", "--suite", "moments", "--alpha", "1.5"]), EXIT_USAGE);
    assert_eq!(call(&["sample", "--alpha", "1.5", "--n", "3"]), EXIT_USAGE);
    assert_eq!(call(&["verify", "--bogus"]), EXIT_USAGE);
    assert_eq!(call(&["nonsense"]), EXIT_USAGE);
    assert_eq!(call(&[]), EXIT_USAGE);
    assert_eq!(call(&["verify", "--suite", "nope", "--alpha", "1.5", "--beta", "0.5"]), EXIT_USAGE);
    assert_eq!(call(&["sample", "--alpha", "2.5", "--beta", "0.5"]), EXIT_USAGE);
    assert_eq!(call(&["solve", "--field", "constant", "--alpha", "1.0", "--beta", "0.5"]), EXIT_USAGE);
    assert_eq!(call(&["verify", "--config", "/nonexistent/x.toml"]), EXIT_USAGE);
    assert_eq!(call(&["--help"]), EXIT_OK);
}

#[test]
fn bad_config_file_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.toml");
    std::fs::write(&path, "[params]\nalpha = 1.5\nbeta = 0.7\n[grid]\nsteps = 0\nhorizon = 1.0\n").unwrap();
    assert_eq!(call(&["verify", "--config", path.to_str().unwrap()]), EXIT_USAGE);
}

#[test]
fn report_exit_code_follows_recomputed_pass() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let good = RunReport::new("a", 1.0, 1.0, None, ToleranceRule::Abs(0.1));
    std::fs::write(&path, reports_to_json(&[good.clone()]).unwrap()).unwrap();
    assert_eq!(call(&["report", path.to_str().unwrap()]), EXIT_OK);
    let bad = RunReport::new("b", 2.0, 1.0, None, ToleranceRule::Abs(0.1));
    std::fs::write(&path, reports_to_json(&[good, bad]).unwrap()).unwrap();
    assert_eq!(call(&["report", path.to_str().unwrap()]), EXIT_CHECK_FAILED);
}

#[test]
fn failing_check_exits_one() {
    // the tail bound at y = 0.5 is exceeded for the default constant field
    let out = bin()
        .args(["verify", "--suite", "tail", "--alpha", "1.5", "--beta", "0.7", "--samples", "100000"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn seed_comes_from_environment() {
    let out = bin()
        .env("GREYSIM_SEED", "7")
        .args(["sample", "--alpha", "1.5", "--beta", "0.7", "--n", "4"])
        .output()
        .unwrap();
    let again = bin()
        .args(["sample", "--alpha", "1.5", "--beta", "0.7", "--n", "4", "--seed", "7"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(out.stdout, again.stdout);
    let bad = bin()
        .env("GREYSIM_SEED", "x")
        .args(["sample", "--alpha", "1.5", "--beta", "0.7"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn specfun_prints_values() {
    let out = bin().args(["specfun", "gamma", "--x", "5"]).output().unwrap();
    let v: f64 = String::from_utf8(out.stdout).unwrap().trim().parse().unwrap();
    assert!((v - 24.0).abs() < 1e-12);
    assert_eq!(call(&["specfun", "mittag-leffler", "--x", "1"]), EXIT_USAGE);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn malformed_invocations_exit_two(
        sub in prop::sample::select(vec!["sample", "fbm", "solve", "density", "verify"]),
        flag in "--[a-z]{3,9}",
        value in "[a-z#%]{1,6}",
    ) {
        let known = ["--alpha", "--beta", "--seed", "--streams", "--out", "--log", "--samples", "--paths",
            "--config", "--suite", "--sigma", "--drift", "--field", "--method", "--points", "--steps",
            "--hurst", "--horizon", "--dim", "--help", "--version", "--zmin", "--zmax", "--bandwidth", "--x0", "--a", "--t", "--n"];
        prop_assume!(!known.contains(&flag.as_str()));
        prop_assert_eq!(call(&[sub, &flag, &value]), EXIT_USAGE);
    }

    #[test]
    fn out_of_range_params_exit_two(alpha in -1.0f64..4.0, beta in -0.5f64..1.5) {
        prop_assume!(!(alpha > 0.0 && alpha < 2.0 && beta > 0.0 && beta <= 1.0));
        let a = alpha.to_string();
        let b = beta.to_string();
        prop_assert_eq!(call(&["sample", "--alpha", &a, "--beta", &b, "--n", "1"]), EXIT_USAGE);
    }
}
