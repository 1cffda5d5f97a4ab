mod common;

use std::process::{Command, Output};

use common::{fixture, fixture_path, solution};
use quatnls::soliton::{BuildOptions, SolitonSolution};

fn quatnls(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quatnls")).args(args).env("QUATNLS_THREADS", "2").output().unwrap()
}

fn run(sub: &str, name: &str, extra: &[&str]) -> Output {
    let path = fixture_path(name);
    let mut args = vec![sub, "--config", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    quatnls(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect()
}

#[test]
fn exit_codes() {
    assert_eq!(run("build", "real_eigenvalue", &[]).status.code(), Some(0));
    assert_eq!(run("build", "no_soliton", &[]).status.code(), Some(2));
    assert_eq!(run("build", "negative_multiple", &[]).status.code(), Some(3));
    assert_eq!(run("build", "malformed", &[]).status.code(), Some(4));
    assert_eq!(run("build", "does_not_exist", &[]).status.code(), Some(4));
    assert_eq!(run("sample", "real_eigenvalue", &["--nx", "0"]).status.code(), Some(4));
}

#[test]
fn build_matches_library() {
    let o = run("build", "conjugate_pair", &[]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let sol = solution("conjugate_pair");
    assert_eq!(v["p"], 1);
    let close = |printed: &serde_json::Value, direct: f64| (printed.as_f64().unwrap() - direct).abs() <= 1e-14 * (1.0 + direct.abs());
    assert!(close(&v["q_l"][0], sol.q_l().re));
    assert!(close(&v["q_l"][1], sol.q_l().im));
    assert!(close(&v["theta_l"], sol.theta_l()));
    assert!(close(&v["compatibility_defect"], sol.compatibility_defect()));
}

#[test]
fn sample_grid_and_values() {
    let o = run("sample", "real_eigenvalue", &["--nx", "11", "--nt", "3", "--t-max", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 11 * 3 + 1);
    let sol = solution("real_eigenvalue");
    for r in rows(&text) {
        let q = sol.eval_q(r[0], r[1]).unwrap();
        assert_eq!((r[2], r[3]), (q.re, q.im));
    }
}

#[test]
fn sample_tends_to_background() {
    let o = run("sample", "real_eigenvalue", &["--x-min", "-30", "--x-max", "30", "--nx", "3"]);
    let mu = fixture("real_eigenvalue").mu;
    let r = rows(&stdout(&o));
    assert!((r[0][4] - mu).abs() < 1e-8 && (r[2][4] - mu).abs() < 1e-8);
}

#[test]
fn constant_background_at_zero_time() {
    let o = run("sample", "constant_background", &["--nx", "21"]);
    assert_eq!(o.status.code(), Some(0));
    let mu = fixture("constant_background").mu;
    for r in rows(&stdout(&o)) {
        assert!((r[4] - mu).abs() < 1e-10, "{r:?}");
    }
}

#[test]
fn verify_passes_and_detects_corruption() {
    for name in ["real_eigenvalue", "conjugate_pair"] {
        let o = run("verify", name, &[]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(v["pass"], true);
    }
    assert_eq!(run("verify", "real_eigenvalue", &["--corrupt-p-r", "1.5"]).status.code(), Some(1));
}

#[test]
fn scan_singular_finds_one_point() {
    let o = run("scan-singular", "negative_multiple", &["--x-min", "-3", "--x-max", "3", "--nx", "601"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let pts = v["singular_points"].as_array().unwrap();
    assert_eq!(pts.len(), 1);
    let sol = SolitonSolution::build_with(fixture("negative_multiple"), BuildOptions::lenient()).unwrap();
    let direct = sol.singular_locus(0.0, (-3.0, 3.0), 601).unwrap();
    assert_eq!(pts[0].as_f64().unwrap(), direct.singular_points[0]);
    assert!((direct.singular_points[0] - 0.4f64.ln() / 2.0).abs() < 1e-6);
}

#[test]
fn sample_is_lenient_where_build_is_strict() {
    assert_eq!(run("build", "negative_multiple", &[]).status.code(), Some(3));
    let o = run("sample", "negative_multiple", &["--nx", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(rows(&stdout(&o)).len(), 5);
}
