//! End-to-end runs of the `bernstein` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bernstein(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bernstein"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Deterministic points on `[lo, hi]` with a header line.
fn csv_sample(lo: f64, hi: f64, n: usize) -> String {
    let mut out = String::from("value\n");
    for i in 0..n {
        let u = ((i as f64 + 0.5) * 0.618_033_988_749_895).fract();
        out.push_str(&format!("{}\n", lo + (hi - lo) * u));
    }
    out
}

/// `Σ density · weight` from a fit CSV.
fn mass(csv: &str) -> f64 {
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,density,weight"));
    lines
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|t| t.parse().unwrap()).collect();
            v[1] * v[2]
        })
        .sum()
}

#[test]
fn uniform_vitale_m2_integrates_to_one() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "u.csv", &csv_sample(0.0, 1.0, 200));
    let o = bernstein(&["fit", "--input", s(&input), "--kind", "vitale", "--m", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!((mass(&stdout(&o)) - 1.0).abs() < 1e-6);
}

#[test]
fn fit_mass_round_trip_on_original_support() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "d.csv", &csv_sample(1.5, 5.0, 150));
    for (kind, extra) in [
        ("vitale", vec!["--m", "20"]),
        ("leblanc", vec!["--m", "20"]),
        ("generalized", vec!["--m", "21", "--b", "3"]),
        ("normalized", vec!["--m", "20"]),
        ("vitale", vec![]),
    ] {
        let mut args = vec!["fit", "--input", s(&input), "--support", "1.5,5", "--kind", kind];
        args.extend(extra);
        let o = bernstein(&args);
        assert!(o.status.success(), "{kind}: {}", String::from_utf8_lossy(&o.stderr));
        let m = mass(&stdout(&o));
        assert!((m - 1.0).abs() < 1e-6, "{kind}: {m}");
    }
    // Recursive with γ_n = 1/n: Π_n = 0, so the mass is exactly 1.
    let o = bernstein(&[
        "fit", "--input", s(&input), "--support", "1.5,5", "--kind", "recursive", "--exponent", "0.4",
        "--format", "json",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let total: f64 = v["density"]
        .as_array()
        .unwrap()
        .iter()
        .zip(v["weight"].as_array().unwrap())
        .map(|(d, w)| d.as_f64().unwrap() * w.as_f64().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-6, "{total}");
    assert_eq!(v["order_exponent"], 0.4);
}

#[test]
fn empty_input_fails_without_output() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "empty.csv", "");
    let out = dir.path().join("out.csv");
    let o = bernstein(&["fit", "--input", s(&input), "--kind", "vitale", "--m", "2", "--output", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
    assert!(String::from_utf8_lossy(&o.stderr).contains("no observations"));
}

#[test]
fn bad_rows_report_line_numbers() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "bad.csv", "x\n0.2\n0.3\nabc\n");
    let o = bernstein(&["fit", "--input", s(&input), "--kind", "vitale", "--m", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains(":4:"));
    let input = write(&dir, "out.csv", "0.2\n7.5\n");
    let o = bernstein(&["fit", "--input", s(&input), "--support", "0,5", "--kind", "vitale", "--m", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains(":2:"));
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(bernstein(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(bernstein(&["theory", "--density", "z"]).status.code(), Some(1));
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "u.csv", &csv_sample(0.0, 1.0, 20));
    let o = bernstein(&["fit", "--input", s(&input), "--kind", "vitale", "--b", "3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn theory_reports_c3() {
    let o = bernstein(&["theory", "--density", "a"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let c3 = v["c3"].as_f64().unwrap();
    assert!((c3 - 1.441_120_5).abs() < 1e-7, "{c3}");
    assert_eq!(v["methods"].as_array().unwrap().len(), 9);
}

#[test]
fn lscv_single_candidate_is_selected() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "u.csv", &csv_sample(0.0, 1.0, 40));
    let o = bernstein(&["lscv", "--input", s(&input), "--kind", "vitale", "--candidates", "7"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["selected"], 7);
    let o = bernstein(&["lscv", "--input", s(&input), "--kind", "recursive", "--candidates", "0.5"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["selected"], 0.5);
}

#[test]
fn simulate_one_cell_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let config = write(
        &dir,
        "sim.toml",
        "densities = [\"a\"]\nsizes = [30]\ntrials = 2\nseed = 7\n\n[[estimators]]\nkind = \"vitale\"\n",
    );
    let run = || {
        let o = bernstein(&["simulate", "--config", s(&config), "--format", "json"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        stdout(&o)
    };
    let first = run();
    assert_eq!(first, run());
    let v: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert_eq!(v[0]["ises"].as_array().unwrap().len(), 2);

    let strict = write(&dir, "bad.toml", "densities = [\"a\"]\nsizes = [30]\ntrials = 2\ncolour = 1\n");
    let o = bernstein(&["simulate", "--config", s(&strict)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bench_writes_json_record() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("bench.json");
    let o = bernstein(&["bench", "--n-initial", "20", "--n-additional", "20", "--grid", "16", "--output", s(&out)]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["n_additional"], 20);
    assert!(v["recursive_total_secs"].as_f64().unwrap() >= 0.0);
}
