use std::fs;
use std::path::{Path, PathBuf};

use chemostat::cli;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(cmd: &str, config: &Path, out: &Path, extra: &[&str]) -> anyhow::Result<bool> {
    let mut args = vec![
        "chemostat".to_string(),
        cmd.to_string(),
        "--config".into(),
        config.display().to_string(),
        "--out".into(),
        out.display().to_string(),
    ];
    args.extend(extra.iter().map(|s| s.to_string()));
    cli::run(args)
}

#[test]
fn scan_is_deterministic_and_finds_one_crossing() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(run("scan", &fixture("holling2_equal.json"), &a, &[]).unwrap());
    assert!(run("scan", &fixture("holling2_equal.json"), &b, &[]).unwrap());
    let first = fs::read(a.join("scan.csv")).unwrap();
    assert_eq!(first, fs::read(b.join("scan.csv")).unwrap());

    let text = String::from_utf8(first).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "mu,N,Z,re_pair,im_pair,alpha,discriminant,classification");
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[3].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 111);
    assert!(rows.windows(2).all(|w| w[0].0 < w[1].0));
    let crossings: Vec<f64> = rows
        .windows(2)
        .filter(|w| (w[0].1 < 0.0) != (w[1].1 < 0.0))
        .map(|w| w[0].0)
        .collect();
    assert_eq!(crossings.len(), 1);
    assert!((crossings[0] - 0.6).abs() < 0.05);
}

#[test]
fn scan_trims_points_without_coexistence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fs::read_to_string(fixture("holling2_equal.json"))
        .unwrap()
        .replace("\"lo\": 0.35", "\"lo\": 0.2");
    let path = dir.path().join("wide.json");
    fs::write(&path, cfg).unwrap();
    assert!(run("scan", &path, dir.path(), &[]).unwrap());
    let text = fs::read_to_string(dir.path().join("scan.csv")).unwrap();
    let first_mu: f64 = text.lines().nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
    assert!(first_mu > 0.325);
}

#[test]
fn hopf_certificates_for_all_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    for (name, lo, hi) in [
        ("holling2_equal.json", 0.55, 0.65),
        ("holling2_unequal.json", 0.85, 0.95),
        ("holling3_unequal.json", 7.0, 7.5),
    ] {
        assert!(run("hopf", &fixture(name), dir.path(), &[]).unwrap());
        let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("hopf.json")).unwrap()).unwrap();
        let mu = v["mu_c2"].as_f64().unwrap();
        assert!((lo..=hi).contains(&mu), "{name}: {mu}");
        assert!(v["re_slope"].as_f64().unwrap() > 0.0);
        assert!(v["alpha_at_crossing"].as_f64().unwrap() < 0.0);
    }
}

#[test]
fn simulate_writes_trajectory_and_cycle_report() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run("simulate", &fixture("holling2_after_hopf.json"), dir.path(), &["--t-end", "2500"]).unwrap());
    let traj = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert!(traj.starts_with("t,N,P,Z\n"));
    assert!(traj.ends_with('\n'));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("cycle.json")).unwrap()).unwrap();
    assert_eq!(v["cycle"]["classification"], "LimitCycle");

    assert!(run("simulate", &fixture("holling2_before_hopf.json"), dir.path(), &[]).unwrap());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("cycle.json")).unwrap()).unwrap();
    assert_eq!(v["cycle"]["classification"], "Equilibrium");

    assert!(run("simulate", &fixture("holling2_prey_free.json"), dir.path(), &[]).unwrap());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("cycle.json")).unwrap()).unwrap();
    let end = &v["final_state"];
    assert!((end["n"].as_f64().unwrap() - 0.65).abs() < 1e-6 && end["z"].as_f64().unwrap() < 1e-6);
}

#[test]
fn analyze_needs_scalar_mu() {
    let dir = tempfile::tempdir().unwrap();
    let e = run("analyze", &fixture("holling2_equal.json"), dir.path(), &[]).unwrap_err();
    assert!(format!("{e:#}").contains("parameters.mu"), "{e:#}");
    assert!(run("analyze", &fixture("holling2_after_hopf.json"), dir.path(), &[]).unwrap());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("analyze.json")).unwrap()).unwrap();
    assert_eq!(v["equilibria"].as_array().unwrap().len(), 3);
}

#[test]
fn verify_passes_on_default_and_fails_on_decreasing_response() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run("verify", &fixture("holling2_equal.json"), dir.path(), &["--seed", "3"]).unwrap());
    assert!(dir.path().join("appendix_ratios.csv").exists());
    assert!(!run("verify", &fixture("decreasing_response.json"), dir.path(), &[]).unwrap());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("verify.json")).unwrap()).unwrap();
    assert_eq!(v["checks"][0]["status"], "fail");
}

#[test]
fn bad_config_reports_field_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let text = fs::read_to_string(fixture("holling2_after_hopf.json")).unwrap().replace("\"gamma1\": 2.0", "\"gamma1\": -2.0");
    fs::write(&path, text).unwrap();
    let e = run("simulate", &path, dir.path(), &[]).unwrap_err();
    assert!(format!("{e:#}").contains("parameters.gamma1"), "{e:#}");
}
