//! End-to-end checks of the binary: flag handling, exit codes, output
//! formats, and byte-level determinism of file outputs.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn aggrate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aggrate"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).expect("output file exists")
}

#[test]
fn ratefn_reports_exact_value_with_intermediates() {
    let v = stdout_json(&aggrate(&["ratefn", "--p", "0.1", "--r", "1", "--arm", "exact"]));
    assert_eq!(v["command"], "ratefn");
    assert!((v["decay_rate"].as_f64().unwrap() - 0.510825624).abs() < 1e-9);
    assert!((v["rho"].as_f64().unwrap() - 0.1).abs() < 1e-12);
    assert!((v["alpha"].as_f64().unwrap() - 0.8).abs() < 1e-12);
    assert_eq!(v["distortion"].as_f64().unwrap(), 0.0);
}

#[test]
fn ratefn_infinite_rate_renders_as_inf() {
    let v = stdout_json(&aggrate(&["ratefn", "--p", "0", "--r", "1", "--arm", "exact"]));
    assert_eq!(v["decay_rate"], "inf");
}

#[test]
fn ratefn_level0_closed_form() {
    let v = stdout_json(&aggrate(&["ratefn", "--p", "0.1", "--r", "0", "--arm", "level0"]));
    assert!((v["decay_rate"].as_f64().unwrap() - 0.443614196).abs() < 1e-9);
}

#[test]
fn ratefn_gaussian_arm() {
    let v = stdout_json(&aggrate(&["ratefn", "--p", "0.1", "--r", "1", "--arm", "gaussian"]));
    assert!((v["decay_rate"].as_f64().unwrap() - 8.0 / 9.0).abs() < 1e-9);
}

#[test]
fn ratefn_domain_error_names_bound_and_exits_2() {
    let out = aggrate(&["ratefn", "--p", "0.7", "--r", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("outside [0, 0.5)"), "stderr: {err}");
}

#[test]
fn ratefn_exact_rejects_zero_rate() {
    let out = aggrate(&["ratefn", "--p", "0.1", "--r", "0", "--arm", "exact"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_writes_csv_with_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("sweep.csv");
    let out = aggrate(&[
        "sweep", "--p-min", "0.1", "--p-max", "0.3", "--p-step", "0.1", "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let body = read(&out_path);
    let lines: Vec<&str> = body.lines().collect();
    assert_eq!(lines[0], "p,r_star,r_dagger,i_star,i_dagger,r_star_gauss");
    assert_eq!(lines.len(), 4);
    // p = 0.3 sits in the zero-rate regime.
    let last: Vec<&str> = lines[3].split(',').collect();
    assert_eq!(last[1], "0");
    assert!((last[3].parse::<f64>().unwrap() - 0.110903549).abs() < 1e-8);
    let manifest: Value =
        serde_json::from_str(&read(&out_path.with_file_name("sweep.csv.manifest.json"))).unwrap();
    assert_eq!(manifest["command"], "sweep");
    assert_eq!(manifest["csv_schema_version"], 1);
}

#[test]
fn sweep_exact_only_leaves_gauss_column_empty() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("sweep.csv");
    let out = aggrate(&[
        "sweep", "--p-min", "0.2", "--p-max", "0.2", "--p-step", "0.1", "--arms", "exact",
        "--out", out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let body = read(&out_path);
    let row = body.lines().nth(1).unwrap();
    assert!(row.ends_with(','), "row: {row}");
}

#[test]
fn sweep_empty_range_is_usage_error() {
    let out = aggrate(&[
        "sweep", "--p-min", "0.3", "--p-max", "0.1", "--p-step", "0.05", "--out", "/tmp/x.csv",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_range_outside_noise_domain_is_rejected() {
    let out = aggrate(&[
        "sweep", "--p-min", "0.4", "--p-max", "0.6", "--p-step", "0.1", "--out", "/tmp/x.csv",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn critical_reports_thresholds() {
    let v = stdout_json(&aggrate(&["critical"]));
    let p0 = v["p0"].as_f64().unwrap();
    let p1 = v["p1"].as_f64().unwrap();
    assert!((p0 - 0.211).abs() <= 0.001, "p0 = {p0}");
    assert!((p1 - 0.024).abs() <= 0.001, "p1 = {p1}");
    assert!(p1 < p0);
}

#[test]
fn simulate_single_rate_row() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("sim.csv");
    let out = aggrate(&[
        "simulate", "--c", "1", "--p", "0.3", "--r", "1.0", "--trials", "1000", "--seed", "5",
        "--out", out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let body = read(&out_path);
    let lines: Vec<&str> = body.lines().collect();
    assert_eq!(lines[0], "r,l,rho,p_hat,ci95,p_exact");
    assert_eq!(lines.len(), 2);
    let cols: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(cols[1], "1");
    assert!((cols[5].parse::<f64>().unwrap() - 0.3).abs() < 1e-9);
}

#[test]
fn simulate_rerun_is_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |out: &Path, threads: &str| {
        vec![
            "--threads".to_string(),
            threads.to_string(),
            "simulate".to_string(),
            "--c".to_string(),
            "20".to_string(),
            "--p".to_string(),
            "0.2".to_string(),
            "--r-min".to_string(),
            "0.2".to_string(),
            "--r-max".to_string(),
            "1.0".to_string(),
            "--r-step".to_string(),
            "0.2".to_string(),
            "--trials".to_string(),
            "20000".to_string(),
            "--seed".to_string(),
            "9".to_string(),
            "--out".to_string(),
            out.display().to_string(),
        ]
    };
    let run = |out: &Path, threads: &str| {
        let status = Command::new(env!("CARGO_BIN_EXE_aggrate"))
            .args(args(out, threads))
            .status()
            .unwrap();
        assert!(status.success());
    };
    run(&a, "1");
    run(&b, "2");
    assert_eq!(read(&a), read(&b), "thread count changed simulation bytes");
}

#[test]
fn simulate_zero_trials_is_usage_error() {
    let out = aggrate(&[
        "simulate", "--c", "10", "--p", "0.1", "--r", "1.0", "--trials", "0", "--out", "/tmp/x.csv",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_requires_exactly_one_grid_form() {
    let out = aggrate(&[
        "simulate", "--c", "10", "--p", "0.1", "--r", "1.0", "--r-min", "0.5", "--r-max", "1.0",
        "--r-step", "0.1", "--trials", "10", "--out", "/tmp/x.csv",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = aggrate(&[
        "simulate", "--c", "10", "--p", "0.1", "--trials", "10", "--out", "/tmp/x.csv",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn figures_writes_three_tables_with_manifests() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        let status = Command::new(env!("CARGO_BIN_EXE_aggrate"))
            .args([
                "figures",
                "--out-dir",
                dir.path().to_str().unwrap(),
                "--p-step",
                "0.05",
                "--fig3-p-step",
                "0.1",
                "--fig3-sim-p-step",
                "0.2",
                "--r-step",
                "0.25",
                "--trials",
                "500",
            ])
            .status()
            .unwrap();
        assert!(status.success());
    };
    run();
    let fig1 = read(&dir.path().join("fig1_levels.csv"));
    let fig2 = read(&dir.path().join("fig2_rates.csv"));
    let fig3 = read(&dir.path().join("fig3_comparison.csv"));
    assert!(fig1.starts_with("p,r_star,r_dagger,i_star,i_dagger,r_star_gauss\n"));
    assert!(fig2.starts_with("p,i_star,i_dagger\n"));
    assert!(fig3.starts_with(
        "p,r_star_exact,r_star_gauss,r_c50_exact,err_c50_exact,r_empirical,err_empirical\n"
    ));
    for name in ["fig1_levels.csv", "fig2_rates.csv", "fig3_comparison.csv"] {
        let manifest = dir.path().join(format!("{name}.manifest.json"));
        assert!(manifest.exists(), "missing manifest for {name}");
    }
    // Simulated cells appear exactly on the coarse subgrid.
    let rows: Vec<&str> = fig3.lines().skip(1).collect();
    let filled: Vec<&str> = rows
        .iter()
        .filter(|row| !row.ends_with(','))
        .copied()
        .collect();
    assert_eq!(filled.len(), 1, "rows: {rows:?}");
    assert!(filled[0].starts_with("0.200000000,"));

    // Re-running reproduces every table byte for byte.
    run();
    assert_eq!(fig1, read(&dir.path().join("fig1_levels.csv")));
    assert_eq!(fig2, read(&dir.path().join("fig2_rates.csv")));
    assert_eq!(fig3, read(&dir.path().join("fig3_comparison.csv")));
}

#[test]
fn fig1_and_sweep_share_the_rate_column() {
    let dir = tempfile::tempdir().unwrap();
    let sweep_path = dir.path().join("sweep.csv");
    let status = Command::new(env!("CARGO_BIN_EXE_aggrate"))
        .args([
            "figures",
            "--out-dir",
            dir.path().to_str().unwrap(),
            "--p-step",
            "0.1",
            "--fig3-p-step",
            "0.3",
            "--fig3-sim-p-step",
            "0.3",
            "--r-step",
            "0.5",
            "--trials",
            "100",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let out = aggrate(&[
        "sweep", "--p-min", "0", "--p-max", "0.45", "--p-step", "0.1", "--out",
        sweep_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let fig1 = read(&dir.path().join("fig1_levels.csv"));
    let sweep = read(&sweep_path);
    let col = |body: &str| -> Vec<String> {
        body.lines()
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap().to_string())
            .collect()
    };
    assert_eq!(col(&fig1), col(&sweep));
}
