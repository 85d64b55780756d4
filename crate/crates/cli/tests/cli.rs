use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn dtasep(dir: &Path, args: &[&str], config: &str) -> Output {
    let cfg = dir.join("run.toml");
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_dtasep"))
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .arg("--output-dir")
        .arg(dir.join("out"))
        .output()
        .unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

#[test]
fn plateau_report_matches_closed_form_interval() {
    let dir = TempDir::new().unwrap();
    let out = dtasep(
        dir.path(),
        &["plateau"],
        "[law]\nlaw = \"twopoint\"\nr = 0.5\nb = 1.0\np = 0.5\n\n[plateau]\nrho_step = 0.01\n",
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&dir.path().join("out/plateau.json"));
    // mu = 1/r - E[1/alpha] = 2 - 1.5; interval 1/2 -+ mu r / 4.
    let (lo, hi) = (0.5 - 0.5 * 0.5 / 4.0, 0.5 + 0.5 * 0.5 / 4.0);
    assert_eq!(report["plateau_interval"][0].as_f64().unwrap(), lo);
    assert_eq!(report["plateau_interval"][1].as_f64().unwrap(), hi);
    assert_eq!(report["all_consistent"], Value::Bool(true));
    let points = report["points"].as_array().unwrap();
    assert_eq!(points.len(), 99);
    for p in points {
        let rho = p["rho"].as_f64().unwrap();
        let inside = rho >= lo - 1e-12 && rho <= hi + 1e-12;
        assert_eq!(p["status"] == "PASS", inside, "rho = {rho}");
    }
}

#[test]
fn homogeneous_flux_curve_tracks_parabola() {
    let dir = TempDir::new().unwrap();
    let out = dtasep(
        dir.path(),
        &["flux-curve"],
        "[law]\nlaw = \"point\"\nr = 1.0\n\n[flux-curve]\nsites = 256\nrho = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]\nburn_in = 20000.0\nwindow = 10000.0\n",
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = csv_rows(&dir.path().join("out/flux_curve.csv"));
    for name in ["law", "L", "rho", "burn_in", "window", "estimate", "sem", "batches"] {
        assert!(header.iter().any(|h| h == name), "missing column {name}");
    }
    let (ic, ie, is, ip) = (column(&header, "rho"), column(&header, "estimate"), column(&header, "sem"), column(&header, "particles"));
    let mut best = (0.0, f64::NEG_INFINITY);
    for row in &rows {
        let rho: f64 = row[ic].parse().unwrap();
        let est: f64 = row[ie].parse().unwrap();
        let sem: f64 = row[is].parse().unwrap();
        let n: f64 = row[ip].parse().unwrap();
        let exact = n * (256.0 - n) / (256.0 * 255.0);
        assert!((est - exact).abs() <= 4.0 * sem + 1e-12, "rho {rho}: {est} vs {exact} (sem {sem})");
        assert!((est - rho * (1.0 - rho)).abs() < 0.01, "rho {rho}: {est}");
        if est > best.1 {
            best = (rho, est);
        }
    }
    assert_eq!(rows.len(), 9);
    assert_eq!(best.0, 0.5);
}

#[test]
fn density_of_one_is_rejected_by_name() {
    let dir = TempDir::new().unwrap();
    let out = dtasep(dir.path(), &["flux-curve"], "[flux-curve]\nrho = [0.5, 1.0]\n");
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("flux-curve.rho"), "{err}");
    assert!(!dir.path().join("out").exists());
}

#[test]
fn unknown_key_is_a_validation_error() {
    let dir = TempDir::new().unwrap();
    let out = dtasep(dir.path(), &["plateau"], "[plateau]\nrho_stride = 0.1\n");
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("rho_stride"));
}

#[test]
fn oversized_table_is_a_resource_error() {
    let dir = TempDir::new().unwrap();
    let out = dtasep(
        dir.path(),
        &["coupling-audit"],
        "[coupling-audit]\nsamples = 1000\npath_n = 100000\npath_replicas = 2\n",
    );
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

fn artifacts(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "manifest.json")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn run_with_workers(config: &str, experiment: &str, workers: &str) -> (TempDir, Vec<(String, Vec<u8>)>) {
    let dir = TempDir::new().unwrap();
    let out = dtasep(dir.path(), &[experiment, "--workers", workers], config);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let files = artifacts(&dir.path().join("out"));
    (dir, files)
}

#[test]
fn outputs_do_not_depend_on_worker_count() {
    let lpp = "[lpp-tau]\nx = [0.0, 1.0]\ny = [1.0, 1.0]\nsizes = [20, 40]\nreplicas = 6\n";
    let (_a, one) = run_with_workers(lpp, "lpp-tau", "1");
    let (_b, three) = run_with_workers(lpp, "lpp-tau", "3");
    assert_eq!(one, three);

    let curve = "[flux-curve]\nsites = 32\nrho = [0.25, 0.5]\nburn_in = 50.0\nwindow = 200.0\nrealizations = 3\n";
    let (_c, one) = run_with_workers(curve, "flux-curve", "1");
    let (_d, four) = run_with_workers(curve, "flux-curve", "4");
    assert_eq!(one, four);
    let (_e, again) = run_with_workers(curve, "flux-curve", "1");
    assert_eq!(one, again);
}

#[test]
fn manifest_echoes_config_and_hashes_outputs() {
    let dir = TempDir::new().unwrap();
    let out = dtasep(dir.path(), &["env-sample", "--master-seed", "11"], "[env-sample]\ni_min = -5\ni_max = 20\n");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest = read_json(&dir.path().join("out/manifest.json"));
    assert_eq!(manifest["master_seed"], 11);
    for o in manifest["outputs"].as_array().unwrap() {
        let bytes = fs::read(dir.path().join("out").join(o["file"].as_str().unwrap())).unwrap();
        assert_eq!(o["sha256"].as_str().unwrap(), dtasep_cli::output::content_hash(&bytes));
    }
    let first = artifacts(&dir.path().join("out"));
    let (header, rows) = csv_rows(&dir.path().join("out/env.csv"));
    assert_eq!(header, ["i", "alpha"]);
    assert_eq!(rows.len(), 26);

    // Re-running from the echoed config alone gives the same artifacts.
    let echoed = manifest["config"].as_str().unwrap().to_string();
    let again = TempDir::new().unwrap();
    let out = dtasep(again.path(), &["env-sample"], &echoed);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(artifacts(&again.path().join("out")), first);
}

#[test]
fn dry_run_prints_canonical_config() {
    let dir = TempDir::new().unwrap();
    let out = dtasep(dir.path(), &["plateau", "--dry-run", "--workers", "2"], "");
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("experiment = \"plateau\""), "{text}");
    assert!(text.contains("[law]") && text.contains("[plateau]"), "{text}");
    assert!(text.contains("workers = 2"));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn verify_reports_and_sets_exit_status() {
    let out = Command::new(env!("CARGO_BIN_EXE_dtasep"))
        .args(["verify", "--criteria", "5,6"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 2, "{text}");

    let out = Command::new(env!("CARGO_BIN_EXE_dtasep"))
        .args(["verify", "--criteria", "9"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_with_validation_status() {
    let out = Command::new(env!("CARGO_BIN_EXE_dtasep"))
        .args(["plateau", "--master-seed", "not-a-number"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = Command::new(env!("CARGO_BIN_EXE_dtasep")).arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}
