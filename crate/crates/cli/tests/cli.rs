use std::fs;
use std::path::Path;
use std::process::Command;

use tdcrack_cli::{preset, ExperimentConfig};

fn tdcrack() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tdcrack"))
}

fn small(mut config: ExperimentConfig) -> ExperimentConfig {
    config.grid_resolution = 61;
    config.boundary_nodes = 128;
    config
}

#[test]
fn emitted_preset_reloads_identically() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["ex1", "ex2", "ex3", "ex4"] {
        let path = dir.path().join(format!("{name}.conf"));
        let status = tdcrack()
            .args(["preset", name, "--emit-config"])
            .arg(&path)
            .status()
            .unwrap();
        assert!(status.success());
        assert_eq!(
            ExperimentConfig::load(&path).unwrap(),
            preset(name).unwrap()
        );
    }
}

fn run_into(config_path: &Path, out: &Path) -> std::process::Output {
    tdcrack()
        .args(["run", "--config"])
        .arg(config_path)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

#[test]
fn same_seed_gives_byte_identical_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("ex2.conf");
    fs::write(&config, small(preset("ex2").unwrap()).to_string()).unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(run_into(&config, &a).status.success());
    let out = tdcrack()
        .env("TDCRACK_THREADS", "2")
        .args(["run", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&b)
        .output()
        .unwrap();
    assert!(out.status.success());
    let mut names: Vec<_> = fs::read_dir(&a)
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert!(names.iter().any(|n| n == "map_F_1.2.csv"));
    assert!(names.iter().any(|n| n == "peaks_0.6.csv"));
    for name in names {
        assert_eq!(
            fs::read(a.join(&name)).unwrap(),
            fs::read(b.join(&name)).unwrap(),
            "{name:?} differs"
        );
    }
}

#[test]
fn invalid_config_fails_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.conf");
    let mut text = preset("ex1").unwrap().to_string();
    text = text.replace("frequency = ", "frequency = -");
    fs::write(&config, text).unwrap();
    let out_dir = dir.path().join("out");
    let out = run_into(&config, &out_dir);
    assert!(!out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert_eq!(stderr.lines().count(), 1, "{stderr}");
    assert!(
        stderr.starts_with("error:") && stderr.contains("frequency"),
        "{stderr}"
    );
    assert!(!out_dir.exists());
}

#[test]
fn bad_thread_count_is_rejected() {
    let out = tdcrack()
        .env("TDCRACK_THREADS", "zero")
        .args(["preset", "ex1", "--emit-config", "/dev/null"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("TDCRACK_THREADS"));
}

#[test]
fn ex1_reports_one_peak_at_the_origin() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = preset("ex1").unwrap();
    config.epsilon_ratios = vec![1.0];
    let path = dir.path().join("ex1.conf");
    fs::write(&path, config.to_string()).unwrap();
    let out_dir = dir.path().join("out");
    let out = run_into(&path, &out_dir);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let peaks = fs::read_to_string(out_dir.join("peaks_1.0.csv")).unwrap();
    let rows: Vec<&str> = peaks.lines().skip(1).collect();
    assert_eq!(rows.len(), 1, "{peaks}");
    let fields: Vec<f64> = rows[0]
        .split(',')
        .take(4)
        .map(|f| f.parse().unwrap())
        .collect();
    assert_eq!(&fields[..3], &[1.0, 0.0, 0.0]);
    assert_eq!(fields[3], 1.0);
    let summary = String::from_utf8(out.stdout).unwrap();
    assert!(summary.starts_with("epsilon_ratio,"));
}

#[test]
fn sweep_replaces_the_ratio_list() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ex3.conf");
    fs::write(&path, small(preset("ex3").unwrap()).to_string()).unwrap();
    let out_dir = dir.path().join("out");
    let out = tdcrack()
        .args(["sweep", "--config"])
        .arg(&path)
        .args(["--epsilon-ratios", "0.8,1.5", "--out"])
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(out_dir.join("map_Phi_0.8.pgm").exists());
    assert!(out_dir.join("map_F_1.5.csv").exists());
    assert!(!out_dir.join("map_F_1.0.csv").exists());
    let summary = fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 3);
}
