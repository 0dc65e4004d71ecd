//! End-to-end runs of the `simulate` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const FIG: &str = r#""dimensionless": {"omega0_meV": 11, "eta2": 1.31, "zeta": 0.4, "sigma": 0.0092, "N_tilde": 20}"#;

fn run(mode: &str, config: &str) -> (TempDir, PathBuf, Output) {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, config).unwrap();
    let out_dir = dir.path().join("out");
    let out = Command::new(env!("CARGO_BIN_EXE_simulate"))
        .args([mode, "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    (dir, out_dir, out)
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn spectrum_writes_csv_and_script() {
    let (_tmp, out, o) = run("spectrum", &format!(r#"{{{FIG}, "sweep": {{"param": "sigma_ratio", "from": 0, "to": 2, "points": 5}}}}"#));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = read(&out, "spectrum_cm.csv");
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("sigma_ratio,"));
    assert_eq!(lines.count(), 5);
    assert!(!csv.contains('\r'));
    assert!(read(&out, "spectrum_sym.gp").contains("spectrum_sym.csv"));
}

#[test]
fn supercritical_compare_exits_zero_and_flags_overflow() {
    let (_tmp, out, o) = run("compare", &format!(r#"{{{FIG}, "time": {{"t_max": 400, "points": 801}}}}"#));
    assert_eq!(o.status.code(), Some(0));
    let summary: serde_json::Value = serde_json::from_str(&read(&out, "compare_summary.json")).unwrap();
    assert_eq!(summary["cm_diverged"], true);
    assert_eq!(summary["cm_divergence_predicted"], true);
    assert_eq!(summary["sym_positive"], true);
    assert!(read(&out, "compare.csv").contains("true"));
}

#[test]
fn unknown_key_is_a_config_error() {
    let (_tmp, _, o) = run("evolve", &format!(r#"{{{FIG}, "tiem": {{"t_max": 1, "points": 3}}}}"#));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("tiem"));
}

#[test]
fn zero_duration_is_a_config_error() {
    let (_tmp, _, o) = run("evolve", &format!(r#"{{{FIG}, "time": {{"t_max": 0, "points": 3}}}}"#));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_config_file_is_a_config_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_simulate"))
        .args(["spectrum", "--config", "/nonexistent/run.json"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn energy_below_threshold_is_rejected_with_the_config() {
    let (_tmp, _, o) = run(
        "partition",
        r#"{"physical": {}, "partition": {"N_tilde": {"from": 0, "to": 10, "points": 3},
            "hbar_omega0_meV": {"from": 1, "to": 5, "points": 3}}}"#,
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("hbar_omega0_meV"));
}

#[test]
fn bad_thread_count_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, format!("{{{FIG}}}")).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_simulate"))
        .args(["rates-dump", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .env("LINDBLAD_KIT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn rates_dump_separates_blocks() {
    let (_tmp, out, o) = run("rates-dump", &format!("{{{FIG}}}"));
    assert_eq!(o.status.code(), Some(0));
    let csv = read(&out, "rates_dump.csv");
    let entry = |scheme: &str, part: &str, row: usize, col: usize| -> (f64, f64) {
        let prefix = format!("{scheme},{part},{row},{col},");
        let line = csv.lines().find(|l| l.starts_with(&prefix)).unwrap();
        let f: Vec<f64> = line[prefix.len()..].split(',').map(|x| x.parse().unwrap()).collect();
        (f[0], f[1])
    };
    // SYM leaves populations and coherences uncoupled
    for (r, c) in [(1, 2), (1, 3), (2, 1), (3, 1), (4, 2), (2, 4)] {
        assert_eq!(entry("SYM", "total", r, c), (0.0, 0.0), "({r},{c})");
    }
    // CM feeds populations into coherences and mixes rho12 with rho21
    for (r, c) in [(2, 1), (3, 1), (2, 4), (3, 4), (2, 3), (3, 2)] {
        assert!(entry("CM", "total", r, c).0.abs() > 0.1, "({r},{c})");
    }
    // free part carries the level splitting on the coherence diagonal
    assert_eq!(entry("SYM", "free", 2, 2), (0.0, 1.0));
    assert_eq!(entry("SYM", "free", 3, 3), (0.0, -1.0));
}
