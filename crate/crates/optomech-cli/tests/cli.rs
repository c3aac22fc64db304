//! End-to-end checks of the `optomech` binary: exit codes, output schemas,
//! and byte-determinism of sweeps.

use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_optomech");

// Circuit-QED row; the bare optical detuning pre-compensates the
// cross-Kerr shift chi beta^2 so the drive sits on the shifted resonance.
const CIRCUIT_QED: &str = r#"
units = "hz_over_2pi"
delta_c = -1.1757e8
delta_m = 5.2e9
kappa_a = 3.3e7
gamma_b = 3.3e7
chi = 2.5e6

[drive.a]
power_w = 8.93e-17
phase_rad = 0.0
frequency = 5.2e9

[drive.b]
power_w = 4.2e-15
phase_rad = 3.14159265358979
frequency = 5.2e9

[grid.omega]
start = 5.035e9
stop = 5.365e9
count = 101
"#;

/// Caption-style desk-scale config: the modified detuning and coupling are
/// pinned directly.
const DESK: &str = r#"
delta_c = 158.0
delta_m = 158.0
kappa_a = 1.0
gamma_b = 1.0
chi = 0.01
g_eff = 0.5
delta_c2 = 158.0
hbar = 1.0

[drive.a]
power_w = 0.0
phase_rad = 0.0
frequency = 158.0

[drive.b]
power_w = 0.0
phase_rad = 3.14159265358979
frequency = 158.0

[grid.omega]
start = 153.0
stop = 163.0
count = 201

[grid.g_eff]
start = 0.05
stop = 2.5
count = 21

[grid.xi]
start = 0.1
stop = 0.9
count = 9
"#;

fn write_config(dir: &Path, text: &str) -> std::path::PathBuf {
    let path = dir.join("params.toml");
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

#[test]
fn steady_prints_flat_record() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CIRCUIT_QED);
    let out = run(&["steady", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    for key in ["beta_s_real=", "n_a=", "n_b=", "g_eff=", "regime=", "phi_b_constrained="] {
        assert!(text.contains(key), "missing {key} in:\n{text}");
    }
    // beta just past the strong-coupling threshold, one photon in the cavity.
    let beta: f64 = field(&text, "beta_s_real").parse().unwrap();
    assert!((beta - 6.86).abs() < 0.08, "beta = {beta}");
    let n_a: f64 = field(&text, "n_a").parse().unwrap();
    assert!((n_a - 1.0).abs() < 0.02, "n_a = {n_a}");
    assert_eq!(field(&text, "regime"), "strong");
}

fn field<'t>(text: &'t str, key: &str) -> &'t str {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in output"))
}

#[test]
fn steady_json_is_one_object() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CIRCUIT_QED);
    let out = run(&["steady", "--config", cfg.to_str().unwrap(), "--json"]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(value.get("steady_state").is_some());
    assert!(value.get("regime").is_some());
}

#[test]
fn spectrum_csv_schema_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), DESK);
    let csv1 = dir.path().join("a.csv");
    let csv2 = dir.path().join("b.csv");
    for (path, jobs) in [(&csv1, "1"), (&csv2, "4")] {
        let out = run(&[
            "spectrum",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            path.to_str().unwrap(),
            "--jobs",
            jobs,
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read(&csv1).unwrap();
    let b = std::fs::read(&csv2).unwrap();
    assert_eq!(a, b, "spectrum output depends on the parallel schedule");
    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "omega,p_ab,p_ba,theta_vac_a,theta_vac_b,t_ab,t_ba,sigma_ab"
    );
    assert_eq!(lines.count(), 201);
}

#[test]
fn stability_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), DESK);
    // Stable at the critical coupling.
    let out = run(&["stability", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("coefficients="));
    assert!(text.contains("verdict=Stable"));
    // Deep in the non-RWA instability.
    let out = run(&["stability", "--config", cfg.to_str().unwrap(), "--g-eff", "120.0"]);
    assert_eq!(out.status.code(), Some(2));
    // The RWA model stays stable at the same coupling.
    let out = run(&[
        "stability",
        "--config",
        cfg.to_str().unwrap(),
        "--g-eff",
        "120.0",
        "--model",
        "rwa",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn unstable_sweep_needs_override() {
    let dir = tempfile::tempdir().unwrap();
    let text = DESK.replace("g_eff = 0.5", "g_eff = 120.0");
    let cfg = write_config(dir.path(), &text);
    let out = run(&["spectrum", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&["spectrum", "--config", cfg.to_str().unwrap(), "--allow-unstable"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn sweep2d_long_format() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), DESK);
    let out = run(&[
        "sweep2d",
        "--config",
        cfg.to_str().unwrap(),
        "--x",
        "g_eff",
        "--y",
        "xi",
        "--channel",
        "t_ab",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "param1,param2,value");
    assert_eq!(lines.count(), 21 * 9);
}

#[test]
fn regimes_lists_four_tiers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CIRCUIT_QED);
    let out = run(&["regimes", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for tier in ["weak", "strong", "ultrastrong", "deep strong"] {
        assert!(text.contains(tier), "missing {tier}:\n{text}");
    }
}

#[test]
fn acceptance_filter_and_exit() {
    let out = run(&["acceptance", "T2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().filter(|l| l.starts_with("PASS T2.")).count() >= 9);

    // Unknown prefix: empty list, still success.
    let out = run(&["acceptance", "nonexistent"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn reproduce_smoke_run() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("fig6");
    let out = run(&[
        "reproduce",
        "fig6",
        "--out",
        out_dir.to_str().unwrap(),
        "--count",
        "9",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("fig6a.csv").exists());
    assert!(out_dir.join("fig6b.csv").exists());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("peak(s)"), "{text}");

    let out = run(&["reproduce", "nosuchfigure"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_config_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "delta_c = 1.0\n");
    let out = run(&["steady", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn phase_out_of_branch_is_physics_error() {
    let dir = tempfile::tempdir().unwrap();
    // Mechanical phase outside [pi, 1.5pi): cos > 0 breaks the real branch.
    let text = CIRCUIT_QED.replace("phase_rad = 3.14159265358979", "phase_rad = 0.5");
    let cfg = write_config(dir.path(), &text);
    let out = run(&["steady", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}
