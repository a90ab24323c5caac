//! End-to-end tests of the `liouvrec` binary: exit codes, file layout,
//! environment re-rooting, and run-to-run determinism.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_liouvrec"))
}

fn run_ok(output: &Output) {
    assert!(
        output.status.success(),
        "exit {:?}\nstdout: {}\nstderr: {}",
        output.status.code(),
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

fn write_config(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

const SMALL: &str = "\
[model]
sites = 2

[recursion]
k_max = 8

[spectra]
snapshot_k = [4]
";

#[test]
fn run_produces_complete_output_tree() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "run.toml", SMALL);
    let out_dir = tmp.path().join("out");
    let output = bin()
        .args(["run"])
        .arg(&config)
        .arg("--set")
        .arg(format!("output_dir={}", out_dir.display()))
        .output()
        .unwrap();
    run_ok(&output);
    for name in [
        "manifest.json",
        "coefficients.json",
        "convergence.csv",
        "energy.csv",
    ] {
        assert!(out_dir.join(name).is_file(), "missing {name}");
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["status"], "ok");
    // Every inventoried file exists with the recorded checksum intact.
    for entry in manifest["files"].as_array().unwrap() {
        let name = entry["name"].as_str().unwrap();
        assert!(out_dir.join(name).is_file(), "inventoried {name} missing");
    }
}

#[test]
fn malformed_config_exits_2_without_partial_output() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "bad.toml", "[model\nsites = 2");
    let out_dir = tmp.path().join("never");
    let output = bin()
        .args(["run"])
        .arg(&config)
        .arg("--set")
        .arg(format!("output_dir={}", out_dir.display()))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(!output.stderr.is_empty(), "expected a diagnostic on stderr");
    assert!(
        !out_dir.exists(),
        "no output may be written for a bad config"
    );
}

#[test]
fn invalid_parameter_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "invalid.toml", "[model]\nsites = 9\n");
    let output = bin().args(["run"]).arg(&config).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn oracle_writes_reference_spectra() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "oracle.toml", SMALL);
    let out_dir = tmp.path().join("oracle-out");
    let output = bin()
        .args(["oracle"])
        .arg(&config)
        .arg("--set")
        .arg(format!("output_dir={}", out_dir.display()))
        .output()
        .unwrap();
    run_ok(&output);
    let oracle: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("oracle.json")).unwrap())
            .unwrap();
    // Two-site half-filled singlet: E0 = (U - sqrt(U^2 + 16 t^2))/2 - mu N.
    let expected = (4.0 - 32.0_f64.sqrt()) / 2.0 - 2.0 * 2.0;
    let e0 = oracle["e0"].as_f64().unwrap();
    assert!(
        (e0 - expected).abs() < 1e-9,
        "e0 = {e0}, expected {expected}"
    );
    assert_eq!(oracle["elements"].as_array().unwrap().len(), 4);
}

#[test]
fn report_on_empty_directory_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let output = bin().args(["report"]).arg(tmp.path()).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(!output.stderr.is_empty());
}

#[test]
fn report_writes_figures_and_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "noisy.toml",
        "[recursion]\nk_max = 8\n\n[backend]\nshots = 4000\nfidelity = 0.963\n\n[spectra]\nsnapshot_k = [4]\n",
    );
    let runs = tmp.path().join("runs");
    let output = bin()
        .args(["run"])
        .arg(&config)
        .arg("--set")
        .arg(format!("output_dir={}", runs.join("noisy").display()))
        .output()
        .unwrap();
    run_ok(&output);

    let output = bin().args(["report"]).arg(&runs).output().unwrap();
    run_ok(&output);
    for name in [
        "fig2c.csv",
        "fig2d.csv",
        "fig3.csv",
        "fig1_energy.csv",
        "summary.txt",
    ] {
        assert!(runs.join(name).is_file(), "missing {name}");
    }
    let fig3 = std::fs::read_to_string(runs.join("fig3.csv")).unwrap();
    assert!(
        fig3.contains("# run=noisy slope="),
        "fit header missing:\n{fig3}"
    );
    let summary = std::fs::read_to_string(runs.join("summary.txt")).unwrap();
    assert!(
        summary.contains("noisy"),
        "summary does not mention the run"
    );
}

#[test]
fn output_root_environment_variable_reroots_relative_paths() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "rooted.toml",
        &format!("output_dir = \"nested/out\"\n\n{SMALL}"),
    );
    let root = tmp.path().join("root");
    let output = bin()
        .args(["run"])
        .arg(&config)
        .env("LIOUVREC_OUTPUT_ROOT", &root)
        .output()
        .unwrap();
    run_ok(&output);
    assert!(root.join("nested/out/manifest.json").is_file());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("same");
    let config = write_config(
        tmp.path(),
        "same.toml",
        &format!("output_dir = \"{}\"\n\n{SMALL}", out_dir.display()),
    );
    let first = bin().args(["run"]).arg(&config).output().unwrap();
    run_ok(&first);
    let coeffs_a = std::fs::read(out_dir.join("coefficients.json")).unwrap();
    let conv_a = std::fs::read(out_dir.join("convergence.csv")).unwrap();
    let second = bin().args(["run"]).arg(&config).output().unwrap();
    run_ok(&second);
    assert_eq!(
        coeffs_a,
        std::fs::read(out_dir.join("coefficients.json")).unwrap()
    );
    assert_eq!(
        conv_a,
        std::fs::read(out_dir.join("convergence.csv")).unwrap()
    );
}

#[test]
fn starved_sampling_reports_partial_results_with_exit_3() {
    // Driving a sampled run past the point where the exact residual norm
    // vanishes makes the noisy norm estimate go negative: with the
    // vanishing tolerance pinned below the shot noise, the run must stop,
    // keep its partial results, and exit with code 3.
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "starved.toml",
        "[model]\nsites = 2\n\n[recursion]\nk_max = 20\ntol_beta = 1e-12\n\n[backend]\nshots = 100\n\n[spectra]\nsnapshot_k = [4]\n",
    );
    let out_dir = tmp.path().join("starved");
    let output = bin()
        .args(["run"])
        .arg(&config)
        .arg("--set")
        .arg(format!("output_dir={}", out_dir.display()))
        .output()
        .unwrap();
    assert_eq!(
        output.status.code(),
        Some(3),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
    // Partial results must still be on disk with a truthful manifest.
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["status"], "negative_norm");
    assert!(out_dir.join("convergence.csv").is_file());
    assert!(!manifest["errors"].as_array().unwrap().is_empty());
}
