//! Aggregation of one or more pipeline runs into figure-ready CSV files
//! and a plain-text pass/fail summary.
//!
//! The input is a directory that either is a run output itself or contains
//! run outputs as immediate subdirectories. Emitted files:
//!
//! * `fig2c.csv` — operator support `p` vs iteration `k` per run;
//! * `fig2d.csv` — convergence distance `d` vs `k` per run;
//! * `fig3.csv`  — `d` vs `p` over even iterations with the fitted
//!   power-law slope per run (as leading comment lines);
//! * `fig1_energy.csv` — total-energy estimate vs `k` with the exact
//!   baselines;
//! * `summary.txt` — pass/fail lines against the library's quality
//!   thresholds.

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::metrics::log_log_fit;
use crate::pipeline::{write_atomic, RunManifest};

/// Energy agreement required of an exact-ground-state run.
pub const ENERGY_TOL: f64 = 1e-3;
/// Acceptable band for the fitted log-log slope of `d` vs `p`.
pub const SLOPE_BAND: (f64, f64) = (-0.5, -0.15);
/// Even-iteration window for the power-law fit.
pub const FIT_WINDOW: (usize, usize) = (2, 14);

/// One parsed `convergence.csv` row.
#[derive(Debug, Clone)]
struct Row {
    k: usize,
    even: bool,
    d: Option<f64>,
    p: usize,
    e_gm: Option<f64>,
    e_expect: Option<f64>,
}

/// One run directory's data.
struct RunData {
    name: String,
    fidelity: f64,
    shots: u64,
    status: String,
    ground_energy: f64,
    energy_expectation: f64,
    checksum_ok: bool,
    rows: Vec<Row>,
}

/// What `execute_report` produced.
#[derive(Debug)]
pub struct ReportOutcome {
    /// Directory the aggregation files were written into.
    pub report_dir: PathBuf,
    /// Number of runs aggregated.
    pub runs: usize,
    /// Number of `FAIL:` lines in the summary.
    pub failures: usize,
}

/// Aggregate every run found under `dir`.
pub fn execute_report(dir: &Path) -> Result<ReportOutcome> {
    let runs = collect_runs(dir)?;
    if runs.is_empty() {
        return Err(Error::Config(format!(
            "report: no run outputs (convergence.csv) found under {}",
            dir.display()
        )));
    }

    write_atomic(dir, "fig2c.csv", &fig2c(&runs))?;
    write_atomic(dir, "fig2d.csv", &fig2d(&runs))?;
    write_atomic(dir, "fig3.csv", &fig3(&runs))?;
    write_atomic(dir, "fig1_energy.csv", &fig1_energy(&runs))?;
    let summary = summary(&runs);
    let failures = summary.lines().filter(|l| l.starts_with("FAIL:")).count();
    write_atomic(dir, "summary.txt", &summary)?;

    Ok(ReportOutcome {
        report_dir: dir.to_path_buf(),
        runs: runs.len(),
        failures,
    })
}

/// Find run directories: `dir` itself or its immediate children, sorted by
/// name for deterministic output.
fn collect_runs(dir: &Path) -> Result<Vec<RunData>> {
    let mut candidates = Vec::new();
    if dir.join("convergence.csv").is_file() {
        candidates.push(dir.to_path_buf());
    } else if dir.is_dir() {
        for entry in std::fs::read_dir(dir)? {
            let path = entry?.path();
            if path.is_dir() && path.join("convergence.csv").is_file() {
                candidates.push(path);
            }
        }
    }
    candidates.sort();
    candidates.into_iter().map(|p| load_run(&p)).collect()
}

fn load_run(dir: &Path) -> Result<RunData> {
    let name = dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| dir.display().to_string());
    let manifest_text = std::fs::read_to_string(dir.join("manifest.json"))
        .map_err(|e| Error::Config(format!("report: {}: manifest.json: {e}", dir.display())))?;
    let manifest: RunManifest = serde_json::from_str(&manifest_text)?;
    let convergence = std::fs::read_to_string(dir.join("convergence.csv"))?;
    let checksum_ok = manifest
        .files
        .iter()
        .find(|f| f.name == "convergence.csv")
        .is_some_and(|entry| {
            let mut hasher = Sha256::new();
            hasher.update(convergence.as_bytes());
            hex::encode(hasher.finalize()) == entry.sha256
        });
    let rows = parse_convergence(&convergence)?;
    Ok(RunData {
        name,
        fidelity: manifest.config.backend.fidelity,
        shots: manifest.config.backend.shots,
        status: manifest.status,
        ground_energy: manifest.ground_energy,
        energy_expectation: manifest.energy_expectation,
        checksum_ok,
        rows,
    })
}

fn parse_convergence(text: &str) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for line in text.lines().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::Config(format!(
                "report: malformed convergence row {line:?}"
            )));
        }
        let parse_opt = |s: &str| -> Option<f64> { s.parse().ok() };
        rows.push(Row {
            k: fields[0]
                .parse()
                .map_err(|_| Error::Config(format!("report: bad k in {line:?}")))?,
            even: fields[1] == "1",
            d: parse_opt(fields[2]),
            p: fields[3]
                .parse()
                .map_err(|_| Error::Config(format!("report: bad p in {line:?}")))?,
            e_gm: parse_opt(fields[4]),
            e_expect: parse_opt(fields[5]),
        });
    }
    Ok(rows)
}

fn opt_cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

/// Operator support vs iteration.
fn fig2c(runs: &[RunData]) -> String {
    let mut out = String::from("run,fidelity,shots,k,even,p\n");
    for run in runs {
        for row in &run.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                run.name,
                run.fidelity,
                run.shots,
                row.k,
                u8::from(row.even),
                row.p
            ));
        }
    }
    out
}

/// Convergence distance vs iteration.
fn fig2d(runs: &[RunData]) -> String {
    let mut out = String::from("run,fidelity,shots,k,even,d\n");
    for run in runs {
        for row in &run.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                run.name,
                run.fidelity,
                run.shots,
                row.k,
                u8::from(row.even),
                opt_cell(row.d)
            ));
        }
    }
    out
}

/// The even-iteration fit points of one run, as (p, d).
fn fit_points(run: &RunData) -> (Vec<f64>, Vec<f64>) {
    let mut ps = Vec::new();
    let mut ds = Vec::new();
    for row in &run.rows {
        if row.even && row.k >= FIT_WINDOW.0 && row.k <= FIT_WINDOW.1 {
            if let Some(d) = row.d {
                if d > 0.0 && row.p > 0 {
                    ps.push(row.p as f64);
                    ds.push(d);
                }
            }
        }
    }
    (ps, ds)
}

/// Distance vs operator support over even iterations, with fitted slopes.
fn fig3(runs: &[RunData]) -> String {
    let mut header = String::new();
    let mut body = String::from("run,fidelity,shots,k,d,p\n");
    for run in runs {
        let (ps, ds) = fit_points(run);
        match log_log_fit(&ps, &ds) {
            Ok(fit) if ps.len() >= 2 => header.push_str(&format!(
                "# run={} slope={} r_squared={}\n",
                run.name, fit.slope, fit.r_squared
            )),
            _ => header.push_str(&format!("# run={} slope=unavailable\n", run.name)),
        }
        for row in &run.rows {
            if row.even {
                if let Some(d) = row.d {
                    body.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        run.name, run.fidelity, run.shots, row.k, d, row.p
                    ));
                }
            }
        }
    }
    header + &body
}

/// Total-energy estimates vs iteration with the exact baselines.
fn fig1_energy(runs: &[RunData]) -> String {
    let mut out = String::from("run,fidelity,shots,k,even,e_gm,e_expect,e0\n");
    for run in runs {
        for row in &run.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                run.name,
                run.fidelity,
                run.shots,
                row.k,
                u8::from(row.even),
                opt_cell(row.e_gm),
                opt_cell(row.e_expect),
                run.ground_energy
            ));
        }
    }
    out
}

/// Minimum even-iteration distance of a run (its distance floor).
fn distance_floor(run: &RunData) -> Option<f64> {
    run.rows
        .iter()
        .filter(|r| r.even)
        .filter_map(|r| r.d)
        .fold(None, |acc, d| Some(acc.map_or(d, |m: f64| m.min(d))))
}

/// Pass/fail lines against the quality thresholds.
fn summary(runs: &[RunData]) -> String {
    let mut lines = Vec::new();
    for run in runs {
        let final_row = run.rows.last();
        lines.push(format!(
            "INFO: run {}: fidelity={} shots={} status={} iterations={}",
            run.name,
            run.fidelity,
            run.shots,
            run.status,
            final_row.map_or(0, |r| r.k)
        ));
        if !run.checksum_ok {
            lines.push(format!(
                "FAIL: run {}: convergence.csv does not match its manifest checksum",
                run.name
            ));
        }

        // Energy agreement for exact-ground-state runs.
        if run.fidelity == 1.0 && run.shots == 0 {
            let best = run
                .rows
                .iter()
                .rev()
                .find(|r| r.even && r.e_gm.is_some())
                .and_then(|r| r.e_gm);
            match best {
                Some(e_gm) => {
                    let diff = (e_gm - run.ground_energy).abs();
                    let verdict = if diff <= ENERGY_TOL { "PASS" } else { "FAIL" };
                    lines.push(format!(
                        "{verdict}: run {}: |E_GM - E0| = {diff:.3e} (tolerance {ENERGY_TOL:.0e})",
                        run.name
                    ));
                }
                None => lines.push(format!(
                    "INFO: run {}: no even-iteration energy available",
                    run.name
                )),
            }
        }

        // Energy improvement over the raw expectation for admixed states.
        if run.fidelity < 1.0 && run.shots == 0 {
            let baseline = (run.energy_expectation - run.ground_energy).abs();
            let mut improved = true;
            let mut seen = false;
            for row in run
                .rows
                .iter()
                .filter(|r| r.even && r.k >= 2 && r.k <= 6 && r.e_gm.is_some())
            {
                seen = true;
                let diff = (row.e_gm.unwrap() - run.ground_energy).abs();
                if diff >= baseline {
                    improved = false;
                }
            }
            if seen {
                let verdict = if improved { "PASS" } else { "FAIL" };
                lines.push(format!(
                    "{verdict}: run {}: |E_GM(k) - E0| < |<H> - E0| = {baseline:.3e} for even k in [2, 6]",
                    run.name
                ));
            }
        }

        // Power-law slope.
        let (ps, ds) = fit_points(run);
        if ps.len() >= 2 {
            if let Ok(fit) = log_log_fit(&ps, &ds) {
                let in_band = fit.slope >= SLOPE_BAND.0 && fit.slope <= SLOPE_BAND.1;
                let verdict = if in_band { "PASS" } else { "FAIL" };
                lines.push(format!(
                    "{verdict}: run {}: log-log slope of d vs p = {:.4} (band [{}, {}])",
                    run.name, fit.slope, SLOPE_BAND.0, SLOPE_BAND.1
                ));
            }
        } else {
            lines.push(format!(
                "INFO: run {}: too few even-iteration points for a slope fit",
                run.name
            ));
        }
    }

    // Distance floors ordered inversely with fidelity across runs.
    let mut floors: Vec<(f64, f64, &str)> = runs
        .iter()
        .filter(|r| r.shots == 0)
        .filter_map(|r| distance_floor(r).map(|f| (r.fidelity, f, r.name.as_str())))
        .collect();
    floors.sort_by(|a, b| a.0.total_cmp(&b.0));
    let fidelities: std::collections::BTreeSet<String> =
        floors.iter().map(|(f, _, _)| format!("{f}")).collect();
    if fidelities.len() >= 2 {
        let ordered = floors.windows(2).all(|w| w[0].1 >= w[1].1);
        let verdict = if ordered { "PASS" } else { "FAIL" };
        let detail: Vec<String> = floors
            .iter()
            .map(|(f, d, name)| format!("{name}: fidelity {f} floor {d:.3e}"))
            .collect();
        lines.push(format!(
            "{verdict}: distance floors ordered inversely with fidelity ({})",
            detail.join("; ")
        ));
    }

    lines.push(String::new());
    lines.join("\n")
}
