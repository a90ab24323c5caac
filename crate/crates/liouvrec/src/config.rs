//! Run configuration: a sectioned plain-text file (TOML) with validated
//! defaults, dotted-path overrides, and a content hash for provenance.
//!
//! The default configuration reproduces the benchmark setup: a four-site
//! open chain with `t = 1`, `U = 4`, `mu = 2` at half filling, recursion to
//! `k_max = 30` with exact expectations, and Lorentzian broadening
//! `eta = 0.05` on the grid `[-10, 10]` in steps of `0.01`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::lattice::HubbardChain;
use crate::recursion::SignConvention;

/// Environment variable that re-roots a relative `output_dir`.
pub const OUTPUT_ROOT_ENV: &str = "LIOUVREC_OUTPUT_ROOT";

/// `[model]`: the open-boundary chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    /// Number of lattice sites.
    pub sites: usize,
    /// Hopping amplitude.
    pub t: f64,
    /// On-site repulsion.
    #[serde(rename = "U")]
    pub u: f64,
    /// Chemical potential (`U/2` is half filling).
    pub mu: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self {
            sites: 4,
            t: 1.0,
            u: 4.0,
            mu: 2.0,
        }
    }
}

impl ModelSection {
    /// The lattice model these parameters describe.
    pub fn chain(&self) -> HubbardChain {
        HubbardChain {
            sites: self.sites,
            t: self.t,
            u: self.u,
            mu: self.mu,
        }
    }
}

/// `[recursion]`: iteration depth, tolerances, and seed layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RecursionSection {
    /// Highest iteration index.
    pub k_max: usize,
    /// Termination threshold on the measured `beta^2`; omitted picks the
    /// mode default (`1e-8` exact, `10/sqrt(shots)` sampled).
    pub tol_beta: Option<f64>,
    /// Operator weight-pruning tolerance.
    pub prune_tol: f64,
    /// Liouvillian side convention, `"fh"` or `"hf"`.
    pub sign_convention: SignConvention,
    /// Seed modes (`0..sites` = spin-up sites, `sites..2*sites` =
    /// spin-down). Omitted: one spin-up seed per reflection class of the
    /// chain, i.e. sites `0` and `1` on the four-site benchmark.
    pub seeds: Option<Vec<usize>>,
    /// Site indices whose overlaps are measured each iteration (within the
    /// seed's spin block). Omitted: every site.
    pub offdiag_targets: Option<Vec<usize>>,
    /// Complete the Green's matrix from the reflection symmetry of the
    /// chain instead of seeding every site. Only honored when the prepared
    /// state shares that symmetry (exact ground state); admixed states are
    /// run with every site seeded regardless.
    pub use_symmetry: bool,
}

impl Default for RecursionSection {
    fn default() -> Self {
        Self {
            k_max: 30,
            tol_beta: None,
            prune_tol: crate::pauli::DEFAULT_PRUNE_TOL,
            sign_convention: SignConvention::FH,
            seeds: None,
            offdiag_targets: None,
            use_symmetry: true,
        }
    }
}

impl RecursionSection {
    /// The configured seed modes, or the default one-per-reflection-class
    /// spin-up pair for the given chain length.
    pub fn seed_modes(&self, sites: usize) -> Vec<usize> {
        match &self.seeds {
            Some(seeds) => seeds.clone(),
            None => {
                let mut modes = vec![0];
                if sites > 1 {
                    modes.push(1);
                }
                modes
            }
        }
    }

    /// The configured overlap-target sites, or every site.
    pub fn target_sites(&self, sites: usize) -> Vec<usize> {
        match &self.offdiag_targets {
            Some(targets) => targets.clone(),
            None => (0..sites).collect(),
        }
    }
}

/// `[backend]`: measurement mode and state preparation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BackendSection {
    /// Shots per expectation value; `0` means exact expectations.
    pub shots: u64,
    /// Seed for the shot-noise stream and (derived) the approximate-state
    /// admixture.
    pub rng_seed: u64,
    /// Squared overlap of the prepared state with the exact ground state.
    pub fidelity: f64,
    /// Number of low-lying excited states mixed into an approximate state.
    pub n_mix: usize,
}

impl Default for BackendSection {
    fn default() -> Self {
        Self {
            shots: 0,
            rng_seed: 17,
            fidelity: 1.0,
            n_mix: 6,
        }
    }
}

/// `[spectra]`: frequency grid, broadening, and snapshot depths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectraSection {
    /// Lorentzian broadening width.
    pub eta: f64,
    /// Grid lower edge.
    pub omega_min: f64,
    /// Grid upper edge.
    pub omega_max: f64,
    /// Grid spacing.
    pub omega_step: f64,
    /// Iterations whose spectra are written as files (the final iteration
    /// is always included).
    pub snapshot_k: Vec<usize>,
}

impl Default for SpectraSection {
    fn default() -> Self {
        Self {
            eta: 0.05,
            omega_min: -10.0,
            omega_max: 10.0,
            omega_step: 0.01,
            snapshot_k: vec![6, 30],
        }
    }
}

/// The full run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Directory all outputs are written into (created if missing).
    pub output_dir: Option<PathBuf>,
    /// Model parameters.
    pub model: ModelSection,
    /// Recursion controls.
    pub recursion: RecursionSection,
    /// Measurement backend.
    pub backend: BackendSection,
    /// Spectral grid.
    pub spectra: SpectraSection,
}

/// Statevector paths cap the chain length (`4^sites` amplitudes per
/// sector stack); six sites is the supported maximum.
pub const MAX_SITES: usize = 6;

impl RunConfig {
    /// Parse a config file, apply `key=value` overrides, validate.
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_str_with_overrides(&text, overrides)
    }

    /// Parse config text, apply `key=value` overrides, validate.
    pub fn from_str_with_overrides(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: toml::Table = text
            .parse()
            .map_err(|e| Error::Config(format!("parse error: {e}")))?;
        for entry in overrides {
            apply_override(&mut table, entry)?;
        }
        let config: RunConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e| Error::Config(format!("invalid config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    /// Check every numeric range and index bound.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        let m = &self.model;
        if m.sites == 0 || m.sites > MAX_SITES {
            return fail(format!("model.sites = {} outside 1..={MAX_SITES}", m.sites));
        }
        for (name, v) in [("model.t", m.t), ("model.U", m.u), ("model.mu", m.mu)] {
            if !v.is_finite() {
                return fail(format!("{name} = {v} is not finite"));
            }
        }
        let r = &self.recursion;
        if r.k_max == 0 || r.k_max > 200 {
            return fail(format!("recursion.k_max = {} outside 1..=200", r.k_max));
        }
        if let Some(tol) = r.tol_beta {
            if !(tol.is_finite() && tol > 0.0) {
                return fail(format!("recursion.tol_beta = {tol} must be positive"));
            }
        }
        if !(r.prune_tol.is_finite() && r.prune_tol >= 0.0) {
            return fail(format!(
                "recursion.prune_tol = {} must be >= 0",
                r.prune_tol
            ));
        }
        if let Some(seeds) = &r.seeds {
            if seeds.is_empty() {
                return fail("recursion.seeds must not be empty".into());
            }
            let modes = 2 * m.sites;
            for &s in seeds {
                if s >= modes {
                    return fail(format!("recursion.seeds entry {s} outside 0..{modes}"));
                }
            }
        }
        if let Some(targets) = &r.offdiag_targets {
            for &t in targets {
                if t >= m.sites {
                    return fail(format!(
                        "recursion.offdiag_targets entry {t} outside 0..{}",
                        m.sites
                    ));
                }
            }
        }
        let b = &self.backend;
        if !(b.fidelity > 0.0 && b.fidelity <= 1.0) {
            return fail(format!("backend.fidelity = {} outside (0, 1]", b.fidelity));
        }
        if b.fidelity < 1.0 && b.n_mix == 0 {
            return fail("backend.n_mix must be >= 1 for fidelity < 1".into());
        }
        let s = &self.spectra;
        if !(s.eta.is_finite() && s.eta > 0.0) {
            return fail(format!("spectra.eta = {} must be positive", s.eta));
        }
        if !(s.omega_step.is_finite() && s.omega_step > 0.0) {
            return fail(format!(
                "spectra.omega_step = {} must be positive",
                s.omega_step
            ));
        }
        if !(s.omega_min.is_finite() && s.omega_max.is_finite()) || s.omega_min >= s.omega_max {
            return fail(format!(
                "spectra range [{}, {}] is empty",
                s.omega_min, s.omega_max
            ));
        }
        Ok(())
    }

    /// The output directory after applying the environment override: when
    /// [`OUTPUT_ROOT_ENV`] is set, a relative `output_dir` is joined under
    /// it. Defaults to `liouvrec-output`.
    pub fn resolved_output_dir(&self) -> PathBuf {
        let dir = self
            .output_dir
            .clone()
            .unwrap_or_else(|| PathBuf::from("liouvrec-output"));
        match std::env::var_os(OUTPUT_ROOT_ENV) {
            Some(root) if dir.is_relative() => PathBuf::from(root).join(dir),
            _ => dir,
        }
    }

    /// SHA-256 over the canonical JSON form of the resolved config.
    pub fn content_hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        hex::encode(hasher.finalize())
    }

    /// The frequency grid of the `[spectra]` section.
    pub fn grid(&self) -> crate::greens::FrequencyGrid {
        crate::greens::FrequencyGrid {
            omega_min: self.spectra.omega_min,
            omega_max: self.spectra.omega_max,
            step: self.spectra.omega_step,
            eta: self.spectra.eta,
        }
    }
}

/// Derive the admixture seed from the run seed so one key drives both
/// streams without correlating them (SplitMix64 finalizer).
pub fn derive_state_seed(rng_seed: u64) -> u64 {
    let mut z = rng_seed.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Apply one `section.key=value` override onto the parsed table.
fn apply_override(table: &mut toml::Table, entry: &str) -> Result<()> {
    let (path, raw) = entry
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override {entry:?} is not key=value")))?;
    let path = path.trim();
    let value = parse_override_value(raw.trim())?;
    let mut parts = path.split('.').peekable();
    let mut current = table;
    loop {
        let key = parts
            .next()
            .filter(|k| !k.is_empty())
            .ok_or_else(|| Error::Config(format!("override {entry:?} has an empty key")))?;
        if parts.peek().is_none() {
            current.insert(key.to_string(), value);
            return Ok(());
        }
        current = current
            .entry(key.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("override {entry:?}: {key} is not a section")))?;
    }
}

/// Parse the right-hand side of an override as a TOML literal, falling
/// back to a plain string for unquoted text.
fn parse_override_value(raw: &str) -> Result<toml::Value> {
    let fragment = format!("v = {raw}");
    if let Ok(t) = fragment.parse::<toml::Table>() {
        if let Some(v) = t.get("v") {
            return Ok(v.clone());
        }
    }
    Ok(toml::Value::String(raw.to_string()))
}
