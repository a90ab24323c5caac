//! Orchestration and persistence: prepared state → recursion per seed →
//! Green's-matrix assembly per iteration → energies and convergence series
//! → files on disk.
//!
//! Every write is atomic (write-then-rename), every emitted file lands in
//! the manifest with a content checksum, and identical configurations
//! produce byte-identical data files (the manifest differs only in its
//! wall-clock `timings`).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::backend::{exact_ground_state, make_approximate_state, MeasurementBackend};
use crate::config::{derive_state_seed, RunConfig};
use crate::error::{Error, Result};
use crate::greens::{diagonal_density, offdiag_density, SpectralDensity};
use crate::metrics::{
    galitskii_migdal, wasserstein_grid, ConvergenceRecord, GreensColumn, GreensMatrix,
};
use crate::oracle::lehmann_element;
use crate::recursion::{
    run_recursion, NegativeNormPolicy, RecursionOutput, RecursionSettings, TerminationReason,
};

/// One emitted file: name, size, SHA-256.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    /// File name relative to the output directory.
    pub name: String,
    /// Size in bytes.
    pub bytes: u64,
    /// Hex SHA-256 of the contents.
    pub sha256: String,
}

/// Run provenance: configuration, derived quantities, status, timings, and
/// the checksummed file inventory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    /// Crate version that produced the artifact.
    pub artifact_version: String,
    /// SHA-256 of the resolved configuration.
    pub config_hash: String,
    /// The resolved configuration itself.
    pub config: RunConfig,
    /// Seed modes actually run (symmetry handling may widen the list).
    pub effective_seeds: Vec<usize>,
    /// Whether missing Green's columns were completed by reflection.
    pub symmetry_completion: bool,
    /// Admixture seed derived from `backend.rng_seed`; `None` when the
    /// prepared state is the exact ground state.
    pub state_seed: Option<u64>,
    /// Exact ground-state energy of the model.
    pub ground_energy: f64,
    /// Exact `<H>` in the prepared state.
    pub energy_expectation: f64,
    /// `"ok"` or `"negative_norm"`.
    pub status: String,
    /// Errors encountered (also reflected in `status`).
    pub errors: Vec<String>,
    /// Wall-clock seconds per stage.
    pub timings: BTreeMap<String, f64>,
    /// Every emitted file with its checksum.
    pub files: Vec<FileEntry>,
}

/// What `execute_run` leaves behind.
#[derive(Debug)]
pub struct RunArtifacts {
    /// Directory holding all outputs.
    pub output_dir: PathBuf,
    /// The manifest as written.
    pub manifest: RunManifest,
}

impl RunArtifacts {
    /// True when some recursion hit a negative measured norm and was cut
    /// short (the run still writes every completed iteration).
    pub fn aborted(&self) -> bool {
        self.manifest.status == "negative_norm"
    }
}

/// Atomic writer that records checksums for the manifest.
struct OutputWriter {
    dir: PathBuf,
    files: Vec<FileEntry>,
}

impl OutputWriter {
    fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        write_atomic(&self.dir, name, contents)?;
        let mut hasher = Sha256::new();
        hasher.update(contents.as_bytes());
        self.files.push(FileEntry {
            name: name.to_string(),
            bytes: contents.len() as u64,
            sha256: hex::encode(hasher.finalize()),
        });
        Ok(())
    }
}

/// Write-then-rename so readers never observe a half-written file.
pub(crate) fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let tmp = dir.join(format!("{name}.tmp"));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, dir.join(name))?;
    Ok(())
}

/// Render a float for CSV: empty cell for unavailable values.
fn csv_cell(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else {
        String::new()
    }
}

/// The per-seed recursion results plus everything derived from them.
struct RunCore {
    outputs: Vec<RecursionOutput>,
    symmetry_completion: bool,
    records: Vec<ConvergenceRecord>,
    k_series: usize,
}

/// Execute the full pipeline for one configuration.
///
/// Stages: `prepare` (model, state, backend), `recursion` (one run per
/// effective seed), `series` (per-iteration Green's matrices, energies,
/// convergence distances), `spectra` (snapshot curves), `manifest`.
pub fn execute_run(config: &RunConfig) -> Result<RunArtifacts> {
    config.validate()?;
    let dir = config.resolved_output_dir();
    let mut writer = OutputWriter::new(&dir)?;
    let mut timings = BTreeMap::new();
    let mut errors = Vec::new();

    // -- prepare ---------------------------------------------------------
    let stage = Instant::now();
    let model = config.model.chain();
    let h = model.hamiltonian()?;
    let h0 = model.single_particle_matrix();
    let ground = exact_ground_state(&model)?;
    let fidelity = config.backend.fidelity;
    let (state, state_seed) = if fidelity < 1.0 {
        let seed = derive_state_seed(config.backend.rng_seed);
        (
            make_approximate_state(&model, fidelity, config.backend.n_mix, seed)?,
            Some(seed),
        )
    } else {
        (ground.state.clone(), None)
    };
    let energy_expectation = MeasurementBackend::exact(state.clone())
        .expectation_with_error(&h)?
        .0
        .re;
    let backend = if config.backend.shots == 0 {
        MeasurementBackend::exact(state)
    } else {
        MeasurementBackend::sampled(state, config.backend.shots, config.backend.rng_seed)
    };
    timings.insert("prepare".to_string(), stage.elapsed().as_secs_f64());

    // -- recursion -------------------------------------------------------
    let stage = Instant::now();
    let core = run_recursions(config, &model, &h, &backend, fidelity)?;
    for output in &core.outputs {
        if let Some(value) = output.negative_norm_value {
            errors.push(format!(
                "negative norm at iteration {} of seed {}: beta^2 = {value:.6e}",
                output.termination.k + 1,
                output.seed_mode
            ));
        }
    }
    timings.insert("recursion".to_string(), stage.elapsed().as_secs_f64());

    // -- series ----------------------------------------------------------
    let stage = Instant::now();
    let core = assemble_series(config, &model, &h0, &ground, core, energy_expectation)?;
    writer.write(
        "coefficients.json",
        &coefficients_json(&core.outputs, core.symmetry_completion)?,
    )?;
    writer.write("convergence.csv", &convergence_csv(&core.records))?;
    writer.write("energy.csv", &energy_csv(&core.records))?;
    timings.insert("series".to_string(), stage.elapsed().as_secs_f64());

    // -- spectra ---------------------------------------------------------
    let stage = Instant::now();
    write_spectra(config, &core, &mut writer)?;
    timings.insert("spectra".to_string(), stage.elapsed().as_secs_f64());

    // -- manifest --------------------------------------------------------
    let status = if errors.is_empty() {
        "ok".to_string()
    } else {
        "negative_norm".to_string()
    };
    let manifest = RunManifest {
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: config.content_hash(),
        config: config.clone(),
        effective_seeds: core.outputs.iter().map(|o| o.seed_mode).collect(),
        symmetry_completion: core.symmetry_completion,
        state_seed,
        ground_energy: ground.energy,
        energy_expectation,
        status,
        errors,
        timings,
        files: writer.files.clone(),
    };
    let manifest_json = serde_json::to_string_pretty(&manifest)?;
    write_atomic(&dir, "manifest.json", &manifest_json)?;
    Ok(RunArtifacts {
        output_dir: dir,
        manifest,
    })
}

/// Decide the effective seed list and run one recursion per seed.
///
/// Reflection completion is only sound when the prepared state shares the
/// chain's reflection symmetry, i.e. for the exact ground state; admixed
/// states run every spin-up site as a seed instead.
fn run_recursions(
    config: &RunConfig,
    model: &crate::lattice::HubbardChain,
    h: &crate::pauli::OperatorSum,
    backend: &MeasurementBackend,
    fidelity: f64,
) -> Result<RunCore> {
    let sites = model.sites;
    let symmetry_completion = config.recursion.use_symmetry && fidelity == 1.0;
    let seeds: Vec<usize> = if symmetry_completion {
        config.recursion.seed_modes(sites)
    } else {
        (0..sites).collect()
    };
    let settings = RecursionSettings {
        k_max: config.recursion.k_max,
        prune_tol: config.recursion.prune_tol,
        beta_tol: config.recursion.tol_beta,
        on_negative_norm: NegativeNormPolicy::Clamp,
        sign: config.recursion.sign_convention,
        imaginary_guard: fidelity == 1.0,
    };
    let mut outputs = Vec::with_capacity(seeds.len());
    for &seed in &seeds {
        let site = seed % sites;
        let spin_offset = seed - site;
        let targets: Vec<usize> = config
            .recursion
            .target_sites(sites)
            .iter()
            .map(|&s| s + spin_offset)
            .collect();
        outputs.push(run_recursion(h, seed, &targets, backend, &settings)?);
    }
    Ok(RunCore {
        outputs,
        symmetry_completion,
        records: Vec::new(),
        k_series: 0,
    })
}

/// Highest iteration the whole series can reach: bounded by runs that hit
/// `k_max` (deeper coefficients do not exist); runs whose residual
/// vanished stay valid at any depth.
fn series_depth(outputs: &[RecursionOutput]) -> usize {
    let mut closed_max = 0usize;
    let mut open_min = usize::MAX;
    for output in outputs {
        match output.termination.reason {
            TerminationReason::KMaxReached => {
                open_min = open_min.min(output.alphas.len());
            }
            _ => closed_max = closed_max.max(output.alphas.len()),
        }
    }
    if open_min != usize::MAX {
        open_min
    } else {
        closed_max
    }
}

/// Per-iteration Green's matrices, energies, and convergence distances.
fn assemble_series(
    config: &RunConfig,
    model: &crate::lattice::HubbardChain,
    h0: &nalgebra::DMatrix<f64>,
    ground: &crate::backend::GroundState,
    mut core: RunCore,
    energy_expectation: f64,
) -> Result<RunCore> {
    let sites = model.sites;
    let grid = config.grid();
    core.k_series = series_depth(&core.outputs);

    // Converged reference: the exact local spectral density averaged over
    // the seed sites, broadened on the same grid.
    let seed_sites: Vec<usize> = core.outputs.iter().map(|o| o.seed_mode % sites).collect();
    let mut reference: Option<SpectralDensity> = None;
    for &site in &seed_sites {
        let element = lehmann_element(model, ground, site, site)?.broadened(&grid);
        reference = Some(match reference {
            None => element,
            Some(acc) => combine(acc, element),
        });
    }
    let reference = scale(
        reference.expect("at least one seed"),
        1.0 / seed_sites.len() as f64,
    );

    for k in 1..=core.k_series {
        // Site-averaged spectral density of this iteration.
        let mut average: Option<SpectralDensity> = None;
        for output in &core.outputs {
            let cf = output.continued_fraction(k)?;
            let density = diagonal_density(&cf, &grid)?;
            average = Some(match average {
                None => density,
                Some(acc) => combine(acc, density),
            });
        }
        let average = scale(
            average.expect("at least one run"),
            1.0 / core.outputs.len() as f64,
        );
        let wasserstein = wasserstein_grid(&average, &reference)?;

        // Green's matrix of this iteration, completed by reflection when
        // allowed, then the total energy.
        let energy_gm = match greens_at(&core, k, sites) {
            Ok(greens) => galitskii_migdal(&greens, h0).unwrap_or(f64::NAN),
            Err(_) => f64::NAN,
        };

        let first = &core.outputs[0];
        let pauli_count = first.pauli_counts[(k - 1).min(first.pauli_counts.len() - 1)];
        core.records.push(ConvergenceRecord {
            k,
            wasserstein,
            pauli_count,
            energy_gm,
            energy_expectation,
        });
    }
    Ok(core)
}

/// The Green's matrix at iteration `k` from the available columns, with
/// reflection completion when enabled.
fn greens_at(core: &RunCore, k: usize, sites: usize) -> Result<GreensMatrix> {
    let mut by_site: Vec<Option<GreensColumn>> = vec![None; sites];
    for output in &core.outputs {
        let column = GreensColumn::from_recursion(output, k, sites)?;
        let site = column.site;
        by_site[site] = Some(column);
    }
    if core.symmetry_completion {
        for site in 0..sites {
            if by_site[site].is_none() {
                if let Some(mirror) = by_site[sites - 1 - site].clone() {
                    by_site[site] = Some(mirror.reflected(sites));
                }
            }
        }
    }
    let block: Vec<GreensColumn> = by_site
        .into_iter()
        .enumerate()
        .map(|(site, col)| col.ok_or(Error::MissingColumn(site)))
        .collect::<Result<_>>()?;
    Ok(GreensMatrix {
        sites,
        spin_blocks: vec![block],
    })
}

fn combine(mut acc: SpectralDensity, other: SpectralDensity) -> SpectralDensity {
    for (a, b) in acc.values.iter_mut().zip(&other.values) {
        *a += b;
    }
    acc
}

fn scale(mut density: SpectralDensity, factor: f64) -> SpectralDensity {
    for v in &mut density.values {
        *v *= factor;
    }
    density
}

/// `coefficients.json`: every recursion output plus the completion flag.
fn coefficients_json(outputs: &[RecursionOutput], symmetry_completion: bool) -> Result<String> {
    #[derive(Serialize)]
    struct Coefficients<'a> {
        symmetry_completion: bool,
        runs: &'a [RecursionOutput],
    }
    Ok(serde_json::to_string_pretty(&Coefficients {
        symmetry_completion,
        runs: outputs,
    })?)
}

/// `convergence.csv`: k, parity flag, distance, operator support, energies.
fn convergence_csv(records: &[ConvergenceRecord]) -> String {
    let mut out = String::from("k,even,d,p,e_gm,e_expect\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.k,
            u8::from(r.k % 2 == 0),
            csv_cell(r.wasserstein),
            r.pauli_count,
            csv_cell(r.energy_gm),
            csv_cell(r.energy_expectation),
        ));
    }
    out
}

/// `energy.csv`: the energy columns of the series.
fn energy_csv(records: &[ConvergenceRecord]) -> String {
    let mut out = String::from("k,even,e_gm,e_expect\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.k,
            u8::from(r.k % 2 == 0),
            csv_cell(r.energy_gm),
            csv_cell(r.energy_expectation),
        ));
    }
    out
}

/// Snapshot spectra: `spectrum_{r}_{r'}_k{K}.csv` per measured element,
/// where `r'` is the seed mode and `r` the target mode.
fn write_spectra(config: &RunConfig, core: &RunCore, writer: &mut OutputWriter) -> Result<()> {
    let grid = config.grid();
    let mut ks: Vec<usize> = config
        .spectra
        .snapshot_k
        .iter()
        .copied()
        .filter(|&k| k >= 1 && k <= core.k_series)
        .collect();
    ks.push(core.k_series);
    ks.sort_unstable();
    ks.dedup();

    for output in core.outputs.iter() {
        for &k in &ks {
            let cf = output.continued_fraction(k)?;
            let diagonal = diagonal_density(&cf, &grid)?;
            writer.write(
                &format!("spectrum_{0}_{0}_k{1}.csv", output.seed_mode, k),
                &density_csv(&diagonal),
            )?;
            for (t, &target) in output.m_targets.iter().enumerate() {
                if target == output.seed_mode {
                    continue;
                }
                let row = output.m_row(t, k)?;
                let density = offdiag_density(&cf, &row, &grid)?;
                writer.write(
                    &format!("spectrum_{}_{}_k{}.csv", target, output.seed_mode, k),
                    &density_csv(&density),
                )?;
            }
        }
    }
    Ok(())
}

fn density_csv(density: &SpectralDensity) -> String {
    let mut out = String::from("omega,value\n");
    for (omega, value) in density.omegas.iter().zip(&density.values) {
        out.push_str(&format!("{omega},{value}\n"));
    }
    out
}

/// One Lehmann element of the brute-force reference.
#[derive(Debug, Serialize, Deserialize)]
pub struct OracleElement {
    /// Target mode `r` of `G_{r r'}`.
    pub r: usize,
    /// Seed mode `r'`.
    pub rp: usize,
    /// Pole positions.
    pub poles: Vec<f64>,
    /// Residues.
    pub weights: Vec<f64>,
}

/// The approximate state the backend section describes, with its exact
/// energy expectation.
#[derive(Debug, Serialize, Deserialize)]
pub struct OracleApproxState {
    /// Squared ground-state overlap.
    pub fidelity: f64,
    /// Number of admixed excited states.
    pub n_mix: usize,
    /// Derived admixture seed.
    pub state_seed: u64,
    /// Exact `<H>` in the state.
    pub h_expectation: f64,
}

/// The brute-force reference data (`oracle.json`).
#[derive(Debug, Serialize, Deserialize)]
pub struct OracleData {
    /// Exact ground-state energy.
    pub e0: f64,
    /// Chain length.
    pub sites: usize,
    /// Ground-sector particle numbers.
    pub n_up: usize,
    /// Ground-sector particle numbers.
    pub n_dn: usize,
    /// Whether the two spin blocks coincide (paramagnetic ground state).
    pub spin_degenerate: bool,
    /// Every spin-up matrix element `G_{r r'}`.
    pub elements: Vec<OracleElement>,
    /// Present when the config prepares an admixed state.
    pub approx_state: Option<OracleApproxState>,
}

/// Full diagonalization: exact ground energy, every Lehmann element, and
/// the exact `<H>` of the configured approximate state. Writes
/// `oracle.json` into the output directory.
pub fn execute_oracle(config: &RunConfig) -> Result<PathBuf> {
    config.validate()?;
    let model = config.model.chain();
    let ground = exact_ground_state(&model)?;
    let mut elements = Vec::new();
    for rp in 0..model.sites {
        for r in 0..model.sites {
            let spectrum = lehmann_element(&model, &ground, r, rp)?;
            elements.push(OracleElement {
                r,
                rp,
                poles: spectrum.poles,
                weights: spectrum.weights,
            });
        }
    }
    let approx_state = if config.backend.fidelity < 1.0 {
        let seed = derive_state_seed(config.backend.rng_seed);
        let state =
            make_approximate_state(&model, config.backend.fidelity, config.backend.n_mix, seed)?;
        let h = model.hamiltonian()?;
        let h_expectation = MeasurementBackend::exact(state)
            .expectation_with_error(&h)?
            .0
            .re;
        Some(OracleApproxState {
            fidelity: config.backend.fidelity,
            n_mix: config.backend.n_mix,
            state_seed: seed,
            h_expectation,
        })
    } else {
        None
    };
    let data = OracleData {
        e0: ground.energy,
        sites: model.sites,
        n_up: ground.n_up,
        n_dn: ground.n_dn,
        spin_degenerate: ground.n_up == ground.n_dn,
        elements,
        approx_state,
    };
    let dir = config.resolved_output_dir();
    std::fs::create_dir_all(&dir)?;
    write_atomic(&dir, "oracle.json", &serde_json::to_string_pretty(&data)?)?;
    Ok(dir.join("oracle.json"))
}
