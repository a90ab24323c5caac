//! Measurement backends: exact statevector expectations, optionally
//! degraded by emulated shot noise, plus preparation of exact and
//! fidelity-controlled approximate ground states.
//!
//! Sampled mode perturbs each non-identity Pauli expectation `e` by
//! Gaussian noise of width `sqrt((1 - e^2)/shots)` — the standard error of
//! a `shots`-sample estimate of a ±1-valued observable — then clamps to
//! `[-1, 1]`. Identity terms are exact. Noise draws are counter-based:
//! each is seeded by `(backend seed, call index, term index)`, so a run is
//! reproducible regardless of evaluation order elsewhere.

use std::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::ed::{lanczos_lowest, sector_basis, sector_matrix, sector_spectrum, LANCZOS_SEED};
use crate::error::{Error, Result};
use crate::lattice::HubbardChain;
use crate::pauli::OperatorSum;
use crate::state::QuantumState;

/// SplitMix64 finalizer, used to derive independent seeds.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mix three words into one seed.
fn mix3(a: u64, b: u64, c: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(a) ^ b) ^ c)
}

/// Evaluates Pauli-sum expectations against a fixed state.
#[derive(Debug)]
pub struct MeasurementBackend {
    state: QuantumState,
    /// `None` means exact expectations; `Some(s)` emulates `s` shots per term.
    shots: Option<u64>,
    rng_seed: u64,
    calls: AtomicU64,
}

impl MeasurementBackend {
    /// Exact expectations on `state`.
    pub fn exact(state: QuantumState) -> Self {
        Self {
            state,
            shots: None,
            rng_seed: 0,
            calls: AtomicU64::new(0),
        }
    }

    /// Shot-noise-emulated expectations; `shots = 0` falls back to exact.
    pub fn sampled(state: QuantumState, shots: u64, rng_seed: u64) -> Self {
        Self {
            state,
            shots: (shots > 0).then_some(shots),
            rng_seed,
            calls: AtomicU64::new(0),
        }
    }

    /// The state measurements are taken in.
    pub fn state(&self) -> &QuantumState {
        &self.state
    }

    /// Emulated shots per Pauli term, if sampling.
    pub fn shots(&self) -> Option<u64> {
        self.shots
    }

    /// True when expectations carry emulated noise.
    pub fn is_sampled(&self) -> bool {
        self.shots.is_some()
    }

    /// A backend on the same state and shot budget with an independent
    /// noise stream.
    pub fn derive(&self, stream: u64) -> Self {
        Self {
            state: self.state.clone(),
            shots: self.shots,
            rng_seed: splitmix64(splitmix64(self.rng_seed) ^ stream),
            calls: AtomicU64::new(0),
        }
    }

    /// Expectation of a weighted Pauli sum: each string's (real) expectation
    /// is estimated independently, then combined with the complex weights.
    pub fn expectation(&self, op: &OperatorSum) -> Result<Complex64> {
        Ok(self.expectation_with_error(op)?.0)
    }

    /// Expectation together with the standard error of its real part
    /// (zero in exact mode).
    pub fn expectation_with_error(&self, op: &OperatorSum) -> Result<(Complex64, f64)> {
        let call = self.calls.fetch_add(1, Ordering::Relaxed);
        let mut value = Complex64::new(0.0, 0.0);
        let mut variance = 0.0;
        for (index, (term, weight)) in op.terms().iter().enumerate() {
            if term.is_identity() {
                value += weight;
                continue;
            }
            let exact = self.state.expectation_of_term(term)?.re;
            let estimate = match self.shots {
                None => exact,
                Some(shots) => {
                    let sigma = ((1.0 - exact * exact).max(0.0) / shots as f64).sqrt();
                    let mut rng =
                        ChaCha8Rng::seed_from_u64(mix3(self.rng_seed, call, index as u64));
                    let g: f64 = StandardNormal.sample(&mut rng);
                    variance += weight.re * weight.re * sigma * sigma;
                    (exact + sigma * g).clamp(-1.0, 1.0)
                }
            };
            value += weight * estimate;
        }
        Ok((value, variance.sqrt()))
    }
}

/// The lowest eigenstate of a model over all particle-number sectors.
#[derive(Debug, Clone)]
pub struct GroundState {
    /// Ground energy.
    pub energy: f64,
    /// Full-space ground statevector.
    pub state: QuantumState,
    /// Up-fermion count of the winning sector.
    pub n_up: usize,
    /// Down-fermion count of the winning sector.
    pub n_dn: usize,
    /// True when the winning sector has `n_up == n_dn`, so the two spin
    /// species give identical Green's functions.
    pub spin_degenerate: bool,
}

/// Scan every `(n_up, n_dn)` sector for the global ground state.
///
/// Ties within `1e-9 * max(1, |E|)` are broken toward the smallest total
/// particle number, then the largest `n_up - n_dn`, which makes the choice
/// deterministic for degenerate models.
pub fn exact_ground_state(model: &HubbardChain) -> Result<GroundState> {
    let h = model.hamiltonian()?;
    let sites = model.sites;
    let mut best: Option<(f64, usize, usize)> = None;
    for n_up in 0..=sites {
        for n_dn in 0..=sites {
            let matrix = sector_matrix(&h, sites, n_up, n_dn)?;
            if matrix.nrows() == 0 {
                continue;
            }
            let (energy, _) = lanczos_lowest(&matrix, LANCZOS_SEED, 200);
            best = Some(match best {
                None => (energy, n_up, n_dn),
                Some((e0, u0, d0)) => {
                    let tol = 1e-9 * e0.abs().max(1.0);
                    if energy < e0 - tol {
                        (energy, n_up, n_dn)
                    } else if energy <= e0 + tol {
                        // Degenerate: prefer fewer particles, then more
                        // spin-up imbalance.
                        let new_key = (n_up + n_dn, -(n_up as i64 - n_dn as i64));
                        let old_key = (u0 + d0, -(u0 as i64 - d0 as i64));
                        if new_key < old_key {
                            (energy, n_up, n_dn)
                        } else {
                            (e0, u0, d0)
                        }
                    } else {
                        (e0, u0, d0)
                    }
                }
            });
        }
    }
    let (energy, n_up, n_dn) = best.expect("at least the vacuum sector exists");
    let matrix = sector_matrix(&h, sites, n_up, n_dn)?;
    let (_, vector) = lanczos_lowest(&matrix, LANCZOS_SEED, 200);
    let state = crate::ed::embed(model.n_qubits(), &sector_basis(sites, n_up, n_dn), &vector)?;
    Ok(GroundState {
        energy,
        state,
        n_up,
        n_dn,
        spin_degenerate: n_up == n_dn,
    })
}

/// A state with a prescribed squared overlap (`fidelity`) with the exact
/// ground state.
///
/// The orthogonal complement is a seeded complex-Gaussian combination of
/// the `n_mix` lowest excited states in the ground sector, so the admixture
/// is low-lying and physical rather than arbitrary noise.
pub fn make_approximate_state(
    model: &HubbardChain,
    fidelity: f64,
    n_mix: usize,
    seed: u64,
) -> Result<QuantumState> {
    if !(0.0..=1.0).contains(&fidelity) {
        return Err(Error::FidelityRange(fidelity));
    }
    let ground = exact_ground_state(model)?;
    if fidelity == 1.0 {
        return Ok(ground.state);
    }
    let h = model.hamiltonian()?;
    let spectrum = sector_spectrum(&h, model.sites, ground.n_up, ground.n_dn)?;
    let available = spectrum.energies.len().saturating_sub(1);
    if n_mix == 0 || available < n_mix {
        return Err(Error::SectorTooSmall {
            n_up: ground.n_up,
            n_dn: ground.n_dn,
            available,
            needed: n_mix,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chi = vec![Complex64::new(0.0, 0.0); ground.state.amplitudes().len()];
    for excited in spectrum.states.iter().skip(1).take(n_mix) {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        let coeff = Complex64::new(re, im);
        for (acc, amp) in chi.iter_mut().zip(excited.amplitudes()) {
            *acc += coeff * amp;
        }
    }
    let chi_norm = chi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if chi_norm == 0.0 {
        return Err(Error::NotNormalized(0.0));
    }
    let (a, b) = (fidelity.sqrt(), (1.0 - fidelity).sqrt() / chi_norm);
    let amplitudes = ground
        .state
        .amplitudes()
        .iter()
        .zip(&chi)
        .map(|(g, x)| g.scale(a) + x.scale(b))
        .collect();
    QuantumState::new(model.n_qubits(), amplitudes)
}
