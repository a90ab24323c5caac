//! The Liouvillian (operator-space Lanczos) recursion.
//!
//! Starting from the seed `f_0 = c_r`, each iteration applies the
//! Liouvillian `L(f) = [f, H]`, measures the diagonal coefficient
//! `alpha_k = Re <{f_k†, L f_k}>` and the squared off-diagonal coefficient
//! `beta_{k+1}^2 = <{res†, res}>` of the residual
//! `res = L f_k - alpha_k f_k - beta_k f_{k-1}`, and normalizes the residual
//! into `f_{k+1}`. The scalar inner product is the ground-state expectation
//! of the anticommutator, under which the recursion tridiagonalizes the
//! Liouvillian exactly like the Lanczos algorithm tridiagonalizes a matrix.
//!
//! Crucially, the *measured* (possibly shot-noisy) coefficients feed back
//! into the construction of the next operator — the same hybrid loop a
//! hardware run would execute — so noise perturbs not just the recorded
//! numbers but the recursion trajectory itself.

use serde::{Deserialize, Serialize};

use crate::backend::MeasurementBackend;
use crate::error::{Error, Result};
use crate::lattice::{annihilation_op, creation_op};
use crate::pauli::{OperatorSum, DEFAULT_PRUNE_TOL};

/// Exact-mode expectations of the recursion's anticommutators must be real
/// to this tolerance on stationary states.
pub const EXACT_IMAGINARY_TOL: f64 = 1e-8;

/// Which side the Hamiltonian enters the Liouvillian from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignConvention {
    /// `L(f) = [f, H]` — poles of the resulting continued fraction sit at
    /// the retarded positions (particle poles above the chemical potential).
    #[default]
    FH,
    /// `L(f) = [H, f]` — the mirrored convention.
    HF,
}

/// What to do when a measured residual norm comes out negative
/// (possible only under shot noise).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NegativeNormPolicy {
    /// Abort the run with [`Error::NegativeNorm`].
    #[default]
    Error,
    /// Treat it as a (noisy) zero: terminate the recursion cleanly there.
    Clamp,
}

/// Tunables for one recursion run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecursionSettings {
    /// Highest iteration index; the run records `alpha_0..alpha_k_max`
    /// unless it terminates earlier.
    pub k_max: usize,
    /// Weight-pruning tolerance applied to every constructed operator.
    pub prune_tol: f64,
    /// Termination threshold on the measured `beta^2`; `None` picks
    /// `1e-8` in exact mode and `10/sqrt(shots)` under sampling.
    pub beta_tol: Option<f64>,
    /// Response to a measured `beta^2 < -beta_tol`.
    pub on_negative_norm: NegativeNormPolicy,
    /// Side convention of the Liouvillian.
    pub sign: SignConvention,
    /// Check that exact-mode measurements are real to
    /// [`EXACT_IMAGINARY_TOL`]. Only sound on stationary states: there the
    /// identity `2i Im<{f†, Lf}> = <[{f†, f}, H]>` forces the imaginary
    /// part to vanish, so a violation means an algebra bug. On
    /// superposition states the imaginary part is genuinely nonzero and is
    /// discarded; disable the guard for those.
    pub imaginary_guard: bool,
}

impl Default for RecursionSettings {
    fn default() -> Self {
        Self {
            k_max: 30,
            prune_tol: DEFAULT_PRUNE_TOL,
            beta_tol: None,
            on_negative_norm: NegativeNormPolicy::Error,
            sign: SignConvention::FH,
            imaginary_guard: true,
        }
    }
}

impl RecursionSettings {
    fn effective_beta_tol(&self, backend: &MeasurementBackend) -> f64 {
        self.beta_tol.unwrap_or(match backend.shots() {
            None => 1e-8,
            Some(shots) => 10.0 / (shots as f64).sqrt(),
        })
    }
}

/// Why and where a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminationReason {
    /// Ran through iteration `k_max`.
    KMaxReached,
    /// The residual norm fell inside `[-beta_tol, beta_tol]`: the Krylov
    /// space closed (or noise says it might as well have).
    BetaVanished,
    /// A negative measured norm under [`NegativeNormPolicy::Clamp`].
    NegativeNormClamped,
}

/// Final iteration index (`= len(alphas) - 1`) and the stop reason.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Termination {
    /// Index of the last recorded `alpha`.
    pub k: usize,
    /// Why the loop stopped.
    pub reason: TerminationReason,
}

/// Everything a recursion run produces.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecursionOutput {
    /// Seed mode `r` of `f_0 = c_r`.
    pub seed_mode: usize,
    /// Diagonal coefficients `alpha_0..alpha_k`.
    pub alphas: Vec<f64>,
    /// Off-diagonal coefficients `beta_1..beta_k` (one fewer than alphas).
    pub betas: Vec<f64>,
    /// Standard error of each `alpha` (zero in exact mode).
    pub alpha_errors: Vec<f64>,
    /// Standard error of each accepted `beta^2`.
    pub beta_sq_errors: Vec<f64>,
    /// Modes `r'` whose overlaps were measured.
    pub m_targets: Vec<usize>,
    /// `m_coeffs[t][k] = Re <{f_k, c†_{r'_t}}>`: the expansion of the
    /// target seed in the Krylov basis of this run.
    pub m_coeffs: Vec<Vec<f64>>,
    /// Term count of each `f_k` (starts at 2: the seed's two strings).
    pub pauli_counts: Vec<usize>,
    /// Where and why the run stopped.
    pub termination: Termination,
    /// The offending measured norm when the run was clamped, for
    /// diagnostics; `None` for clean terminations.
    pub negative_norm_value: Option<f64>,
}

/// Apply the Liouvillian to `f` under the given convention, pruned.
pub fn liouvillian_apply(
    h: &OperatorSum,
    f: &OperatorSum,
    sign: SignConvention,
    tol: f64,
) -> Result<OperatorSum> {
    match sign {
        SignConvention::FH => f.commutator(h, tol),
        SignConvention::HF => h.commutator(f, tol),
    }
}

/// The unnormalized next Krylov operator:
/// `L f_k - alpha_k f_k - beta_k f_{k-1}`, pruned.
pub fn recursion_step(
    lf_k: &OperatorSum,
    f_k: &OperatorSum,
    f_km1: Option<&OperatorSum>,
    alpha_k: f64,
    beta_k: f64,
    tol: f64,
) -> Result<OperatorSum> {
    let mut residual = lf_k.add_scaled(f_k, num_complex::Complex64::new(-alpha_k, 0.0))?;
    if let Some(prev) = f_km1 {
        residual = residual.add_scaled(prev, num_complex::Complex64::new(-beta_k, 0.0))?;
    }
    Ok(residual.pruned(tol))
}

/// Measure a real recursion scalar: the expectation's real part plus its
/// standard error, with the exact-mode realness guard.
fn measure_real(backend: &MeasurementBackend, op: &OperatorSum, guard: bool) -> Result<(f64, f64)> {
    let (value, se) = backend.expectation_with_error(op)?;
    if guard && !backend.is_sampled() && value.im.abs() > EXACT_IMAGINARY_TOL {
        return Err(Error::ImaginaryLeak(value.im));
    }
    Ok((value.re, se))
}

/// `alpha_k = Re <{f_k†, L f_k}>` with its standard error.
pub fn measure_alpha(
    backend: &MeasurementBackend,
    f_k: &OperatorSum,
    lf_k: &OperatorSum,
    settings: &RecursionSettings,
) -> Result<(f64, f64)> {
    let op = f_k.dagger().anticommutator(lf_k, settings.prune_tol)?;
    measure_real(backend, &op, settings.imaginary_guard)
}

/// `beta^2 = <{res†, res}>` with its standard error.
pub fn measure_beta_sq(
    backend: &MeasurementBackend,
    residual: &OperatorSum,
    settings: &RecursionSettings,
) -> Result<(f64, f64)> {
    let op = residual
        .dagger()
        .anticommutator(residual, settings.prune_tol)?;
    measure_real(backend, &op, settings.imaginary_guard)
}

/// `m_{k,r'} = Re <{f_k, c†_{r'}}>` with its standard error.
pub fn measure_m(
    backend: &MeasurementBackend,
    f_k: &OperatorSum,
    r_prime: usize,
    settings: &RecursionSettings,
) -> Result<(f64, f64)> {
    let c_dag = creation_op(f_k.n(), r_prime)?;
    let op = f_k.anticommutator(&c_dag, settings.prune_tol)?;
    measure_real(backend, &op, settings.imaginary_guard)
}

/// Run the full recursion from seed mode `r`.
///
/// Per iteration, in a fixed order (so the backend's noise stream is
/// reproducible): record the term count of `f_k`, measure the overlap
/// `m_{k,r'}` for every target, measure `alpha_k`, build the residual from
/// the measured coefficients, measure `beta_{k+1}^2`, then either terminate
/// or normalize into `f_{k+1}`.
pub fn run_recursion(
    h: &OperatorSum,
    seed_mode: usize,
    targets: &[usize],
    backend: &MeasurementBackend,
    settings: &RecursionSettings,
) -> Result<RecursionOutput> {
    let n = h.n();
    let beta_tol = settings.effective_beta_tol(backend);
    let creation_ops = targets
        .iter()
        .map(|&t| creation_op(n, t))
        .collect::<Result<Vec<_>>>()?;

    let mut f_k = annihilation_op(n, seed_mode)?;
    let mut f_prev: Option<OperatorSum> = None;
    let mut beta_k = 0.0;

    let mut out = RecursionOutput {
        seed_mode,
        alphas: Vec::with_capacity(settings.k_max + 1),
        betas: Vec::with_capacity(settings.k_max),
        alpha_errors: Vec::with_capacity(settings.k_max + 1),
        beta_sq_errors: Vec::with_capacity(settings.k_max),
        m_targets: targets.to_vec(),
        m_coeffs: vec![Vec::with_capacity(settings.k_max + 1); targets.len()],
        pauli_counts: Vec::with_capacity(settings.k_max + 1),
        termination: Termination {
            k: 0,
            reason: TerminationReason::KMaxReached,
        },
        negative_norm_value: None,
    };

    for k in 0..=settings.k_max {
        out.pauli_counts.push(f_k.term_count());

        for (t, c_dag) in creation_ops.iter().enumerate() {
            let op = f_k.anticommutator(c_dag, settings.prune_tol)?;
            let (m, _) = measure_real(backend, &op, settings.imaginary_guard)?;
            out.m_coeffs[t].push(m);
        }

        let lf = liouvillian_apply(h, &f_k, settings.sign, settings.prune_tol)?;
        let (alpha, alpha_se) = measure_alpha(backend, &f_k, &lf, settings)?;
        out.alphas.push(alpha);
        out.alpha_errors.push(alpha_se);

        if k == settings.k_max {
            out.termination = Termination {
                k,
                reason: TerminationReason::KMaxReached,
            };
            break;
        }

        let residual = recursion_step(
            &lf,
            &f_k,
            f_prev.as_ref(),
            alpha,
            beta_k,
            settings.prune_tol,
        )?;
        let (beta_sq, beta_sq_se) = measure_beta_sq(backend, &residual, settings)?;

        if beta_sq < -beta_tol {
            match settings.on_negative_norm {
                NegativeNormPolicy::Error => {
                    return Err(Error::NegativeNorm {
                        k: k + 1,
                        value: beta_sq,
                    })
                }
                NegativeNormPolicy::Clamp => {
                    out.termination = Termination {
                        k,
                        reason: TerminationReason::NegativeNormClamped,
                    };
                    out.negative_norm_value = Some(beta_sq);
                    break;
                }
            }
        }
        if beta_sq <= beta_tol {
            out.termination = Termination {
                k,
                reason: TerminationReason::BetaVanished,
            };
            break;
        }

        let beta = beta_sq.sqrt();
        out.betas.push(beta);
        out.beta_sq_errors.push(beta_sq_se);
        f_prev = Some(f_k.clone());
        f_k = residual
            .scaled(num_complex::Complex64::new(1.0 / beta, 0.0))
            .pruned(settings.prune_tol);
        beta_k = beta;
    }

    Ok(out)
}
