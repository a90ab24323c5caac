//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by the operator algebra, backends, recursion and pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Two operands live on different qubit counts.
    #[error("qubit count mismatch: {0} vs {1}")]
    QubitMismatch(u32, u32),

    /// A qubit/mode index is outside the register.
    #[error("index {index} out of range for {n} qubits")]
    IndexOutOfRange { index: usize, n: u32 },

    /// More qubits than the dense-statevector paths support.
    #[error("{qubits} qubits exceed the supported cap of {cap}")]
    QubitCap { qubits: u32, cap: u32 },

    /// A Pauli label contained a character outside `IXYZ`.
    #[error("invalid Pauli label {0:?}")]
    BadLabel(String),

    /// An operator that must be Hermitian is not.
    #[error("operator is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    /// A state vector failed the unit-norm invariant.
    #[error("state is not normalized (sum of squares {0})")]
    NotNormalized(f64),

    /// A sector does not hold enough eigenstates for the requested admixture.
    #[error("sector ({n_up},{n_dn}) has {available} states, need {needed}")]
    SectorTooSmall {
        n_up: usize,
        n_dn: usize,
        available: usize,
        needed: usize,
    },

    /// Requested fidelity is outside (0, 1].
    #[error("fidelity {0} outside (0, 1]")]
    FidelityRange(f64),

    /// The Hamiltonian leaked amplitude out of a particle-number sector.
    #[error("operator does not conserve the ({n_up},{n_dn}) sector (leak {leak:.3e})")]
    SectorLeak { n_up: usize, n_dn: usize, leak: f64 },

    /// A sector matrix came out complex where a real one was required.
    #[error("sector matrix has imaginary entries up to {0:.3e}")]
    ComplexSectorMatrix(f64),

    /// Measured squared norm fell below the negative tolerance band.
    #[error("negative operator norm at iteration {k}: beta^2 = {value:.6e}")]
    NegativeNorm { k: usize, value: f64 },

    /// Exact-mode expectation with an imaginary part where a real number is
    /// required; signals an algebra bug, not a physics result.
    #[error("imaginary leak {0:.3e} in exact-mode measurement")]
    ImaginaryLeak(f64),

    /// Continued-fraction evaluation requested outside the upper half plane.
    #[error("evaluation point must have Im z > 0, got {0:.3e}")]
    NotUpperHalfPlane(f64),

    /// A truncation index without the coefficients to back it.
    #[error("iteration {k} unavailable: only {available} coefficients")]
    TruncationOutOfRange { k: usize, available: usize },

    /// Distribution weights too far from unit total to normalize away.
    #[error("distribution weight {0} deviates from 1 by more than 5%")]
    BadTotalWeight(f64),

    /// Mismatched or empty grids/supports in a metric computation.
    #[error("invalid metric input: {0}")]
    MetricInput(String),

    /// Green's-function matrix misses a column the energy formula needs.
    #[error("Green's matrix misses residues for site {0}")]
    MissingColumn(usize),

    /// Configuration file or override rejected.
    #[error("config: {0}")]
    Config(String),

    /// IO failure in the pipeline.
    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// JSON (de)serialization failure in the pipeline.
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
