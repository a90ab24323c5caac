//! Liouvillian recursion method for one-particle retarded Green's functions
//! of small fermionic lattice models.
//!
//! The crate builds a Hubbard-chain Hamiltonian as a sum of Pauli strings,
//! runs the operator-space Lanczos (Liouvillian) recursion that turns the
//! Green's function into a continued fraction, evaluates spectral functions
//! and total energies from it, and measures convergence against an exact
//! eigen-decomposition reference.

pub mod backend;
pub mod config;
pub mod ed;
pub mod error;
pub mod greens;
pub mod lattice;
pub mod metrics;
pub mod oracle;
pub mod pauli;
pub mod pipeline;
pub mod recursion;
pub mod report;
pub mod state;

pub use backend::{exact_ground_state, make_approximate_state, GroundState, MeasurementBackend};
pub use config::{derive_state_seed, RunConfig, OUTPUT_ROOT_ENV};
pub use error::{Error, Result};
pub use greens::{
    diagonal_density, offdiag_density, offdiag_eval, offdiag_residues, ContinuedFraction,
    DiscreteSpectrum, FrequencyGrid, SpectralDensity,
};
pub use lattice::{annihilation_op, creation_op, number_op, HubbardChain, Spin};
pub use metrics::{
    galitskii_migdal, linear_fit, log_linear_fit, log_log_fit, max_grid_difference,
    occupation_weight, wasserstein_discrete, wasserstein_grid, ConvergenceRecord, GreensColumn,
    GreensMatrix, LinearFit, ZERO_POLE_TOL,
};
pub use oracle::lehmann_element;
pub use pauli::{OperatorSum, PauliRecord, PauliTerm, DEFAULT_PRUNE_TOL};
pub use pipeline::{execute_oracle, execute_run, RunArtifacts, RunManifest};
pub use recursion::{
    liouvillian_apply, run_recursion, NegativeNormPolicy, RecursionOutput, RecursionSettings,
    SignConvention, Termination, TerminationReason,
};
pub use report::execute_report;
pub use state::QuantumState;
