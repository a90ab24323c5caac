//! Guide chapters for the `liouvrec` crate, compiled as doc-tests.
//!
//! Each module below embeds one chapter of the book under `book/` so that
//! every fenced Rust snippet in the guide is built and executed by
//! `cargo test`. The book and the library cannot drift apart silently.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/pauli-algebra.md")]
pub mod pauli_algebra {}

#[doc = include_str!("../../../book/src/lattice-models.md")]
pub mod lattice_models {}

#[doc = include_str!("../../../book/src/ground-states-and-measurement.md")]
pub mod ground_states_and_measurement {}

#[doc = include_str!("../../../book/src/operator-recursion.md")]
pub mod operator_recursion {}

#[doc = include_str!("../../../book/src/continued-fractions.md")]
pub mod continued_fractions {}

#[doc = include_str!("../../../book/src/energy-estimation.md")]
pub mod energy_estimation {}

#[doc = include_str!("../../../book/src/convergence-metrics.md")]
pub mod convergence_metrics {}

#[doc = include_str!("../../../book/src/pipeline.md")]
pub mod pipeline {}
