//! Exact Lehmann representation of the one-particle retarded Green's
//! function, computed by brute-force sector diagonalization.
//!
//! This is the reference the recursion is judged against:
//!
//! ```text
//! G_{r'r}(z) = sum_n <g|c_{r'}|n><n|c†_r|g> / (z - (E_n - E_0))    (particle)
//!            + sum_m <g|c†_r|m><m|c_{r'}|g> / (z - (E_0 - E_m))    (hole)
//! ```
//!
//! with `|n>` running over the `(N+1)`-particle sector of the seed's spin
//! species and `|m>` over the `(N-1)` sector.

use crate::backend::GroundState;
use crate::ed::sector_spectrum;
use crate::error::{Error, Result};
use crate::greens::DiscreteSpectrum;
use crate::lattice::{annihilation_op, creation_op, HubbardChain};

/// Poles closer than this are merged into one.
const POLE_MERGE_TOL: f64 = 1e-10;

/// Weights smaller in magnitude than this are dropped after merging.
const WEIGHT_PRUNE_TOL: f64 = 1e-12;

/// Exact pole/weight decomposition of `G_{r'r}` for two modes of the same
/// spin species (opposite species give an identically vanishing element).
pub fn lehmann_element(
    model: &HubbardChain,
    ground: &GroundState,
    mode_r_prime: usize,
    mode_r: usize,
) -> Result<DiscreteSpectrum> {
    let n_qubits = model.n_qubits();
    let sites = model.sites;
    if mode_r >= n_qubits as usize {
        return Err(Error::IndexOutOfRange {
            index: mode_r,
            n: n_qubits,
        });
    }
    if mode_r_prime >= n_qubits as usize {
        return Err(Error::IndexOutOfRange {
            index: mode_r_prime,
            n: n_qubits,
        });
    }
    let spin_up_r = mode_r < sites;
    if spin_up_r != (mode_r_prime < sites) {
        // Different spin species never connect: S_z selection rule.
        return Ok(DiscreteSpectrum {
            poles: vec![],
            weights: vec![],
        });
    }

    let h = model.hamiltonian()?;
    let e0 = ground.energy;
    let mut poles = Vec::new();
    let mut weights = Vec::new();

    // Particle poles: overlap with the sector holding one more fermion of
    // the seed's species.
    let particle_sector = if spin_up_r {
        (ground.n_up + 1, ground.n_dn)
    } else {
        (ground.n_up, ground.n_dn + 1)
    };
    if particle_sector.0 <= sites && particle_sector.1 <= sites {
        let spectrum = sector_spectrum(&h, sites, particle_sector.0, particle_sector.1)?;
        let cdag_r_g = ground.state.apply(&creation_op(n_qubits, mode_r)?)?;
        let cdag_rp_g = ground.state.apply(&creation_op(n_qubits, mode_r_prime)?)?;
        for (energy, state) in spectrum.energies.iter().zip(&spectrum.states) {
            let a = state.inner(&cdag_r_g)?;
            let b = state.inner(&cdag_rp_g)?;
            poles.push(energy - e0);
            weights.push((b.conj() * a).re);
        }
    }

    // Hole poles: one fewer fermion of the seed's species.
    let hole_sector = if spin_up_r {
        (ground.n_up.checked_sub(1), Some(ground.n_dn))
    } else {
        (Some(ground.n_up), ground.n_dn.checked_sub(1))
    };
    if let (Some(nu), Some(nd)) = hole_sector {
        let spectrum = sector_spectrum(&h, sites, nu, nd)?;
        let c_r_g = ground.state.apply(&annihilation_op(n_qubits, mode_r)?)?;
        let c_rp_g = ground
            .state
            .apply(&annihilation_op(n_qubits, mode_r_prime)?)?;
        for (energy, state) in spectrum.energies.iter().zip(&spectrum.states) {
            let a = state.inner(&c_r_g)?;
            let b = state.inner(&c_rp_g)?;
            poles.push(e0 - energy);
            weights.push((a.conj() * b).re);
        }
    }

    Ok(DiscreteSpectrum { poles, weights }.merged(POLE_MERGE_TOL, WEIGHT_PRUNE_TOL))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::exact_ground_state;

    fn atomic_model() -> HubbardChain {
        HubbardChain {
            sites: 1,
            t: 1.0,
            u: 4.0,
            mu: 2.0,
        }
    }

    #[test]
    fn atomic_diagonal_elements() {
        let model = atomic_model();
        let gs = exact_ground_state(&model).unwrap();
        // Spin-up: the occupied mode only has a hole pole at -2.
        let up = lehmann_element(&model, &gs, 0, 0).unwrap();
        assert_eq!(up.poles.len(), 1);
        assert!((up.poles[0] - (-2.0)).abs() < 1e-12);
        assert!((up.weights[0] - 1.0).abs() < 1e-12);
        // Spin-down: the empty mode only has a particle pole at +2.
        let dn = lehmann_element(&model, &gs, 1, 1).unwrap();
        assert_eq!(dn.poles.len(), 1);
        assert!((dn.poles[0] - 2.0).abs() < 1e-12);
        assert!((dn.weights[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn opposite_spins_do_not_connect() {
        let model = atomic_model();
        let gs = exact_ground_state(&model).unwrap();
        let cross = lehmann_element(&model, &gs, 0, 1).unwrap();
        assert!(cross.poles.is_empty());
    }

    /// Free fermions: the Green's matrix is diagonal in the orbital basis,
    /// so G_{r'r} has poles at the orbital energies with weights
    /// v_p(r') v_p(r).
    #[test]
    fn free_chain_matches_orbital_decomposition() {
        let model = HubbardChain {
            sites: 4,
            t: 1.0,
            u: 0.0,
            mu: 0.0,
        };
        let gs = exact_ground_state(&model).unwrap();
        let norm = (2.0 / 5.0f64).sqrt();
        let orbital = |m: usize, j: usize| {
            norm * ((j + 1) as f64 * m as f64 * std::f64::consts::PI / 5.0).sin()
        };
        let energy = |m: usize| -2.0 * (m as f64 * std::f64::consts::PI / 5.0).cos();
        for (rp, r) in [(0, 0), (1, 0), (2, 0), (3, 0), (1, 1)] {
            let spec = lehmann_element(&model, &gs, rp, r).unwrap();
            assert_eq!(spec.poles.len(), 4, "element ({rp},{r})");
            for (idx, m) in (1..=4).enumerate() {
                assert!((spec.poles[idx] - energy(m)).abs() < 1e-10);
                let expected = orbital(m, rp) * orbital(m, r);
                assert!(
                    (spec.weights[idx] - expected).abs() < 1e-10,
                    "element ({rp},{r}) pole {idx}: {} vs {expected}",
                    spec.weights[idx]
                );
            }
        }
    }

    /// Completeness: the weights of G_{r'r} sum to the anticommutator
    /// {c_{r'}, c†_r} = delta.
    #[test]
    fn weights_sum_to_delta() {
        let model = HubbardChain::default();
        let gs = exact_ground_state(&model).unwrap();
        for (rp, r, delta) in [(0, 0, 1.0), (1, 1, 1.0), (1, 0, 0.0), (3, 0, 0.0)] {
            let spec = lehmann_element(&model, &gs, rp, r).unwrap();
            assert!(
                (spec.total_weight() - delta).abs() < 1e-10,
                "element ({rp},{r}): total {}",
                spec.total_weight()
            );
        }
    }

    /// The interacting diagonal element is positive and symmetric under
    /// the open-chain reflection.
    #[test]
    fn half_filled_diagonal_is_reflection_symmetric() {
        let model = HubbardChain::default();
        let gs = exact_ground_state(&model).unwrap();
        let g00 = lehmann_element(&model, &gs, 0, 0).unwrap();
        let g33 = lehmann_element(&model, &gs, 3, 3).unwrap();
        assert_eq!(g00.poles.len(), g33.poles.len());
        for ((pa, wa), (pb, wb)) in g00
            .poles
            .iter()
            .zip(&g00.weights)
            .zip(g33.poles.iter().zip(&g33.weights))
        {
            assert!((pa - pb).abs() < 1e-9);
            assert!((wa - wb).abs() < 1e-9);
            assert!(*wa >= 0.0);
        }
    }
}
