//! Exact diagonalization restricted to particle-number sectors.
//!
//! The Hubbard chain conserves the number of up and down fermions
//! separately, so the Hamiltonian is block diagonal over sectors
//! `(n_up, n_dn)`. This module builds the dense block matrices (with leak
//! and realness checks), diagonalizes them fully for small blocks, and
//! offers a Lanczos solver with full reorthogonalization for the lowest
//! eigenpair of larger blocks.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::pauli::OperatorSum;
use crate::state::QuantumState;

/// Deterministic seed for the Lanczos start vector.
pub const LANCZOS_SEED: u64 = 0x4c41_4e43;

/// Blocks of at most this dimension are diagonalized densely inside
/// [`lanczos_lowest`] instead of iterating.
const DENSE_FALLBACK_DIM: usize = 4;

/// Amplitude leaking out of a sector beyond this aborts matrix assembly.
const SECTOR_LEAK_TOL: f64 = 1e-10;

/// Imaginary part of a would-be-real matrix element beyond this aborts.
const REALNESS_TOL: f64 = 1e-10;

/// All computational basis indices with `n_up` occupied modes in the up
/// block (`0..sites`) and `n_dn` in the down block (`sites..2*sites`),
/// ascending.
pub fn sector_basis(sites: usize, n_up: usize, n_dn: usize) -> Vec<usize> {
    let n_qubits = 2 * sites;
    let up_mask = (1usize << sites) - 1;
    (0..1usize << n_qubits)
        .filter(|b| {
            (b & up_mask).count_ones() as usize == n_up
                && (b >> sites).count_ones() as usize == n_dn
        })
        .collect()
}

/// Dense matrix of a number-conserving operator on one sector.
///
/// Each column is obtained by applying the operator to a sector basis state
/// in the full space; amplitude outside the sector is an error, as is any
/// imaginary part (both would mean the operator is not what this solver
/// assumes).
pub fn sector_matrix(
    op: &OperatorSum,
    sites: usize,
    n_up: usize,
    n_dn: usize,
) -> Result<DMatrix<f64>> {
    let n_qubits = op.n();
    if n_qubits as usize != 2 * sites {
        return Err(Error::QubitMismatch(n_qubits, (2 * sites) as u32));
    }
    let basis = sector_basis(sites, n_up, n_dn);
    let dim = basis.len();
    // Position of each full-space basis index within the sector.
    let mut position = vec![usize::MAX; 1 << (2 * sites)];
    for (i, &b) in basis.iter().enumerate() {
        position[b] = i;
    }
    let mut matrix = DMatrix::zeros(dim, dim);
    for (col, &b) in basis.iter().enumerate() {
        let image = QuantumState::basis_state(n_qubits, b)?.apply(op)?;
        for (idx, amp) in image.amplitudes().iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            let row = position[idx];
            if row == usize::MAX {
                if amp.norm() > SECTOR_LEAK_TOL {
                    return Err(Error::SectorLeak {
                        n_up,
                        n_dn,
                        leak: amp.norm(),
                    });
                }
                continue;
            }
            if amp.im.abs() > REALNESS_TOL {
                return Err(Error::ComplexSectorMatrix(amp.im.abs()));
            }
            matrix[(row, col)] = amp.re;
        }
    }
    Ok(matrix)
}

/// Full spectrum of one sector: energies ascending, eigenstates embedded
/// back into the full space and sign-fixed (largest-modulus component
/// positive) for reproducibility.
pub struct SectorSpectrum {
    /// Sorted eigenvalues.
    pub energies: Vec<f64>,
    /// Full-space eigenstates, matching `energies`.
    pub states: Vec<QuantumState>,
}

/// Densely diagonalize one sector of a number-conserving operator.
pub fn sector_spectrum(
    op: &OperatorSum,
    sites: usize,
    n_up: usize,
    n_dn: usize,
) -> Result<SectorSpectrum> {
    let basis = sector_basis(sites, n_up, n_dn);
    let matrix = sector_matrix(op, sites, n_up, n_dn)?;
    let eig = matrix.symmetric_eigen();
    let mut order: Vec<usize> = (0..basis.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let n_qubits = (2 * sites) as u32;
    let mut energies = Vec::with_capacity(order.len());
    let mut states = Vec::with_capacity(order.len());
    for &k in &order {
        energies.push(eig.eigenvalues[k]);
        let mut column: DVector<f64> = eig.eigenvectors.column(k).into_owned();
        sign_fix(&mut column);
        states.push(embed(n_qubits, &basis, &column)?);
    }
    Ok(SectorSpectrum { energies, states })
}

/// Lowest eigenpair of a real symmetric matrix.
///
/// Small blocks go through a dense solve; larger ones use Lanczos with a
/// seeded random start vector, full two-pass reorthogonalization each step,
/// and at most `min(dim, max_iter)` iterations, which makes the result
/// deterministic and (for our block sizes) exact to round-off.
pub fn lanczos_lowest(matrix: &DMatrix<f64>, seed: u64, max_iter: usize) -> (f64, DVector<f64>) {
    let dim = matrix.nrows();
    assert!(dim > 0, "empty sector has no eigenpair");
    if dim <= DENSE_FALLBACK_DIM {
        let eig = matrix.clone().symmetric_eigen();
        let mut best = 0;
        for k in 1..dim {
            if eig.eigenvalues[k] < eig.eigenvalues[best] {
                best = k;
            }
        }
        let mut v: DVector<f64> = eig.eigenvectors.column(best).into_owned();
        sign_fix(&mut v);
        return (eig.eigenvalues[best], v);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = DVector::from_fn(dim, |_, _| {
        let g: f64 = StandardNormal.sample(&mut rng);
        g
    });
    v /= v.norm();

    let mut basis: Vec<DVector<f64>> = vec![v];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let iters = max_iter.min(dim).max(1);
    for j in 0..iters {
        let mut w = matrix * &basis[j];
        alphas.push(basis[j].dot(&w));
        for _ in 0..2 {
            for vb in &basis {
                let proj = vb.dot(&w);
                w.axpy(-proj, vb, 1.0);
            }
        }
        let b = w.norm();
        if j + 1 == iters || b < 1e-12 {
            break;
        }
        betas.push(b);
        basis.push(w / b);
    }

    let k = alphas.len();
    let tri = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            alphas[i]
        } else if i.abs_diff(j) == 1 {
            betas[i.min(j)]
        } else {
            0.0
        }
    });
    let eig = tri.symmetric_eigen();
    let mut best = 0;
    for i in 1..k {
        if eig.eigenvalues[i] < eig.eigenvalues[best] {
            best = i;
        }
    }
    let coeffs = eig.eigenvectors.column(best);
    let mut ritz = DVector::zeros(dim);
    for (i, vb) in basis.iter().enumerate() {
        ritz.axpy(coeffs[i], vb, 1.0);
    }
    ritz /= ritz.norm();
    sign_fix(&mut ritz);
    (eig.eigenvalues[best], ritz)
}

/// Make the largest-modulus component positive (first such index wins).
fn sign_fix(v: &mut DVector<f64>) {
    let mut arg = 0;
    for i in 1..v.len() {
        if v[i].abs() > v[arg].abs() {
            arg = i;
        }
    }
    if v[arg] < 0.0 {
        *v = -&*v;
    }
}

/// Lift a real sector vector to a full-space state.
pub fn embed(n_qubits: u32, basis: &[usize], coeffs: &DVector<f64>) -> Result<QuantumState> {
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1usize << n_qubits];
    for (&b, &c) in basis.iter().zip(coeffs.iter()) {
        amplitudes[b] = Complex64::new(c, 0.0);
    }
    QuantumState::new(n_qubits, amplitudes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{annihilation_op, creation_op, HubbardChain};
    use crate::pauli::DEFAULT_PRUNE_TOL;

    #[test]
    fn sector_basis_enumeration() {
        let basis = sector_basis(2, 1, 1);
        assert_eq!(basis, vec![0b0101, 0b0110, 0b1001, 0b1010]);
        assert_eq!(sector_basis(4, 2, 2).len(), 36);
        assert!(sector_basis(2, 3, 0).is_empty());
    }

    #[test]
    fn single_site_sector_energies() {
        let h = HubbardChain {
            sites: 1,
            t: 1.0,
            u: 4.0,
            mu: 2.0,
        }
        .hamiltonian()
        .unwrap();
        let cases = [((0, 0), 0.0), ((1, 0), -2.0), ((0, 1), -2.0), ((1, 1), 0.0)];
        for ((n_up, n_dn), expected) in cases {
            let spec = sector_spectrum(&h, 1, n_up, n_dn).unwrap();
            assert_eq!(spec.energies.len(), 1);
            assert!(
                (spec.energies[0] - expected).abs() < 1e-12,
                "sector ({n_up},{n_dn})"
            );
        }
    }

    #[test]
    fn free_fermion_sector_energies_are_orbital_sums() {
        // With u = 0 the one-particle energies are the eigenvalues of the
        // single-particle matrix; for sites=2, t=1, mu=0.5 they are -1.5, 0.5.
        let model = HubbardChain {
            sites: 2,
            t: 1.0,
            u: 0.0,
            mu: 0.5,
        };
        let h = model.hamiltonian().unwrap();
        let spec = sector_spectrum(&h, 2, 1, 0).unwrap();
        assert_eq!(spec.energies.len(), 2);
        assert!((spec.energies[0] - (-1.5)).abs() < 1e-12);
        assert!((spec.energies[1] - 0.5).abs() < 1e-12);
        // Two particles of the same spin fill both orbitals.
        let spec2 = sector_spectrum(&h, 2, 2, 0).unwrap();
        assert!((spec2.energies[0] - (-1.0)).abs() < 1e-12);
    }

    #[test]
    fn eigenstates_are_orthonormal_eigenvectors() {
        let h = HubbardChain::default().hamiltonian().unwrap();
        let spec = sector_spectrum(&h, 4, 1, 1).unwrap();
        for (e, psi) in spec.energies.iter().zip(&spec.states).take(4) {
            let h_psi = psi.apply(&h).unwrap();
            let expect = psi.inner(&h_psi).unwrap();
            assert!((expect.re - e).abs() < 1e-10);
            assert!((psi.norm() - 1.0).abs() < 1e-12);
        }
        let overlap = spec.states[0].inner(&spec.states[1]).unwrap();
        assert!(overlap.norm() < 1e-10);
    }

    #[test]
    fn non_conserving_operator_is_rejected() {
        let x = OperatorSum::from_labeled(&[("XI", Complex64::new(1.0, 0.0))]).unwrap();
        let err = sector_matrix(&x, 1, 0, 0).unwrap_err();
        assert!(matches!(err, Error::SectorLeak { .. }));
    }

    #[test]
    fn complex_matrix_elements_are_rejected() {
        // The bond-current operator i(c†_0 c_1 - c†_1 c_0) conserves number
        // but has imaginary elements in the real occupation basis.
        let n = 4;
        let fwd = creation_op(n, 0)
            .unwrap()
            .product(&annihilation_op(n, 1).unwrap(), DEFAULT_PRUNE_TOL)
            .unwrap();
        let bwd = creation_op(n, 1)
            .unwrap()
            .product(&annihilation_op(n, 0).unwrap(), DEFAULT_PRUNE_TOL)
            .unwrap();
        let current = fwd.sub(&bwd).unwrap().scaled(Complex64::new(0.0, 1.0));
        let err = sector_matrix(&current, 2, 1, 0).unwrap_err();
        assert!(matches!(err, Error::ComplexSectorMatrix(_)));
    }

    #[test]
    fn lanczos_agrees_with_dense_on_half_filled_block() {
        let h = HubbardChain::default().hamiltonian().unwrap();
        let matrix = sector_matrix(&h, 4, 2, 2).unwrap();
        let dense = sector_spectrum(&h, 4, 2, 2).unwrap();
        let (e, v) = lanczos_lowest(&matrix, LANCZOS_SEED, 200);
        assert!((e - dense.energies[0]).abs() < 1e-10);
        // Same vector up to sign convention (both are sign-fixed).
        let embedded = embed(8, &sector_basis(4, 2, 2), &v).unwrap();
        let overlap = embedded.inner(&dense.states[0]).unwrap();
        assert!((overlap.norm() - 1.0).abs() < 1e-9);
        assert!(overlap.re > 0.0);
    }

    #[test]
    fn lanczos_is_deterministic() {
        let h = HubbardChain::default().hamiltonian().unwrap();
        let matrix = sector_matrix(&h, 4, 2, 1).unwrap();
        let (e1, v1) = lanczos_lowest(&matrix, LANCZOS_SEED, 200);
        let (e2, v2) = lanczos_lowest(&matrix, LANCZOS_SEED, 200);
        assert_eq!(e1, e2);
        assert_eq!(v1, v2);
    }
}
