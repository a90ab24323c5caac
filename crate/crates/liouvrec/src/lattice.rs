//! Fermionic lattice model: a spinful Hubbard chain with open boundaries,
//! mapped to qubits by the Jordan-Wigner transformation.
//!
//! Mode convention: spin-up modes occupy qubits `0..sites` (qubit = site
//! index) and spin-down modes occupy qubits `sites..2*sites`. Fermionic
//! basis states are built by applying creation operators in ascending mode
//! order to the vacuum, so the Jordan-Wigner string of mode `p` acts on all
//! qubits below `p`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{OperatorSum, PauliTerm, MAX_QUBITS};

/// Spin species of a fermionic mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Spin {
    /// Spin up: modes `0..sites`.
    Up,
    /// Spin down: modes `sites..2*sites`.
    Down,
}

impl Spin {
    /// Block index: 0 for up, 1 for down.
    pub fn index(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }

    /// Both species, up first.
    pub fn both() -> [Spin; 2] {
        [Spin::Up, Spin::Down]
    }
}

/// Annihilation operator `c_p` as a two-term Pauli sum.
///
/// With the empty mode mapped to `|0>` (so `Z = +1` on empty), the lowering
/// operator is `(X + iY)/2` on qubit `p` dressed with a Z string on qubits
/// `0..p` that carries the fermionic sign.
pub fn annihilation_op(n_qubits: u32, mode: usize) -> Result<OperatorSum> {
    if mode >= n_qubits as usize {
        return Err(Error::IndexOutOfRange {
            index: mode,
            n: n_qubits,
        });
    }
    let bit = 1u64 << mode;
    let string = bit - 1;
    OperatorSum::from_terms(
        n_qubits,
        vec![
            (
                PauliTerm::new(n_qubits, bit, string)?,
                Complex64::new(0.5, 0.0),
            ),
            (
                PauliTerm::new(n_qubits, bit, string | bit)?,
                Complex64::new(0.0, 0.5),
            ),
        ],
    )
}

/// Creation operator `c†_p`, the adjoint of [`annihilation_op`].
pub fn creation_op(n_qubits: u32, mode: usize) -> Result<OperatorSum> {
    Ok(annihilation_op(n_qubits, mode)?.dagger())
}

/// Number operator `n_p = c†_p c_p = (I - Z_p)/2`.
pub fn number_op(n_qubits: u32, mode: usize) -> Result<OperatorSum> {
    if mode >= n_qubits as usize {
        return Err(Error::IndexOutOfRange {
            index: mode,
            n: n_qubits,
        });
    }
    OperatorSum::from_terms(
        n_qubits,
        vec![
            (PauliTerm::identity(n_qubits), Complex64::new(0.5, 0.0)),
            (PauliTerm::z_at(n_qubits, mode)?, Complex64::new(-0.5, 0.0)),
        ],
    )
}

/// A one-dimensional spinful Hubbard chain with open boundaries:
/// nearest-neighbour hopping `t`, on-site repulsion `u`, chemical
/// potential `mu`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct HubbardChain {
    /// Number of lattice sites.
    pub sites: usize,
    /// Nearest-neighbour hopping amplitude.
    pub t: f64,
    /// On-site repulsion between opposite spins.
    pub u: f64,
    /// Chemical potential (`mu = u/2` is particle-hole symmetric).
    pub mu: f64,
}

impl Default for HubbardChain {
    fn default() -> Self {
        Self {
            sites: 4,
            t: 1.0,
            u: 4.0,
            mu: 2.0,
        }
    }
}

impl HubbardChain {
    /// Validate the geometry against the mask width.
    pub fn validate(&self) -> Result<()> {
        if self.sites == 0 || 2 * self.sites > MAX_QUBITS as usize {
            return Err(Error::QubitCap {
                qubits: (2 * self.sites) as u32,
                cap: MAX_QUBITS,
            });
        }
        Ok(())
    }

    /// Total qubits: two spin species per site.
    pub fn n_qubits(&self) -> u32 {
        (2 * self.sites) as u32
    }

    /// Qubit index of the mode `(site, spin)`.
    pub fn mode(&self, site: usize, spin: Spin) -> usize {
        site + self.sites * spin.index()
    }

    /// Site of the reflected mode under the open-chain mirror symmetry.
    pub fn reflected_site(&self, site: usize) -> usize {
        self.sites - 1 - site
    }

    /// The full many-body Hamiltonian as a Pauli sum.
    ///
    /// After the Jordan-Wigner map the pieces are:
    /// - hopping: `-t/2 (X_p X_q + Y_p Y_q)` per bond per spin (adjacent
    ///   modes, so no residual Z string),
    /// - interaction: `u/4 Z_p Z_{p+sites}` per site plus single-Z and
    ///   identity shifts,
    /// - chemical potential: single-Z and identity shifts.
    ///
    /// Single-Z weights are `mu/2 - u/4` and cancel exactly at half filling
    /// (`mu = u/2`); the identity weight is `-mu*sites + u*sites/4`.
    pub fn hamiltonian(&self) -> Result<OperatorSum> {
        self.validate()?;
        let n = self.n_qubits();
        let l = self.sites;
        let mut terms: Vec<(PauliTerm, Complex64)> = Vec::new();

        let identity_weight = -self.mu * l as f64 + self.u * l as f64 / 4.0;
        terms.push((PauliTerm::identity(n), Complex64::new(identity_weight, 0.0)));

        let z_weight = self.mu / 2.0 - self.u / 4.0;
        if z_weight != 0.0 {
            for mode in 0..n as usize {
                terms.push((PauliTerm::z_at(n, mode)?, Complex64::new(z_weight, 0.0)));
            }
        }

        if self.u != 0.0 {
            for site in 0..l {
                let up = self.mode(site, Spin::Up);
                let dn = self.mode(site, Spin::Down);
                let zz = PauliTerm::new(n, 0, (1 << up) | (1 << dn))?;
                terms.push((zz, Complex64::new(self.u / 4.0, 0.0)));
            }
        }

        if self.t != 0.0 {
            for spin in Spin::both() {
                for site in 0..l.saturating_sub(1) {
                    let p = self.mode(site, spin);
                    let q = self.mode(site + 1, spin);
                    let bits = (1u64 << p) | (1u64 << q);
                    let xx = PauliTerm::new(n, bits, 0)?;
                    let yy = PauliTerm::new(n, bits, bits)?;
                    terms.push((xx, Complex64::new(-self.t / 2.0, 0.0)));
                    terms.push((yy, Complex64::new(-self.t / 2.0, 0.0)));
                }
            }
        }

        OperatorSum::from_terms(n, terms)
    }

    /// Single-particle (hopping) matrix `h0`: tridiagonal with `-mu` on the
    /// diagonal and `-t` on the off-diagonals. One spin block; the full
    /// single-particle matrix is block-diagonal with two copies.
    pub fn single_particle_matrix(&self) -> DMatrix<f64> {
        let l = self.sites;
        DMatrix::from_fn(l, l, |i, j| {
            if i == j {
                -self.mu
            } else if i.abs_diff(j) == 1 {
                -self.t
            } else {
                0.0
            }
        })
    }
}
