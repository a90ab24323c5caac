//! Dense statevector on a qubit register, with Pauli-string application and
//! expectation values.
//!
//! Basis convention: computational basis index `b` encodes mode occupations,
//! bit `p` of `b` set iff mode `p` is occupied; `|0>` is the vacuum, so every
//! `Z` has eigenvalue `+1` on it. A string with masks `(x, z)` acts as
//! `P|b> = i^{|x&z|} (-1)^{|z&b|} |b ^ x>`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{OperatorSum, PauliTerm};

/// Largest register for which dense statevectors are constructed.
pub const STATE_QUBIT_CAP: u32 = 14;

/// A normalized-or-not dense state on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    n: u32,
    amplitudes: Vec<Complex64>,
}

impl QuantumState {
    /// Wrap an amplitude vector; its length must be `2^n`.
    pub fn new(n: u32, amplitudes: Vec<Complex64>) -> Result<Self> {
        if n == 0 || n > STATE_QUBIT_CAP {
            return Err(Error::QubitCap {
                qubits: n,
                cap: STATE_QUBIT_CAP,
            });
        }
        if amplitudes.len() != 1usize << n {
            return Err(Error::BadLabel(format!(
                "amplitude vector of length {} does not match {} qubits",
                amplitudes.len(),
                n
            )));
        }
        Ok(Self { n, amplitudes })
    }

    /// The computational basis state `|b>`.
    pub fn basis_state(n: u32, b: usize) -> Result<Self> {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1usize << n];
        if b >= amplitudes.len() {
            return Err(Error::IndexOutOfRange { index: b, n });
        }
        amplitudes[b] = Complex64::new(1.0, 0.0);
        Self::new(n, amplitudes)
    }

    /// Number of qubits.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Amplitudes in basis order.
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Rescale to unit norm.
    pub fn normalized(mut self) -> Result<Self> {
        let norm = self.norm();
        if norm == 0.0 {
            return Err(Error::NotNormalized(0.0));
        }
        for a in &mut self.amplitudes {
            *a /= norm;
        }
        Ok(self)
    }

    /// Inner product `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.n != other.n {
            return Err(Error::QubitMismatch(self.n, other.n));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Apply a single Pauli string.
    pub fn apply_term(&self, term: &PauliTerm) -> Result<Self> {
        if term.n() != self.n {
            return Err(Error::QubitMismatch(term.n(), self.n));
        }
        let (x, z) = (term.x_mask(), term.z_mask());
        let head = match term.y_count() & 3 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        let mut out = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        for (b, amp) in self.amplitudes.iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            let sign = if (z & b as u64).count_ones() & 1 == 1 {
                -1.0
            } else {
                1.0
            };
            out[b ^ x as usize] = head.scale(sign) * amp;
        }
        Self::new(self.n, out)
    }

    /// Apply a weighted sum of strings.
    pub fn apply(&self, op: &OperatorSum) -> Result<Self> {
        if op.n() != self.n {
            return Err(Error::QubitMismatch(op.n(), self.n));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        for &(term, weight) in op.terms() {
            let (x, z) = (term.x_mask(), term.z_mask());
            let head = match term.y_count() & 3 {
                0 => weight,
                1 => Complex64::new(-weight.im, weight.re),
                2 => -weight,
                _ => Complex64::new(weight.im, -weight.re),
            };
            for (b, amp) in self.amplitudes.iter().enumerate() {
                if amp.norm_sqr() == 0.0 {
                    continue;
                }
                let signed = if (z & b as u64).count_ones() & 1 == 1 {
                    -head
                } else {
                    head
                };
                out[b ^ x as usize] += signed * amp;
            }
        }
        Self::new(self.n, out)
    }

    /// Expectation `<psi|P|psi>` of a single string.
    pub fn expectation_of_term(&self, term: &PauliTerm) -> Result<Complex64> {
        if term.n() != self.n {
            return Err(Error::QubitMismatch(term.n(), self.n));
        }
        let (x, z) = (term.x_mask(), term.z_mask());
        let head = match term.y_count() & 3 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for (b, amp) in self.amplitudes.iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            let sign = if (z & b as u64).count_ones() & 1 == 1 {
                -1.0
            } else {
                1.0
            };
            acc += self.amplitudes[b ^ x as usize].conj() * head.scale(sign) * amp;
        }
        Ok(acc)
    }

    /// Expectation `<psi|A|psi>` of a weighted sum, accumulated term by term
    /// in canonical order.
    pub fn expectation(&self, op: &OperatorSum) -> Result<Complex64> {
        if op.n() != self.n {
            return Err(Error::QubitMismatch(op.n(), self.n));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (term, weight) in op.terms() {
            acc += weight * self.expectation_of_term(term)?;
        }
        Ok(acc)
    }
}
