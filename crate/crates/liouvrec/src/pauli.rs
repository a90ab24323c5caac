//! Pauli-string algebra on a fixed qubit register.
//!
//! A Pauli string is stored in the symplectic representation: two bitmasks
//! `(x_mask, z_mask)` where qubit `q` carries an X factor iff bit `q` of
//! `x_mask` is set and a Z factor iff bit `q` of `z_mask` is set; both bits
//! together mean Y. With the single-qubit convention `P(x,z) = i^{x z} X^x Z^z`
//! products reduce to XORs of the masks plus a global phase in {1, i, -1, -i}
//! obtained from popcounts, and two strings either commute or anticommute
//! according to the parity of the symplectic form.
//!
//! Weighted sums of strings ([`OperatorSum`]) are kept in a canonical order
//! (lexicographic by `(x_mask, z_mask)`), so merging, pruning and iteration
//! are deterministic.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Weights with modulus at or below this are dropped by the default prune pass.
pub const DEFAULT_PRUNE_TOL: f64 = 1e-12;

/// Largest register representable by the `u64` masks.
pub const MAX_QUBITS: u32 = 64;

/// Largest register for which product expansion uses a dense scratch table
/// (`4^n` complex slots); larger registers fall back to an ordered map.
const DENSE_QUBIT_LIMIT: u32 = 10;

/// Multiply a complex weight by `i^e`.
#[inline(always)]
fn mul_i_pow(w: Complex64, e: u32) -> Complex64 {
    match e & 3 {
        0 => w,
        1 => Complex64::new(-w.im, w.re),
        2 => Complex64::new(-w.re, -w.im),
        _ => Complex64::new(w.im, -w.re),
    }
}

/// Exponent `e` of the phase `i^e` in `P(x1,z1) * P(x2,z2) = i^e P(x1^x2, z1^z2)`.
#[inline(always)]
fn phase_exponent(x1: u64, z1: u64, x2: u64, z2: u64) -> u32 {
    let s1 = (x1 & z1).count_ones();
    let s2 = (x2 & z2).count_ones();
    let s3 = ((x1 ^ x2) & (z1 ^ z2)).count_ones();
    let t = (z1 & x2).count_ones();
    // All counts are <= 64, so adding 256 (= 0 mod 4) keeps the sum positive.
    (s1 + s2 + 2 * t + 256 - s3) & 3
}

/// Parity of the symplectic form; `true` means the strings anticommute.
#[inline(always)]
fn masks_anticommute(x1: u64, z1: u64, x2: u64, z2: u64) -> bool {
    ((x1 & z2).count_ones() + (z1 & x2).count_ones()) & 1 == 1
}

/// A single Pauli string on `n` qubits.
///
/// Ordering is lexicographic by `(x_mask, z_mask)`, which is the canonical
/// term order used throughout the crate.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliTerm {
    x: u64,
    z: u64,
    n: u32,
}

impl PauliTerm {
    /// Build a string from explicit masks; bits outside the register are rejected.
    pub fn new(n: u32, x_mask: u64, z_mask: u64) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::QubitCap {
                qubits: n,
                cap: MAX_QUBITS,
            });
        }
        let allowed = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        if x_mask & !allowed != 0 || z_mask & !allowed != 0 {
            return Err(Error::IndexOutOfRange {
                index: 63 - (x_mask | z_mask).leading_zeros() as usize,
                n,
            });
        }
        Ok(Self {
            x: x_mask,
            z: z_mask,
            n,
        })
    }

    /// The identity string on `n` qubits.
    pub fn identity(n: u32) -> Self {
        Self { x: 0, z: 0, n }
    }

    /// Single-qubit X at `q`.
    pub fn x_at(n: u32, q: usize) -> Result<Self> {
        Self::new(n, 1u64 << q, 0)
    }

    /// Single-qubit Y at `q`.
    pub fn y_at(n: u32, q: usize) -> Result<Self> {
        Self::new(n, 1u64 << q, 1u64 << q)
    }

    /// Single-qubit Z at `q`.
    pub fn z_at(n: u32, q: usize) -> Result<Self> {
        Self::new(n, 0, 1u64 << q)
    }

    /// Number of qubits in the register.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// X-part bitmask.
    pub fn x_mask(&self) -> u64 {
        self.x
    }

    /// Z-part bitmask.
    pub fn z_mask(&self) -> u64 {
        self.z
    }

    /// Number of Y factors in the string.
    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// True iff every qubit carries the identity.
    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// True iff `self` and `other` anticommute.
    pub fn anticommutes_with(&self, other: &Self) -> bool {
        masks_anticommute(self.x, self.z, other.x, other.z)
    }

    /// True iff `self` and `other` commute.
    pub fn commutes_with(&self, other: &Self) -> bool {
        !self.anticommutes_with(other)
    }

    /// Product of two strings: a unit phase and the resulting string.
    pub fn multiply(&self, other: &Self) -> Result<(Complex64, Self)> {
        if self.n != other.n {
            return Err(Error::QubitMismatch(self.n, other.n));
        }
        let e = phase_exponent(self.x, self.z, other.x, other.z);
        let phase = mul_i_pow(Complex64::new(1.0, 0.0), e);
        Ok((
            phase,
            Self {
                x: self.x ^ other.x,
                z: self.z ^ other.z,
                n: self.n,
            },
        ))
    }

    /// Label over `{I,X,Y,Z}` with qubit 0 leftmost.
    pub fn label(&self) -> String {
        (0..self.n)
            .map(|q| match ((self.x >> q) & 1, (self.z >> q) & 1) {
                (0, 0) => 'I',
                (1, 0) => 'X',
                (1, 1) => 'Y',
                _ => 'Z',
            })
            .collect()
    }
}

impl fmt::Debug for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliTerm({})", self.label())
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for PauliTerm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n = s.len() as u32;
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::BadLabel(s.to_string()));
        }
        let (mut x, mut z) = (0u64, 0u64);
        for (q, c) in s.chars().enumerate() {
            match c {
                'I' => {}
                'X' => x |= 1 << q,
                'Y' => {
                    x |= 1 << q;
                    z |= 1 << q;
                }
                'Z' => z |= 1 << q,
                _ => return Err(Error::BadLabel(s.to_string())),
            }
        }
        Ok(Self { x, z, n })
    }
}

/// One serialized term of an [`OperatorSum`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliRecord {
    /// Label over `{I,X,Y,Z}`, qubit 0 leftmost.
    pub pauli_label: String,
    /// Real part of the weight.
    pub weight_re: f64,
    /// Imaginary part of the weight.
    pub weight_im: f64,
}

/// Which pairs a product expansion keeps.
#[derive(Clone, Copy, PartialEq, Eq)]
enum PairRule {
    /// All pairs, unit factor: the plain operator product.
    Product,
    /// Anticommuting pairs only, factor 2: the commutator.
    Commutator,
    /// Commuting pairs only, factor 2: the anticommutator.
    Anticommutator,
}

/// A complex-weighted sum of Pauli strings in canonical term order.
#[derive(Clone, PartialEq)]
pub struct OperatorSum {
    n: u32,
    terms: Vec<(PauliTerm, Complex64)>,
}

impl OperatorSum {
    /// The empty sum (zero operator) on `n` qubits.
    pub fn empty(n: u32) -> Self {
        Self {
            n,
            terms: Vec::new(),
        }
    }

    /// Build from unordered terms: validates the register, sorts into
    /// canonical order, merges duplicates and drops exact zeros.
    pub fn from_terms(n: u32, terms: Vec<(PauliTerm, Complex64)>) -> Result<Self> {
        for (t, _) in &terms {
            if t.n != n {
                return Err(Error::QubitMismatch(t.n, n));
            }
        }
        let mut terms = terms;
        terms.sort_unstable_by_key(|t| t.0);
        let mut merged: Vec<(PauliTerm, Complex64)> = Vec::with_capacity(terms.len());
        for (t, w) in terms {
            match merged.last_mut() {
                Some((last, lw)) if *last == t => *lw += w,
                _ => merged.push((t, w)),
            }
        }
        merged.retain(|(_, w)| w.norm_sqr() > 0.0);
        Ok(Self { n, terms: merged })
    }

    /// Convenience constructor from `(label, weight)` pairs.
    pub fn from_labeled(pairs: &[(&str, Complex64)]) -> Result<Self> {
        let n = pairs
            .first()
            .map(|(l, _)| l.len() as u32)
            .ok_or_else(|| Error::BadLabel("empty term list".into()))?;
        let terms = pairs
            .iter()
            .map(|(l, w)| Ok((l.parse::<PauliTerm>()?, *w)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(n, terms)
    }

    /// Number of qubits in the register.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Number of stored terms.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// True iff the sum is the zero operator.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> &[(PauliTerm, Complex64)] {
        &self.terms
    }

    /// Weight of `term`, or zero if absent.
    pub fn weight_of(&self, term: &PauliTerm) -> Complex64 {
        match self.terms.binary_search_by(|(t, _)| t.cmp(term)) {
            Ok(i) => self.terms[i].1,
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    /// Weight of the identity string.
    pub fn identity_weight(&self) -> Complex64 {
        self.weight_of(&PauliTerm::identity(self.n))
    }

    /// Sum of weight moduli.
    pub fn norm_l1(&self) -> f64 {
        self.terms.iter().map(|(_, w)| w.norm()).sum()
    }

    /// `self + factor * other`, merged in canonical order.
    pub fn add_scaled(&self, other: &Self, factor: Complex64) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::QubitMismatch(self.n, other.n));
        }
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((b[j].0, factor * b[j].1));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + factor * b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend(b[j..].iter().map(|(t, w)| (*t, factor * *w)));
        out.retain(|(_, w)| w.norm_sqr() > 0.0);
        Ok(Self {
            n: self.n,
            terms: out,
        })
    }

    /// `self + other`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.add_scaled(other, Complex64::new(1.0, 0.0))
    }

    /// `self - other`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add_scaled(other, Complex64::new(-1.0, 0.0))
    }

    /// `factor * self`.
    pub fn scaled(&self, factor: Complex64) -> Self {
        let mut terms: Vec<_> = self.terms.iter().map(|(t, w)| (*t, factor * *w)).collect();
        terms.retain(|(_, w)| w.norm_sqr() > 0.0);
        Self { n: self.n, terms }
    }

    /// Hermitian adjoint; Pauli strings are self-adjoint, so only the
    /// weights are conjugated and the canonical order is preserved.
    pub fn dagger(&self) -> Self {
        Self {
            n: self.n,
            terms: self.terms.iter().map(|(t, w)| (*t, w.conj())).collect(),
        }
    }

    /// True iff the operator is Hermitian within `tol`
    /// (all weights real, since each Pauli string is Hermitian).
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.iter().all(|(_, w)| w.im.abs() <= tol)
    }

    /// Drop terms with `|weight| <= tol`.
    pub fn pruned(mut self, tol: f64) -> Self {
        self.terms.retain(|(_, w)| w.norm_sqr() > tol * tol);
        self
    }

    /// Largest `|weight_a - weight_b|` over the union of both supports.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        let (a, b) = (&self.terms, &other.terms);
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let d = if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
                i += 1;
                a[i - 1].1.norm()
            } else if i >= a.len() || b[j].0 < a[i].0 {
                j += 1;
                b[j - 1].1.norm()
            } else {
                i += 1;
                j += 1;
                (a[i - 1].1 - b[j - 1].1).norm()
            };
            worst = worst.max(d);
        }
        worst
    }

    /// Operator product `self * other`, pruned at `tol`.
    pub fn product(&self, other: &Self, tol: f64) -> Result<Self> {
        self.pair_expand(other, PairRule::Product, tol)
    }

    /// Commutator `[self, other]`, pruned at `tol`. Only anticommuting
    /// string pairs contribute, so canceling pairs are never materialized.
    pub fn commutator(&self, other: &Self, tol: f64) -> Result<Self> {
        self.pair_expand(other, PairRule::Commutator, tol)
    }

    /// Anticommutator `{self, other}`, pruned at `tol`. Only commuting
    /// string pairs contribute.
    pub fn anticommutator(&self, other: &Self, tol: f64) -> Result<Self> {
        self.pair_expand(other, PairRule::Anticommutator, tol)
    }

    fn pair_expand(&self, other: &Self, rule: PairRule, tol: f64) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::QubitMismatch(self.n, other.n));
        }
        if self.n <= DENSE_QUBIT_LIMIT {
            Ok(self.pair_expand_dense(other, rule, tol))
        } else {
            Ok(self.pair_expand_sparse(other, rule, tol))
        }
    }

    /// Dense expansion: accumulate into a `4^n` scratch table indexed by
    /// `(x_mask << n) | z_mask`, whose ascending order is exactly the
    /// canonical term order.
    fn pair_expand_dense(&self, other: &Self, rule: PairRule, tol: f64) -> Self {
        let n = self.n;
        let factor = if rule == PairRule::Product { 1.0 } else { 2.0 };
        let mut acc = vec![Complex64::new(0.0, 0.0); 1usize << (2 * n)];
        for &(ta, wa) in &self.terms {
            let (x1, z1) = (ta.x, ta.z);
            for &(tb, wb) in &other.terms {
                let anti = masks_anticommute(x1, z1, tb.x, tb.z);
                match rule {
                    PairRule::Commutator if !anti => continue,
                    PairRule::Anticommutator if anti => continue,
                    _ => {}
                }
                let e = phase_exponent(x1, z1, tb.x, tb.z);
                let key = (((x1 ^ tb.x) as usize) << n) | (z1 ^ tb.z) as usize;
                acc[key] += mul_i_pow(wa * wb, e).scale(factor);
            }
        }
        let mut terms = Vec::new();
        let zmask = (1usize << n) - 1;
        for (key, w) in acc.into_iter().enumerate() {
            if w.norm_sqr() > tol * tol {
                terms.push((
                    PauliTerm {
                        x: (key >> n) as u64,
                        z: (key & zmask) as u64,
                        n,
                    },
                    w,
                ));
            }
        }
        Self { n, terms }
    }

    /// Ordered-map expansion for registers too large for the dense table.
    fn pair_expand_sparse(&self, other: &Self, rule: PairRule, tol: f64) -> Self {
        let n = self.n;
        let factor = if rule == PairRule::Product { 1.0 } else { 2.0 };
        let mut acc: BTreeMap<(u64, u64), Complex64> = BTreeMap::new();
        for &(ta, wa) in &self.terms {
            for &(tb, wb) in &other.terms {
                let anti = masks_anticommute(ta.x, ta.z, tb.x, tb.z);
                match rule {
                    PairRule::Commutator if !anti => continue,
                    PairRule::Anticommutator if anti => continue,
                    _ => {}
                }
                let e = phase_exponent(ta.x, ta.z, tb.x, tb.z);
                let w = mul_i_pow(wa * wb, e).scale(factor);
                *acc.entry((ta.x ^ tb.x, ta.z ^ tb.z))
                    .or_insert_with(|| Complex64::new(0.0, 0.0)) += w;
            }
        }
        let terms = acc
            .into_iter()
            .filter(|(_, w)| w.norm_sqr() > tol * tol)
            .map(|((x, z), w)| (PauliTerm { x, z, n }, w))
            .collect();
        Self { n, terms }
    }

    /// Serialize to records in canonical order.
    pub fn to_records(&self) -> Vec<PauliRecord> {
        self.terms
            .iter()
            .map(|(t, w)| PauliRecord {
                pauli_label: t.label(),
                weight_re: w.re,
                weight_im: w.im,
            })
            .collect()
    }

    /// Rebuild from serialized records.
    pub fn from_records(n: u32, records: &[PauliRecord]) -> Result<Self> {
        let terms = records
            .iter()
            .map(|r| {
                Ok((
                    r.pauli_label.parse::<PauliTerm>()?,
                    Complex64::new(r.weight_re, r.weight_im),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(n, terms)
    }
}

impl fmt::Debug for OperatorSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0 (on {} qubits)", self.n);
        }
        let body = self
            .terms
            .iter()
            .map(|(t, w)| format!("({:+.6}{:+.6}i)*{}", w.re, w.im, t.label()))
            .collect::<Vec<_>>()
            .join(" + ");
        f.write_str(&body)
    }
}
