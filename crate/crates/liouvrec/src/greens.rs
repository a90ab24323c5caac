//! Green's functions from recursion coefficients.
//!
//! The diagonal retarded Green's function of the seed mode is the Jacobi
//! continued fraction built from `(alphas, betas)`:
//!
//! ```text
//! G_rr(z) = 1 / (z - alpha_0 - beta_1^2 / (z - alpha_1 - beta_2^2 / ...))
//! ```
//!
//! equivalently the resolvent `(z - J)^{-1}_{00}` of the symmetric
//! tridiagonal (Jacobi) matrix, whose eigen-decomposition yields the pole
//! positions and residues directly. Off-diagonal elements are linear
//! combinations of the diagonal one through the measured overlap
//! coefficients `m_k` and two families of polynomials sharing the
//! three-term recursion `beta_{k+1} X_{k+1} = (z - alpha_k) X_k - beta_k X_{k-1}`:
//! first kind `L` (`L_0 = 1`) and second kind `Q` (`Q_0 = 0, Q_1 = -1/beta_1`),
//! giving `G_{r'r}(z) = sum_k m_k (Q_k(z) + L_k(z) G_rr(z))`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::recursion::{RecursionOutput, TerminationReason};

/// Jacobi continued-fraction coefficients: `betas` is one shorter than
/// `alphas`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuedFraction {
    /// Diagonal coefficients.
    pub alphas: Vec<f64>,
    /// Off-diagonal coefficients (positive).
    pub betas: Vec<f64>,
}

impl ContinuedFraction {
    /// Validate the length invariant.
    pub fn new(alphas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        if alphas.is_empty() || betas.len() + 1 != alphas.len() {
            return Err(Error::MetricInput(format!(
                "continued fraction needs len(betas) = len(alphas) - 1, got {} and {}",
                alphas.len(),
                betas.len()
            )));
        }
        Ok(Self { alphas, betas })
    }

    /// Depth of the fraction (number of levels).
    pub fn order(&self) -> usize {
        self.alphas.len()
    }

    /// Evaluate at `z` in the upper half plane, bottom level up.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if z.im <= 0.0 {
            return Err(Error::NotUpperHalfPlane(z.im));
        }
        let k = self.alphas.len();
        let mut g = Complex64::new(0.0, 0.0);
        for j in (0..k).rev() {
            let mut d = z - self.alphas[j];
            if j + 1 < k {
                d -= self.betas[j] * self.betas[j] * g;
            }
            g = d.inv();
        }
        Ok(g)
    }

    /// Exact pole positions and residues: eigenvalues of the Jacobi matrix
    /// and squared first components of its (normalized) eigenvectors.
    /// Residues sum to 1.
    pub fn poles_residues(&self) -> DiscreteSpectrum {
        let k = self.alphas.len();
        let jacobi = DMatrix::from_fn(k, k, |i, j| {
            if i == j {
                self.alphas[i]
            } else if i.abs_diff(j) == 1 {
                self.betas[i.min(j)]
            } else {
                0.0
            }
        });
        let eig = jacobi.symmetric_eigen();
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
        let mut poles = Vec::with_capacity(k);
        let mut weights = Vec::with_capacity(k);
        for &i in &order {
            poles.push(eig.eigenvalues[i]);
            let first = eig.eigenvectors[(0, i)];
            weights.push(first * first);
        }
        DiscreteSpectrum { poles, weights }
    }

    /// First- and second-kind polynomials `L_0..L_max_index`,
    /// `Q_0..Q_max_index` at `z` (real axis allowed).
    pub fn polynomials(
        &self,
        z: Complex64,
        max_index: usize,
    ) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        if max_index >= self.alphas.len() {
            return Err(Error::TruncationOutOfRange {
                k: max_index,
                available: self.alphas.len(),
            });
        }
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let mut l = vec![one];
        let mut q = vec![zero];
        if max_index >= 1 {
            l.push((z - self.alphas[0]) / self.betas[0]);
            q.push(Complex64::new(-1.0 / self.betas[0], 0.0));
            for k in 1..max_index {
                let next = |x: &Vec<Complex64>| {
                    ((z - self.alphas[k]) * x[k] - self.betas[k - 1] * x[k - 1]) / self.betas[k]
                };
                let (ln, qn) = (next(&l), next(&q));
                l.push(ln);
                q.push(qn);
            }
        }
        Ok((l, q))
    }
}

impl RecursionOutput {
    /// The coefficients available for Green's function assembly: `k` of the
    /// measured alphas (`k >= 1`).
    ///
    /// Asking beyond the recorded depth is allowed only when the run
    /// terminated because the residual vanished — from that point on the
    /// fraction is exact and deeper truncations coincide with it — and
    /// returns the full fraction. After a `k_max` stop the deeper
    /// coefficients genuinely do not exist, so the request is an error.
    pub fn continued_fraction(&self, k: usize) -> Result<ContinuedFraction> {
        let available = self.alphas.len();
        if k == 0 {
            return Err(Error::TruncationOutOfRange { k, available });
        }
        if k > available {
            match self.termination.reason {
                TerminationReason::KMaxReached => {
                    return Err(Error::TruncationOutOfRange { k, available })
                }
                TerminationReason::BetaVanished | TerminationReason::NegativeNormClamped => {
                    return self.continued_fraction(available)
                }
            }
        }
        ContinuedFraction::new(
            self.alphas[..k].to_vec(),
            self.betas[..k.saturating_sub(1)].to_vec(),
        )
    }

    /// The overlap row of target index `t` truncated to match the
    /// iteration-`k` fraction (coefficients `m_0..m_{k-1}`).
    pub fn m_row(&self, t: usize, k: usize) -> Result<Vec<f64>> {
        let row = self.m_coeffs.get(t).ok_or(Error::MissingColumn(t))?;
        let take = k.min(row.len());
        Ok(row[..take].to_vec())
    }
}

/// A sum of weighted delta functions on the frequency axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteSpectrum {
    /// Positions, ascending.
    pub poles: Vec<f64>,
    /// Weight of each pole.
    pub weights: Vec<f64>,
}

impl DiscreteSpectrum {
    /// Sum of all weights.
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Merge poles closer than `tol` (weights added) and drop weights with
    /// `|w| < weight_tol`.
    pub fn merged(mut self, tol: f64, weight_tol: f64) -> Self {
        let mut order: Vec<usize> = (0..self.poles.len()).collect();
        order.sort_by(|&a, &b| self.poles[a].partial_cmp(&self.poles[b]).unwrap());
        let mut poles = Vec::new();
        let mut weights: Vec<f64> = Vec::new();
        for &i in &order {
            match poles.last() {
                Some(&last) if self.poles[i] - last <= tol => {
                    *weights.last_mut().unwrap() += self.weights[i];
                }
                _ => {
                    poles.push(self.poles[i]);
                    weights.push(self.weights[i]);
                }
            }
        }
        let keep: Vec<bool> = weights.iter().map(|w| w.abs() >= weight_tol).collect();
        self.poles = poles
            .into_iter()
            .zip(&keep)
            .filter_map(|(p, &k)| k.then_some(p))
            .collect();
        self.weights = weights
            .into_iter()
            .zip(&keep)
            .filter_map(|(w, &k)| k.then_some(w))
            .collect();
        self
    }

    /// Lorentzian-broadened density on a grid: each pole contributes
    /// `w * (eta/pi) / ((omega - pole)^2 + eta^2)`.
    pub fn broadened(&self, grid: &FrequencyGrid) -> SpectralDensity {
        let omegas = grid.omegas();
        let values = omegas
            .iter()
            .map(|&w| {
                self.poles
                    .iter()
                    .zip(&self.weights)
                    .map(|(&p, &wt)| {
                        wt * grid.eta / std::f64::consts::PI / ((w - p).powi(2) + grid.eta.powi(2))
                    })
                    .sum()
            })
            .collect();
        SpectralDensity { omegas, values }
    }
}

/// Off-diagonal element `G_{r'r}(z)` from the diagonal fraction of seed `r`,
/// its value `g_rr` at the same `z`, and the measured overlap row of `r'`.
pub fn offdiag_eval(
    cf: &ContinuedFraction,
    m_row: &[f64],
    g_rr: Complex64,
    z: Complex64,
) -> Result<Complex64> {
    let terms = m_row.len().min(cf.order());
    if terms == 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let (l, q) = cf.polynomials(z, terms - 1)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..terms {
        acc += m_row[j] * (q[j] + l[j] * g_rr);
    }
    Ok(acc)
}

/// Residues of `G_{r'r}` at the diagonal poles: at each pole `w_p` of the
/// diagonal fraction the off-diagonal residue is
/// `res_p * sum_j m_j L_j(w_p)`.
pub fn offdiag_residues(cf: &ContinuedFraction, m_row: &[f64]) -> Result<DiscreteSpectrum> {
    let diag = cf.poles_residues();
    let terms = m_row.len().min(cf.order());
    let mut weights = Vec::with_capacity(diag.poles.len());
    for (&pole, &res) in diag.poles.iter().zip(&diag.weights) {
        if terms == 0 {
            weights.push(0.0);
            continue;
        }
        let (l, _) = cf.polynomials(Complex64::new(pole, 0.0), terms - 1)?;
        let factor: f64 = m_row
            .iter()
            .take(terms)
            .zip(&l)
            .map(|(m, lj)| m * lj.re)
            .sum();
        weights.push(res * factor);
    }
    Ok(DiscreteSpectrum {
        poles: diag.poles,
        weights,
    })
}

/// Uniform frequency grid with a broadening for evaluating retarded
/// functions just above the real axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    /// Lowest frequency.
    pub omega_min: f64,
    /// Highest frequency.
    pub omega_max: f64,
    /// Grid spacing.
    pub step: f64,
    /// Lorentzian broadening `eta` (evaluation at `omega + i eta`).
    pub eta: f64,
}

impl Default for FrequencyGrid {
    fn default() -> Self {
        Self {
            omega_min: -10.0,
            omega_max: 10.0,
            step: 0.01,
            eta: 0.05,
        }
    }
}

impl FrequencyGrid {
    /// The grid points, inclusive of both ends.
    pub fn omegas(&self) -> Vec<f64> {
        let n = ((self.omega_max - self.omega_min) / self.step).round() as usize + 1;
        (0..n)
            .map(|i| self.omega_min + i as f64 * self.step)
            .collect()
    }
}

/// A spectral function sampled on a frequency grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralDensity {
    /// Grid frequencies.
    pub omegas: Vec<f64>,
    /// `-Im G(omega + i eta) / pi` at each frequency.
    pub values: Vec<f64>,
}

impl SpectralDensity {
    /// Trapezoidal integral over the grid.
    pub fn total_weight(&self) -> f64 {
        trapezoid(&self.omegas, &self.values)
    }
}

/// Trapezoidal rule on a (not necessarily uniform) grid.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (ys[0] + ys[1]) * (xs[1] - xs[0]))
        .sum()
}

/// Broadened spectral function of the diagonal element.
pub fn diagonal_density(cf: &ContinuedFraction, grid: &FrequencyGrid) -> Result<SpectralDensity> {
    let omegas = grid.omegas();
    let values = omegas
        .iter()
        .map(|&w| {
            cf.eval(Complex64::new(w, grid.eta))
                .map(|g| -g.im / std::f64::consts::PI)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectralDensity { omegas, values })
}

/// Broadened spectral function of an off-diagonal element (may be negative).
pub fn offdiag_density(
    cf: &ContinuedFraction,
    m_row: &[f64],
    grid: &FrequencyGrid,
) -> Result<SpectralDensity> {
    let omegas = grid.omegas();
    let values = omegas
        .iter()
        .map(|&w| {
            let z = Complex64::new(w, grid.eta);
            let g_rr = cf.eval(z)?;
            offdiag_eval(cf, m_row, g_rr, z).map(|g| -g.im / std::f64::consts::PI)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectralDensity { omegas, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::{exact_ground_state, MeasurementBackend};
    use crate::lattice::HubbardChain;
    use crate::recursion::{run_recursion, RecursionSettings};

    fn free_chain_cf() -> ContinuedFraction {
        ContinuedFraction::new(vec![0.0; 4], vec![1.0; 3]).unwrap()
    }

    #[test]
    fn atomic_fraction_is_single_pole() {
        let cf = ContinuedFraction::new(vec![-2.0], vec![]).unwrap();
        let z = Complex64::new(0.5, 0.3);
        let g = cf.eval(z).unwrap();
        assert!((g - (z + 2.0).inv()).norm() < 1e-15);
        let spec = cf.poles_residues();
        assert_eq!(spec.poles, vec![-2.0]);
        assert!((spec.weights[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eval_requires_upper_half_plane() {
        let cf = ContinuedFraction::new(vec![0.0], vec![]).unwrap();
        assert!(cf.eval(Complex64::new(1.0, 0.0)).is_err());
        assert!(cf.eval(Complex64::new(1.0, -0.1)).is_err());
    }

    #[test]
    fn mismatched_lengths_are_rejected() {
        assert!(ContinuedFraction::new(vec![0.0, 1.0], vec![]).is_err());
        assert!(ContinuedFraction::new(vec![], vec![]).is_err());
    }

    /// The free-chain fraction {alphas 0; betas 1,1,1} carries the open
    /// 4-chain spectrum: poles at ±phi, ±(phi−1), residues
    /// (5∓sqrt5)/20 (edge-site weights of the chain eigenvectors).
    #[test]
    fn free_chain_poles_and_residues() {
        let spec = free_chain_cf().poles_residues();
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        let expected_poles = [-phi, -(phi - 1.0), phi - 1.0, phi];
        let lo = (5.0 - 5.0f64.sqrt()) / 20.0;
        let hi = (5.0 + 5.0f64.sqrt()) / 20.0;
        let expected_weights = [lo, hi, hi, lo];
        for ((p, w), (ep, ew)) in spec
            .poles
            .iter()
            .zip(&spec.weights)
            .zip(expected_poles.iter().zip(&expected_weights))
        {
            assert!((p - ep).abs() < 1e-12, "{p} vs {ep}");
            assert!((w - ew).abs() < 1e-12, "{w} vs {ew}");
        }
        assert!((spec.total_weight() - 1.0).abs() < 1e-12);
    }

    /// A continued fraction equals the partial-fraction sum over its poles.
    #[test]
    fn eval_matches_pole_sum() {
        let cf = ContinuedFraction::new(vec![0.3, -1.2, 0.7], vec![1.5, 0.9]).unwrap();
        let spec = cf.poles_residues();
        for z in [Complex64::new(1.0, 0.3), Complex64::new(-2.5, 0.05)] {
            let direct = cf.eval(z).unwrap();
            let summed: Complex64 = spec
                .poles
                .iter()
                .zip(&spec.weights)
                .map(|(&p, &w)| w * (z - p).inv())
                .sum();
            assert!((direct - summed).norm() < 1e-12);
        }
    }

    #[test]
    fn polynomial_low_orders() {
        let cf = ContinuedFraction::new(vec![0.5, -0.5, 0.0], vec![2.0, 1.0]).unwrap();
        let z = Complex64::new(1.5, 0.0);
        let (l, q) = cf.polynomials(z, 2).unwrap();
        assert_eq!(l[0], Complex64::new(1.0, 0.0));
        assert_eq!(q[0], Complex64::new(0.0, 0.0));
        // L_1 = (z - a0)/b1 = 1/2; Q_1 = -1/b1 = -1/2.
        assert!((l[1] - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        assert!((q[1] - Complex64::new(-0.5, 0.0)).norm() < 1e-15);
        // L_2 = ((z - a1) L_1 - b1 L_0)/b2 = (2*0.5 - 2)/1 = -1.
        assert!((l[2] - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        // Q_2 = ((z - a1) Q_1 - b1 Q_0)/b2 = -1.
        assert!((q[2] - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    /// Off-diagonal assembly against the analytic single-particle answer:
    /// for the free 4-chain, Res_{1,0}(pole_m) = v_m(1) v_m(0) with the
    /// chain eigenvectors.
    #[test]
    fn offdiag_residues_match_single_particle_oracle() {
        let model = HubbardChain {
            sites: 4,
            t: 1.0,
            u: 0.0,
            mu: 0.0,
        };
        let gs = exact_ground_state(&model).unwrap();
        let h = model.hamiltonian().unwrap();
        let backend = MeasurementBackend::exact(gs.state);
        let out = run_recursion(&h, 0, &[0, 1], &backend, &RecursionSettings::default()).unwrap();
        let cf = out.continued_fraction(4).unwrap();
        let m_row = out.m_row(1, 4).unwrap();
        let offdiag = offdiag_residues(&cf, &m_row).unwrap();

        // v_m(j) = sqrt(2/5) sin((j+1) m pi / 5); poles ascend with m = 1..4.
        let norm = (2.0 / 5.0f64).sqrt();
        for (idx, m) in (1..=4).enumerate() {
            let theta = m as f64 * std::f64::consts::PI / 5.0;
            let expected = (norm * theta.sin()) * (norm * (2.0 * theta).sin());
            assert!(
                (offdiag.weights[idx] - expected).abs() < 1e-10,
                "pole {idx}: {} vs {expected}",
                offdiag.weights[idx]
            );
        }
        // Completeness: off-diagonal weights sum to m_0 = delta_{r'r} = 0.
        assert!(offdiag.total_weight().abs() < 1e-10);
    }

    /// Off-diagonal values on the grid agree with the pole/residue form.
    #[test]
    fn offdiag_eval_matches_its_own_poles() {
        let model = HubbardChain {
            sites: 4,
            t: 1.0,
            u: 0.0,
            mu: 0.0,
        };
        let gs = exact_ground_state(&model).unwrap();
        let h = model.hamiltonian().unwrap();
        let backend = MeasurementBackend::exact(gs.state);
        let out = run_recursion(&h, 0, &[0, 1], &backend, &RecursionSettings::default()).unwrap();
        let cf = out.continued_fraction(4).unwrap();
        let m_row = out.m_row(1, 4).unwrap();
        let spec = offdiag_residues(&cf, &m_row).unwrap();
        let z = Complex64::new(0.4, 0.2);
        let g_rr = cf.eval(z).unwrap();
        let direct = offdiag_eval(&cf, &m_row, g_rr, z).unwrap();
        let summed: Complex64 = spec
            .poles
            .iter()
            .zip(&spec.weights)
            .map(|(&p, &w)| w * (z - p).inv())
            .sum();
        assert!((direct - summed).norm() < 1e-12);
    }

    #[test]
    fn truncation_semantics() {
        let model = HubbardChain {
            sites: 4,
            t: 1.0,
            u: 0.0,
            mu: 0.0,
        };
        let gs = exact_ground_state(&model).unwrap();
        let h = model.hamiltonian().unwrap();
        let backend = MeasurementBackend::exact(gs.state.clone());
        // Natural termination at k = 3: deeper requests return the full
        // (now exact) fraction.
        let natural = run_recursion(&h, 0, &[0], &backend, &RecursionSettings::default()).unwrap();
        let cf2 = natural.continued_fraction(2).unwrap();
        assert_eq!(cf2.order(), 2);
        let cf_deep = natural.continued_fraction(10).unwrap();
        assert_eq!(cf_deep.order(), 4);
        assert!(natural.continued_fraction(0).is_err());

        // A k_max stop refuses deeper requests.
        let clipped = run_recursion(
            &h,
            0,
            &[0],
            &MeasurementBackend::exact(gs.state),
            &RecursionSettings {
                k_max: 2,
                ..RecursionSettings::default()
            },
        )
        .unwrap();
        assert_eq!(clipped.alphas.len(), 3);
        assert!(clipped.continued_fraction(3).is_ok());
        assert!(matches!(
            clipped.continued_fraction(4),
            Err(Error::TruncationOutOfRange { .. })
        ));
    }

    #[test]
    fn grid_density_peak_and_normalization() {
        let cf = ContinuedFraction::new(vec![-2.0], vec![]).unwrap();
        let grid = FrequencyGrid::default();
        let density = diagonal_density(&cf, &grid).unwrap();
        assert_eq!(density.omegas.len(), 2001);
        // Peak at the pole: 1/(pi eta).
        let peak_idx = density
            .values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert!((density.omegas[peak_idx] - (-2.0)).abs() < 1e-9);
        let expected_peak = 1.0 / (std::f64::consts::PI * grid.eta);
        assert!((density.values[peak_idx] - expected_peak).abs() / expected_peak < 1e-4);
        // Integral close to 1 (Lorentzian tails leak a little).
        assert!((density.total_weight() - 1.0).abs() < 0.01);
    }

    #[test]
    fn merged_combines_close_poles() {
        let spec = DiscreteSpectrum {
            poles: vec![1.0, 1.0 + 1e-12, -0.5],
            weights: vec![0.25, 0.25, 0.5],
        };
        let merged = spec.merged(1e-10, 1e-12);
        assert_eq!(merged.poles.len(), 2);
        assert!((merged.poles[1] - 1.0).abs() < 1e-12);
        assert!((merged.weights[1] - 0.5).abs() < 1e-15);
        assert!((merged.total_weight() - 1.0).abs() < 1e-15);
    }
}
