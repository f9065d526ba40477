//! Wavefunction dynamics on the Krylov chain and the K-complexity.
//!
//! The hopping equation `d/dt phi_n = b_n phi_{n-1} - b_{n+1} phi_{n+1}`
//! with `phi_n(0) = delta_{0n}` is solved through one eigendecomposition of
//! the K x K symmetric tridiagonal matrix `T` with off-diagonal `b`:
//! `|phi_n(t)|^2 = |<n| e^{iTt} |0>|^2`. That keeps the evolution exactly
//! unitary and makes any time point an O(K^2) synthesis.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::krylov::population_std;
use crate::tridiag::eigh_tridiagonal;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Minimum number of samples required past the saturation time.
pub const MIN_SATURATION_SAMPLES: usize = 50;

/// Relative gap under which tridiagonal eigenvalues count as degenerate for
/// the infinite-time average.
const DEGENERACY_REL_TOL: f64 = 1e-9;

fn validate_coefficients(b: &[f64]) -> Result<()> {
    for (i, &v) in b.iter().enumerate() {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::NonPositiveCoefficient { index: i + 1, value: v });
        }
    }
    Ok(())
}

/// Spectral propagator for one Krylov chain.
///
/// Holds the eigendecomposition of `T`; each occupation profile is then a
/// pair of real matrix-vector products.
#[derive(Debug, Clone)]
pub struct ChainPropagator {
    lambda: Vec<f64>,
    /// Eigenvector matrix, column k for eigenvalue k.
    u: DMatrix<f64>,
    /// First-row weights `U_{0k}` (overlap of each mode with site 0).
    w0: DVector<f64>,
}

impl ChainPropagator {
    pub fn new(b: &[f64]) -> Result<Self> {
        validate_coefficients(b)?;
        let k = b.len() + 1;
        let eig = eigh_tridiagonal(&vec![0.0; k], b, true)?;
        let u = eig.eigenvectors.expect("vectors requested");
        let w0 = u.row(0).transpose();
        Ok(Self { lambda: eig.eigenvalues, u, w0 })
    }

    /// Krylov dimension K.
    pub fn k_dim(&self) -> usize {
        self.lambda.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.lambda
    }

    /// Occupation profile `|phi_n(t)|^2` at one time (any sign of `t`).
    pub fn occupations_at(&self, t: f64) -> DVector<f64> {
        let k = self.k_dim();
        let mut wc = DVector::<f64>::zeros(k);
        let mut ws = DVector::<f64>::zeros(k);
        for j in 0..k {
            let (s, c) = (self.lambda[j] * t).sin_cos();
            wc[j] = self.w0[j] * c;
            ws[j] = self.w0[j] * s;
        }
        let re = &self.u * wc;
        let im = &self.u * ws;
        DVector::from_fn(k, |n, _| re[n] * re[n] + im[n] * im[n])
    }

    /// Occupation profiles for a whole grid, one row per time.
    pub fn evolve(&self, times: &[f64]) -> DMatrix<f64> {
        let k = self.k_dim();
        let rows: Vec<DVector<f64>> = {
            #[cfg(feature = "parallel")]
            {
                times.par_iter().map(|&t| self.occupations_at(t)).collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                times.iter().map(|&t| self.occupations_at(t)).collect()
            }
        };
        DMatrix::from_fn(times.len(), k, |i, n| rows[i][n])
    }

    /// Infinite-time average of the K-complexity,
    /// `sum_n n sum_k |U_nk|^2 |U_0k|^2`, generalized over degenerate
    /// eigenvalue groups when the spectrum is not simple.
    pub fn infinite_time_average(&self) -> TimeAverage {
        let k = self.k_dim();
        let spread = (self.lambda[k - 1] - self.lambda[0]).abs().max(1e-300);
        let tol = DEGENERACY_REL_TOL * spread;

        let mut groups: Vec<std::ops::Range<usize>> = Vec::new();
        let mut start = 0;
        for j in 1..=k {
            if j == k || self.lambda[j] - self.lambda[j - 1] > tol {
                groups.push(start..j);
                start = j;
            }
        }
        let degenerate_groups = groups.iter().filter(|g| g.len() > 1).count();

        let mut value = 0.0;
        for n in 0..k {
            let mut pn = 0.0;
            for g in &groups {
                let amp: f64 = g.clone().map(|j| self.u[(n, j)] * self.w0[j]).sum();
                pn += amp * amp;
            }
            value += n as f64 * pn;
        }
        TimeAverage { value, degenerate_groups }
    }
}

/// Result of the analytic infinite-time average.
#[derive(Debug, Clone, Copy)]
pub struct TimeAverage {
    pub value: f64,
    /// Number of degenerate eigenvalue groups encountered (0 for the generic
    /// spectra this model produces; nonzero values deserve a warning).
    pub degenerate_groups: usize,
}

fn validate_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidTimeGrid);
    }
    if let Some(&t0) = times.first() {
        if t0 < 0.0 {
            return Err(Error::InvalidTimeGrid);
        }
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidTimeGrid);
    }
    Ok(())
}

/// Occupation profiles `|phi_n(t)|^2` on a sorted grid, one row per time.
/// `b` empty means K = 1 and the wavefunction never leaves site 0.
pub fn evolve(b: &[f64], times: &[f64]) -> Result<DMatrix<f64>> {
    validate_times(times)?;
    let prop = ChainPropagator::new(b)?;
    Ok(prop.evolve(times))
}

/// `K_C(t) = sum_n n |phi_n(t)|^2` for each occupation row.
pub fn k_complexity(occupations: &DMatrix<f64>) -> Vec<f64> {
    let weights = DVector::from_fn(occupations.ncols(), |n, _| n as f64);
    (occupations * weights).iter().copied().collect()
}

/// How the saturation onset time is chosen.
#[derive(Debug, Clone, Copy)]
pub enum TauPolicy {
    /// First time from which `K_C` stays within `rel_band` of `target` for
    /// `consecutive` samples; falls back to half the grid when no such
    /// window exists.
    PlateauBand {
        target: f64,
        rel_band: f64,
        consecutive: usize,
    },
    /// Fixed saturation time.
    FixedTime(f64),
    /// Second half of the grid.
    HalfGrid,
}

impl TauPolicy {
    /// The default policy: +-10% band around the infinite-time average held
    /// for 20 consecutive samples.
    pub fn default_band(target: f64) -> Self {
        TauPolicy::PlateauBand { target, rel_band: 0.10, consecutive: 20 }
    }

    fn resolve(&self, kc: &[f64], times: &[f64]) -> f64 {
        match *self {
            TauPolicy::FixedTime(t) => t,
            TauPolicy::HalfGrid => times[times.len() / 2],
            TauPolicy::PlateauBand { target, rel_band, consecutive } => {
                let band = rel_band * target.abs();
                let inside: Vec<bool> = kc.iter().map(|&v| (v - target).abs() <= band).collect();
                let mut run = 0usize;
                for i in 0..inside.len() {
                    run = if inside[i] { run + 1 } else { 0 };
                    if run >= consecutive {
                        return times[i + 1 - consecutive];
                    }
                }
                times[times.len() / 2]
            }
        }
    }
}

/// Late-time statistics of a K-complexity series.
#[derive(Debug, Clone, Copy)]
pub struct SaturationStats {
    /// Saturation onset; averaging runs over `t > tau`.
    pub tau: f64,
    pub mean: f64,
    /// Standard deviation over the window, reported as the uncertainty.
    pub std: f64,
    pub window_len: usize,
}

/// Mean and standard deviation of `K_C(t)` over `t > tau`.
pub fn saturation_stats(kc: &[f64], times: &[f64], policy: &TauPolicy) -> Result<SaturationStats> {
    if kc.len() != times.len() {
        return Err(Error::DimensionMismatch { left: kc.len(), right: times.len() });
    }
    validate_times(times)?;
    let tau = policy.resolve(kc, times);
    let window: Vec<f64> = times
        .iter()
        .zip(kc)
        .filter(|(&t, _)| t > tau)
        .map(|(_, &v)| v)
        .collect();
    if window.len() < MIN_SATURATION_SAMPLES {
        return Err(Error::InsufficientWindow { got: window.len(), needed: MIN_SATURATION_SAMPLES });
    }
    let mean = window.iter().sum::<f64>() / window.len() as f64;
    let std = population_std(&window);
    Ok(SaturationStats { tau, mean, std, window_len: window.len() })
}

/// Analytic late-time plateau of `K_C` (see
/// [`ChainPropagator::infinite_time_average`]).
pub fn infinite_time_average(b: &[f64]) -> Result<TimeAverage> {
    Ok(ChainPropagator::new(b)?.infinite_time_average())
}

/// Replace selected coefficients (1-based indices) with new values,
/// returning a modified copy. Everything downstream runs unchanged.
pub fn handpick(b: &[f64], edits: &[(usize, f64)]) -> Result<Vec<f64>> {
    let mut out = b.to_vec();
    for &(index, value) in edits {
        if index == 0 || index > out.len() {
            return Err(Error::TooShort { needed: index, got: out.len() });
        }
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::NonPositiveCoefficient { index, value });
        }
        out[index - 1] = value;
    }
    Ok(out)
}

/// Grid of `n_total` points: the first half log-spaced on
/// `[t_min, t_max/2)`, the rest uniform on `[t_max/2, t_max]`. Saturation
/// statistics read from the uniform tail.
pub fn time_grid(n_total: usize, t_min: f64, t_max: f64) -> Vec<f64> {
    assert!(t_min > 0.0 && t_max > t_min && n_total >= 4);
    let n_log = n_total / 2;
    let n_tail = n_total - n_log;
    let t_mid = t_max / 2.0;
    let mut out = Vec::with_capacity(n_total);
    let (ln_min, ln_mid) = (t_min.ln(), t_mid.ln());
    for i in 0..n_log {
        let f = i as f64 / n_log as f64;
        out.push((ln_min + f * (ln_mid - ln_min)).exp());
    }
    for i in 0..n_tail {
        let f = i as f64 / (n_tail - 1) as f64;
        out.push(t_mid + f * (t_max - t_mid));
    }
    out
}

/// Default grid for a chain: 2000 points up to `t_max = 10 K / mean(b)`,
/// long enough to show growth, the transition and the plateau.
pub fn default_time_grid(b: &[f64]) -> Vec<f64> {
    let k = b.len() + 1;
    let b_mean = if b.is_empty() { 1.0 } else { b.iter().sum::<f64>() / b.len() as f64 };
    time_grid(2000, 0.01, 10.0 * k as f64 / b_mean)
}

/// Full evolution record for one chain: grid, occupations, K-complexity and
/// its late-time statistics.
#[derive(Debug, Clone)]
pub struct ComplexityTrace {
    pub times: Vec<f64>,
    /// `|phi_n(t)|^2`, one row per time, K columns.
    pub occupations: DMatrix<f64>,
    pub kc: Vec<f64>,
    pub tau: f64,
    pub kc_mean: f64,
    pub kc_std: f64,
}

impl ComplexityTrace {
    /// Evolve, reduce to `K_C`, and attach saturation statistics.
    pub fn compute(b: &[f64], times: Vec<f64>, policy: &TauPolicy) -> Result<Self> {
        let occupations = evolve(b, &times)?;
        let kc = k_complexity(&occupations);
        let stats = saturation_stats(&kc, &times, policy)?;
        Ok(Self {
            times,
            occupations,
            kc,
            tau: stats.tau,
            kc_mean: stats.mean,
            kc_std: stats.std,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_site_chain_never_moves() {
        let times: Vec<f64> = (0..200).map(|i| i as f64 * 0.1).collect();
        let occ = evolve(&[], &times).unwrap();
        assert_eq!(occ.ncols(), 1);
        assert!(occ.iter().all(|&p| (p - 1.0).abs() < 1e-12));
        let kc = k_complexity(&occ);
        assert!(kc.iter().all(|&v| v.abs() < 1e-12));
    }

    #[test]
    fn two_site_chain_is_a_rabi_oscillation() {
        let b = 1.7;
        let times: Vec<f64> = (0..500).map(|i| i as f64 * 0.02).collect();
        let occ = evolve(&[b], &times).unwrap();
        let kc = k_complexity(&occ);
        for (i, &t) in times.iter().enumerate() {
            let want = (b * t).sin().powi(2);
            assert_abs_diff_eq!(kc[i], want, epsilon = 1e-10);
            assert_abs_diff_eq!(occ[(i, 1)], want, epsilon = 1e-10);
        }
    }

    #[test]
    fn occupations_stay_normalized() {
        let b = [1.0, 0.5, 2.0, 1.5, 0.8];
        let times = default_time_grid(&b);
        let occ = evolve(&b, &times).unwrap();
        for i in 0..times.len() {
            let total: f64 = occ.row(i).iter().sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn occupations_are_even_in_time() {
        let prop = ChainPropagator::new(&[1.0, 0.4, 1.3]).unwrap();
        for t in [0.3, 1.7, 4.0] {
            let fwd = prop.occupations_at(t);
            let bwd = prop.occupations_at(-t);
            assert!((fwd - bwd).iter().all(|x| x.abs() < 1e-12));
        }
    }

    #[test]
    fn rescaling_coefficients_rescales_time() {
        let b = [0.7, 1.1, 0.9];
        let c = 2.5;
        let scaled: Vec<f64> = b.iter().map(|x| c * x).collect();
        let p1 = ChainPropagator::new(&b).unwrap();
        let p2 = ChainPropagator::new(&scaled).unwrap();
        for t in [0.2, 0.9, 3.1] {
            let a = p1.occupations_at(c * t);
            let bb = p2.occupations_at(t);
            assert!((a - bb).iter().all(|x| x.abs() < 1e-10));
        }
    }

    #[test]
    fn uniform_occupation_has_midpoint_complexity() {
        let k = 8;
        let occ = DMatrix::from_element(3, k, 1.0 / k as f64);
        let kc = k_complexity(&occ);
        for v in kc {
            assert_abs_diff_eq!(v, (k - 1) as f64 / 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn two_site_infinite_average_is_one_half() {
        let avg = infinite_time_average(&[1.3]).unwrap();
        assert_abs_diff_eq!(avg.value, 0.5, epsilon = 1e-12);
        assert_eq!(avg.degenerate_groups, 0);
    }

    #[test]
    fn early_growth_follows_b1_squared_t_squared() {
        let b = [1.4, 0.8, 1.9, 1.1];
        let prop = ChainPropagator::new(&b).unwrap();
        let t = 1e-3;
        let kc: f64 = prop
            .occupations_at(t)
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum();
        let leading = b[0] * b[0] * t * t;
        assert!((kc / leading - 1.0).abs() < 1e-3, "kc={kc} leading={leading}");
    }

    #[test]
    fn saturation_stats_of_constant_series() {
        let times: Vec<f64> = (0..200).map(|i| i as f64).collect();
        let kc = vec![5.0; 200];
        let stats = saturation_stats(&kc, &times, &TauPolicy::HalfGrid).unwrap();
        assert_abs_diff_eq!(stats.mean, 5.0);
        assert_abs_diff_eq!(stats.std, 0.0);
    }

    #[test]
    fn short_window_is_rejected() {
        let times: Vec<f64> = (0..60).map(|i| i as f64).collect();
        let kc = vec![1.0; 60];
        let err = saturation_stats(&kc, &times, &TauPolicy::FixedTime(55.0)).unwrap_err();
        assert!(matches!(err, Error::InsufficientWindow { .. }));
    }

    #[test]
    fn handpick_edits_apply_and_validate() {
        let b = [1.0, 2.0, 3.0];
        assert_eq!(handpick(&b, &[]).unwrap(), b.to_vec());
        assert_eq!(handpick(&b, &[(1, 5.0), (3, 0.5)]).unwrap(), vec![5.0, 2.0, 0.5]);
        assert!(matches!(
            handpick(&b, &[(2, -1.0)]),
            Err(Error::NonPositiveCoefficient { index: 2, .. })
        ));
        assert!(matches!(handpick(&b, &[(4, 1.0)]), Err(Error::TooShort { .. })));
    }

    #[test]
    fn doubling_b_doubles_the_rabi_frequency() {
        let times: Vec<f64> = (0..300).map(|i| i as f64 * 0.01).collect();
        let edited = handpick(&[1.0], &[(1, 2.0)]).unwrap();
        let occ = evolve(&edited, &times).unwrap();
        for (i, &t) in times.iter().enumerate() {
            assert_abs_diff_eq!(occ[(i, 1)], (2.0 * t).sin().powi(2), epsilon = 1e-10);
        }
    }

    #[test]
    fn evolve_rejects_unsorted_or_negative_grids() {
        assert!(matches!(evolve(&[1.0], &[0.0, 0.5, 0.4]), Err(Error::InvalidTimeGrid)));
        assert!(matches!(evolve(&[1.0], &[-1.0, 0.5]), Err(Error::InvalidTimeGrid)));
    }

    #[test]
    fn coefficients_must_be_positive() {
        assert!(matches!(
            evolve(&[1.0, -0.2], &[0.0, 1.0]),
            Err(Error::NonPositiveCoefficient { index: 2, .. })
        ));
    }

    #[test]
    fn default_grid_is_sorted_and_spans_the_plateau() {
        let b = vec![2.0; 50];
        let grid = default_time_grid(&b);
        assert_eq!(grid.len(), 2000);
        assert!(grid.windows(2).all(|w| w[1] > w[0]));
        assert_abs_diff_eq!(grid[0], 0.01);
        // 10 K / mean(b) = 10 * 51 / 2
        assert_abs_diff_eq!(*grid.last().unwrap(), 255.0, epsilon = 1e-9);
    }
}
