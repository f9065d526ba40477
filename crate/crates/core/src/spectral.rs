//! Spectral chaos diagnostics from consecutive level-spacing ratios.
//!
//! For a sorted spectrum `e_n` with spacings `s_n = e_{n+1} - e_n`, the
//! ratio statistic `r~_n = min(r_n, 1/r_n)`, `r_n = s_n / s_{n-1}`, averages
//! to 2 ln 2 - 1 for Poissonian (integrable) spectra and ~0.5307 for the
//! GOE. The normalized indicator
//! `eta = (<r~> - r~_P) / (r~_WD - r~_P)` is ~0 in the integrable regime and
//! ~1 in the chaotic one, with no unfolding required.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Poisson reference: `<r~> = 2 ln 2 - 1`.
pub const R_POISSON: f64 = 0.38629436111989063;

/// GOE reference, large-ensemble numerical value.
pub const R_WD_GOE: f64 = 0.5307;

/// GOE 3x3 surmise value `4 - 2 sqrt(3)`, selectable alternative.
pub const R_WD_GOE_SURMISE: f64 = 0.5358983848622456;

/// Reference constants and preprocessing for [`eta`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EtaOptions {
    pub r_poisson: f64,
    pub r_wigner_dyson: f64,
    /// Fraction of levels dropped from each spectral edge before computing
    /// ratios (0 = keep everything).
    pub trim_fraction: f64,
}

impl Default for EtaOptions {
    fn default() -> Self {
        Self { r_poisson: R_POISSON, r_wigner_dyson: R_WD_GOE, trim_fraction: 0.0 }
    }
}

/// Normalized chaos indicator for one spectrum.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EtaResult {
    pub r_mean: f64,
    pub eta: f64,
    pub n_levels: usize,
    /// Provenance of the spectrum (parity sector, synthetic ensemble, ...).
    pub label: String,
}

/// Ratio statistics `min(r_n, 1/r_n)` for a sorted spectrum.
///
/// Rejects unsorted input and spacings below `1e-12` of the spectral width,
/// which signal an undesymmetrized Hamiltonian.
pub fn spacing_ratios(energies: &[f64]) -> Result<Vec<f64>> {
    if energies.len() < 3 {
        return Err(Error::TooShort { needed: 3, got: energies.len() });
    }
    if energies.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::UnsortedSpectrum);
    }
    let width = energies[energies.len() - 1] - energies[0];
    let resolution = 1e-12 * width;
    let spacings: Vec<f64> = energies.windows(2).map(|w| w[1] - w[0]).collect();
    if let Some(&bad) = spacings.iter().find(|&&s| s <= resolution) {
        return Err(Error::DegenerateSpectrum { spacing: bad, resolution });
    }
    Ok(spacings
        .windows(2)
        .map(|w| {
            let r = w[1] / w[0];
            r.min(1.0 / r)
        })
        .collect())
}

/// Compute `eta` for a sorted spectrum.
pub fn eta(energies: &[f64], opts: &EtaOptions) -> Result<EtaResult> {
    let trimmed = trim_edges(energies, opts.trim_fraction)?;
    let ratios = spacing_ratios(trimmed)?;
    let r_mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    Ok(EtaResult {
        r_mean,
        eta: (r_mean - opts.r_poisson) / (opts.r_wigner_dyson - opts.r_poisson),
        n_levels: trimmed.len(),
        label: "spectrum".into(),
    })
}

fn trim_edges(energies: &[f64], fraction: f64) -> Result<&[f64]> {
    if !(0.0..0.5).contains(&fraction) {
        return Err(Error::InvalidConfig(format!("trim fraction {fraction} must be in [0, 0.5)")));
    }
    let drop = (energies.len() as f64 * fraction).floor() as usize;
    if energies.len() < 2 * drop + 3 {
        return Err(Error::TooShort { needed: 2 * drop + 3, got: energies.len() });
    }
    Ok(&energies[drop..energies.len() - drop])
}

/// Sorted i.i.d. uniform levels: a Poissonian synthetic spectrum.
pub fn poisson_spectrum(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut levels: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    levels.sort_by(f64::total_cmp);
    levels
}

/// Eigenvalues of one GOE sample, `(M + M^T)/2` with i.i.d. standard
/// Gaussian entries.
pub fn goe_spectrum(dim: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = nalgebra::DMatrix::<f64>::zeros(dim, dim);
    for j in 0..dim {
        for i in 0..=j {
            let v: f64 = StandardNormal.sample(&mut rng);
            let w: f64 = StandardNormal.sample(&mut rng);
            m[(i, j)] = if i == j { v } else { 0.5 * (v + w) };
            m[(j, i)] = m[(i, j)];
        }
    }
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Re-derived reference constants from synthetic ensembles.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Calibration {
    pub r_poisson: f64,
    pub r_wigner_dyson: f64,
    pub poisson_levels: usize,
    pub goe_levels: usize,
}

/// Estimate `r~_P` and `r~_WD` from synthetic ensembles; used by the
/// `calibrate` subcommand and the property suite.
pub fn calibrate(poisson_n: usize, goe_dim: usize, goe_samples: usize, seed: u64) -> Result<Calibration> {
    let p_ratios = spacing_ratios(&poisson_spectrum(poisson_n, seed))?;
    let r_poisson = p_ratios.iter().sum::<f64>() / p_ratios.len() as f64;

    let mut all = Vec::new();
    for s in 0..goe_samples {
        let ev = goe_spectrum(goe_dim, seed.wrapping_add(1000 + s as u64));
        all.extend(spacing_ratios(&ev)?);
    }
    let r_wd = all.iter().sum::<f64>() / all.len() as f64;
    Ok(Calibration {
        r_poisson,
        r_wigner_dyson: r_wd,
        poisson_levels: poisson_n,
        goe_levels: goe_dim * goe_samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn equally_spaced_ladder_has_unit_ratios() {
        let ladder: Vec<f64> = (0..20).map(|i| 0.5 * i as f64).collect();
        let r = spacing_ratios(&ladder).unwrap();
        assert_eq!(r.len(), 18);
        assert!(r.iter().all(|&x| (x - 1.0).abs() < 1e-12));
    }

    #[test]
    fn three_level_example() {
        let r = spacing_ratios(&[0.0, 1.0, 3.0]).unwrap();
        assert_eq!(r.len(), 1);
        assert_abs_diff_eq!(r[0], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn ratios_live_in_unit_interval() {
        let levels = poisson_spectrum(5000, 3);
        for r in spacing_ratios(&levels).unwrap() {
            assert!(r > 0.0 && r <= 1.0);
        }
    }

    #[test]
    fn degenerate_spectrum_is_rejected() {
        let err = spacing_ratios(&[0.0, 1.0, 1.0, 2.0]).unwrap_err();
        assert!(matches!(err, Error::DegenerateSpectrum { .. }));
    }

    #[test]
    fn unsorted_spectrum_is_rejected() {
        assert!(matches!(spacing_ratios(&[0.0, 2.0, 1.0]), Err(Error::UnsortedSpectrum)));
    }

    #[test]
    fn short_spectrum_is_rejected() {
        assert!(matches!(spacing_ratios(&[0.0, 1.0]), Err(Error::TooShort { .. })));
    }

    #[test]
    fn eta_is_affine_invariant() {
        let levels = poisson_spectrum(2000, 5);
        let base = eta(&levels, &EtaOptions::default()).unwrap();

        // power-of-two scale, exact in floating point
        let doubled: Vec<f64> = levels.iter().map(|e| 2.0 * e).collect();
        let via_double = eta(&doubled, &EtaOptions::default()).unwrap();
        assert_eq!(base.eta, via_double.eta);

        // generic affine map, exact up to rounding
        let mapped: Vec<f64> = levels.iter().map(|e| 3.7 * e + 11.1).collect();
        let via_map = eta(&mapped, &EtaOptions::default()).unwrap();
        assert_abs_diff_eq!(base.eta, via_map.eta, epsilon = 1e-9);
    }

    #[test]
    fn trim_drops_edge_levels() {
        let levels = poisson_spectrum(1000, 7);
        let opts = EtaOptions { trim_fraction: 0.1, ..Default::default() };
        let res = eta(&levels, &opts).unwrap();
        assert_eq!(res.n_levels, 800);
    }

    #[test]
    fn synthetic_poisson_hits_the_reference_mean() {
        let levels = poisson_spectrum(100_000, 42);
        let res = eta(&levels, &EtaOptions::default()).unwrap();
        assert!((res.r_mean - R_POISSON).abs() < 0.005, "r_mean = {}", res.r_mean);
        assert!(res.eta.abs() < 0.05, "eta = {}", res.eta);
    }
}
