//! Presentation-only rescaling that puts sigma_log and <K_C> sweeps on the
//! eta scale so the three curves share one plot.
//!
//! A curve `X` is first scaled to the eta range,
//! `X' = X (max eta - min eta)/(max X - min X)`, then shifted by the
//! Euclidean-distance minimizer `alpha* = mean(X' - eta)`. The shift uses
//! every point instead of a single extremum, so noise in one sample does not
//! displace the whole curve. Scientific conclusions (correlation signs) are
//! always drawn from the unnormalized data.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Map a series onto `[0, 1]`, endpoints included.
pub fn minmax01(x: &[f64]) -> Result<Vec<f64>> {
    let (min, max) = min_max(x)?;
    Ok(x.iter().map(|v| (v - min) / (max - min)).collect())
}

/// Scale `x` to the range of `eta` and shift it to minimize the Euclidean
/// distance to `eta` over all displacements.
///
/// Exact on positive-affine images: `normalize_to_eta(a*eta + c, eta)`
/// returns `eta` (up to rounding). Being a positive-affine map itself, it
/// preserves every pairwise ordering of `x`.
pub fn normalize_to_eta(x: &[f64], eta: &[f64]) -> Result<Vec<f64>> {
    if x.len() != eta.len() {
        return Err(Error::DimensionMismatch { left: x.len(), right: eta.len() });
    }
    let (x_min, x_max) = min_max(x)?;
    let (e_min, e_max) = min_max(eta)?;
    let scale = (e_max - e_min) / (x_max - x_min);
    let scaled: Vec<f64> = x.iter().map(|v| v * scale).collect();
    // argmin_alpha ||(X' - alpha) - eta|| in closed form
    let alpha = scaled
        .iter()
        .zip(eta)
        .map(|(xv, ev)| xv - ev)
        .sum::<f64>()
        / x.len() as f64;
    Ok(scaled.iter().map(|v| v - alpha).collect())
}

/// Flip the sign of a sigma_log curve so that it increases with chaos, as
/// the other indicators do. Applied before [`normalize_to_eta`].
pub fn orient_sigma(sigma: &[f64]) -> Vec<f64> {
    sigma.iter().map(|v| -v).collect()
}

fn min_max(x: &[f64]) -> Result<(f64, f64)> {
    if x.is_empty() {
        return Err(Error::TooShort { needed: 1, got: 0 });
    }
    let min = x.iter().copied().fold(f64::INFINITY, f64::min);
    let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(max > min) {
        return Err(Error::ConstantSeries);
    }
    Ok((min, max))
}

/// One sweep's curves on a shared `h_z` grid: eta plus the raw and
/// normalized dispersion and saturation series.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveSet {
    pub hz: Vec<f64>,
    pub eta: Vec<f64>,
    pub sigma_raw: Vec<f64>,
    pub kc_raw: Vec<f64>,
    /// `-sigma_log`, scaled and shifted onto the eta range.
    pub sigma_norm: Vec<f64>,
    pub kc_norm: Vec<f64>,
}

impl CurveSet {
    /// Assemble from raw sweep outputs; applies the `-sigma_log` orientation
    /// before normalizing.
    pub fn build(hz: Vec<f64>, eta: Vec<f64>, sigma: Vec<f64>, kc: Vec<f64>) -> Result<Self> {
        let n = hz.len();
        for len in [eta.len(), sigma.len(), kc.len()] {
            if len != n {
                return Err(Error::DimensionMismatch { left: len, right: n });
            }
        }
        let sigma_norm = normalize_to_eta(&orient_sigma(&sigma), &eta)?;
        let kc_norm = normalize_to_eta(&kc, &eta)?;
        Ok(Self { hz, eta, sigma_raw: sigma, kc_raw: kc, sigma_norm, kc_norm })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn minmax_maps_endpoints_to_unit_interval() {
        assert_eq!(minmax01(&[0.0, 5.0, 10.0]).unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(minmax01(&[-1.0, 0.0, 1.0]).unwrap(), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn minmax_is_idempotent() {
        let x = [3.0, -2.0, 7.5, 0.1, 4.4];
        let once = minmax01(&x).unwrap();
        let twice = minmax01(&once).unwrap();
        for (a, b) in once.iter().zip(&twice) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn constant_series_is_rejected() {
        assert!(matches!(minmax01(&[2.0, 2.0]), Err(Error::ConstantSeries)));
        assert!(matches!(
            normalize_to_eta(&[1.0, 1.0], &[0.0, 1.0]),
            Err(Error::ConstantSeries)
        ));
    }

    #[test]
    fn eta_itself_is_a_fixed_point() {
        let eta = [0.1, 0.9, 0.4, 0.2];
        let out = normalize_to_eta(&eta, &eta).unwrap();
        for (a, b) in out.iter().zip(&eta) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn affine_images_collapse_back_onto_eta() {
        let eta = [0.05, 0.2, 0.55, 0.95, 0.8, 0.3];
        let x: Vec<f64> = eta.iter().map(|e| 2.0 * e + 7.0).collect();
        let out = normalize_to_eta(&x, &eta).unwrap();
        for (a, b) in out.iter().zip(&eta) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn orientation_flips_sign_and_monotonicity() {
        assert_eq!(orient_sigma(&[0.3]), vec![-0.3]);
        let decreasing = [0.9, 0.5, 0.2];
        let flipped = orient_sigma(&decreasing);
        assert!(flipped.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn normalization_preserves_ordering() {
        let eta = [0.0, 0.3, 0.8, 1.0, 0.6];
        let x = [10.0, -3.0, 4.0, 8.0, 4.5];
        let out = normalize_to_eta(&x, &eta).unwrap();
        for i in 0..x.len() {
            for j in 0..x.len() {
                assert_eq!(x[i] < x[j], out[i] < out[j], "pair ({i},{j})");
            }
        }
    }

    #[test]
    fn curve_set_lengths_must_agree() {
        let err = CurveSet::build(vec![1.0, 2.0], vec![0.1, 0.9], vec![0.5], vec![1.0, 2.0]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }
}
