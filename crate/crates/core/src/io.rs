//! CSV and JSON emitters for the artifact's file formats.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::dynamics::ComplexityTrace;
use crate::error::Result;
use crate::krylov::{LanczosResult, Termination};
use crate::normalize::CurveSet;
use crate::spin_model::SpinChainParams;

/// JSON record for one Lanczos run: `{params, operator, K, b[], termination}`.
#[derive(Debug, Clone, Serialize)]
pub struct LanczosRecord {
    pub params: SpinChainParams,
    pub operator: String,
    pub k: usize,
    pub b: Vec<f64>,
    pub termination: Termination,
}

impl LanczosRecord {
    pub fn new(params: SpinChainParams, operator: impl Into<String>, result: &LanczosResult) -> Self {
        Self {
            params,
            operator: operator.into(),
            k: result.k_dim,
            b: result.b.clone(),
            termination: result.termination,
        }
    }
}

/// JSON summary of a complexity trace: `{k, tau, kc_mean, kc_std}`.
#[derive(Debug, Clone, Serialize)]
pub struct TraceSummary {
    pub k: usize,
    pub tau: f64,
    pub kc_mean: f64,
    pub kc_std: f64,
}

impl From<&ComplexityTrace> for TraceSummary {
    fn from(trace: &ComplexityTrace) -> Self {
        Self {
            k: trace.occupations.ncols(),
            tau: trace.tau,
            kc_mean: trace.kc_mean,
            kc_std: trace.kc_std,
        }
    }
}

/// `n,b_n` rows, 1-based.
pub fn write_b_csv<W: Write>(mut w: W, b: &[f64]) -> Result<()> {
    writeln!(w, "n,b_n")?;
    for (i, v) in b.iter().enumerate() {
        writeln!(w, "{},{v:.12e}", i + 1)?;
    }
    Ok(())
}

/// `t,kc` rows.
pub fn write_trace_csv<W: Write>(mut w: W, times: &[f64], kc: &[f64]) -> Result<()> {
    writeln!(w, "t,kc")?;
    for (t, v) in times.iter().zip(kc) {
        writeln!(w, "{t:.9e},{v:.9e}")?;
    }
    Ok(())
}

/// `bin_center,count` rows.
pub fn write_histogram_csv<W: Write>(mut w: W, bins: &[(f64, usize)]) -> Result<()> {
    writeln!(w, "bin_center,count")?;
    for (center, count) in bins {
        writeln!(w, "{center:.9e},{count}")?;
    }
    Ok(())
}

/// `hz,r_mean,eta` rows.
pub fn write_eta_csv<W: Write>(mut w: W, rows: &[(f64, f64, f64)]) -> Result<()> {
    writeln!(w, "hz,r_mean,eta")?;
    for (hz, r_mean, eta) in rows {
        writeln!(w, "{hz:.9e},{r_mean:.9e},{eta:.9e}")?;
    }
    Ok(())
}

/// Full sweep table: `hz,eta,sigma_raw,kc_raw,sigma_norm,kc_norm`.
pub fn write_curves_csv<W: Write>(mut w: W, curves: &CurveSet) -> Result<()> {
    writeln!(w, "hz,eta,sigma_raw,kc_raw,sigma_norm,kc_norm")?;
    for i in 0..curves.hz.len() {
        writeln!(
            w,
            "{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e}",
            curves.hz[i],
            curves.eta[i],
            curves.sigma_raw[i],
            curves.kc_raw[i],
            curves.sigma_norm[i],
            curves.kc_norm[i],
        )?;
    }
    Ok(())
}

/// Raw-only sweep table: `hz,eta,sigma_log,kc_mean`.
pub fn write_raw_curves_csv<W: Write>(mut w: W, curves: &CurveSet) -> Result<()> {
    writeln!(w, "hz,eta,sigma_log,kc_mean")?;
    for i in 0..curves.hz.len() {
        writeln!(
            w,
            "{:.9e},{:.9e},{:.9e},{:.9e}",
            curves.hz[i], curves.eta[i], curves.sigma_raw[i], curves.kc_raw[i],
        )?;
    }
    Ok(())
}

/// Pretty-printed JSON to a file path.
pub fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let file = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(file), value)?;
    Ok(())
}

/// Equal-width histogram over the data range.
pub fn histogram(values: &[f64], n_bins: usize) -> Vec<(f64, usize)> {
    if values.is_empty() || n_bins == 0 {
        return Vec::new();
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = ((max - min) / n_bins as f64).max(1e-300);
    let mut counts = vec![0usize; n_bins];
    for &v in values {
        let i = (((v - min) / width) as usize).min(n_bins - 1);
        counts[i] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| (min + (i as f64 + 0.5) * width, c))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn b_csv_has_header_and_one_based_index() {
        let mut buf = Vec::new();
        write_b_csv(&mut buf, &[1.5, 2.5]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "n,b_n");
        assert!(lines[1].starts_with("1,1.5"));
        assert!(lines[2].starts_with("2,2.5"));
    }

    #[test]
    fn histogram_counts_every_sample() {
        let values = [0.0, 0.1, 0.5, 0.9, 1.0, 1.0];
        let bins = histogram(&values, 4);
        assert_eq!(bins.len(), 4);
        assert_eq!(bins.iter().map(|(_, c)| c).sum::<usize>(), values.len());
    }
}
