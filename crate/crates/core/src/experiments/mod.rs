//! Sweep orchestration: one (h_z, operator) point runs
//! build -> project -> lanczos -> evolve -> saturation statistics, and a
//! sweep fans points out over the h_z grid with an eta curve computed once
//! per h_z at its own (larger) chain length.

pub mod cache;
pub mod figures;
pub mod opspec;

use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dynamics::{self, ComplexityTrace, TauPolicy};
use crate::error::{Error, Result};
use crate::krylov::{self, LanczosOptions, OperatorVector, Termination};
use crate::normalize::CurveSet;
use crate::spectral::{self, EtaOptions};
use crate::spin_model::{build_parity_basis, build_sector_hamiltonian, Parity, SpinChainParams};

pub use cache::Cache;
pub use opspec::OperatorSpec;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Everything tunable about a single pipeline run.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PointOptions {
    pub lanczos_rel_tol: f64,
    pub lanczos_max_steps: Option<usize>,
    pub reorth_passes: usize,
    pub time_points: usize,
    pub t_min: f64,
    /// Relative half-width of the saturation detection band.
    pub tau_rel_band: f64,
    /// Samples that must stay inside the band.
    pub tau_consecutive: usize,
}

impl Default for PointOptions {
    fn default() -> Self {
        Self {
            lanczos_rel_tol: 1e-8,
            lanczos_max_steps: None,
            reorth_passes: 2,
            time_points: 2000,
            t_min: 0.01,
            tau_rel_band: 0.10,
            tau_consecutive: 20,
        }
    }
}

impl PointOptions {
    pub fn lanczos_options(&self) -> LanczosOptions {
        LanczosOptions {
            rel_tol: self.lanczos_rel_tol,
            max_steps: self.lanczos_max_steps,
            reorth_passes: self.reorth_passes,
            store_basis: false,
        }
    }

    fn hash_fields(&self) -> Vec<(&'static str, String)> {
        vec![
            ("tol", cache::float_key(self.lanczos_rel_tol)),
            ("max_steps", format!("{:?}", self.lanczos_max_steps)),
            ("reorth_passes", self.reorth_passes.to_string()),
            ("time_points", self.time_points.to_string()),
            ("t_min", cache::float_key(self.t_min)),
            ("tau_band", cache::float_key(self.tau_rel_band)),
            ("tau_consecutive", self.tau_consecutive.to_string()),
        ]
    }
}

/// Result of one (h_z, operator) pipeline run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointRecord {
    pub hz: f64,
    pub operator: String,
    pub k_dim: usize,
    pub b: Vec<f64>,
    pub sigma_log: f64,
    pub mean_log_ratio: f64,
    pub kc_mean: f64,
    pub kc_std: f64,
    pub tau: f64,
    /// Analytic infinite-time average, cross-check for `kc_mean`.
    pub kc_infinite: f64,
    pub eta: Option<f64>,
    pub termination: Termination,
    pub wall_secs: f64,
}

/// Run the full pipeline for one parameter point in the even sector.
pub fn run_point(params: &SpinChainParams, spec: &OperatorSpec, opts: &PointOptions) -> Result<PointRecord> {
    let context = format!("point L={} hz={} operator={}", params.l, params.hz, spec);
    run_point_inner(params, spec, opts).map_err(|e| e.with_context(context))
}

fn run_point_inner(params: &SpinChainParams, spec: &OperatorSpec, opts: &PointOptions) -> Result<PointRecord> {
    let started = Instant::now();
    let basis = build_parity_basis(params.l, Parity::Even)?;
    let h = build_sector_hamiltonian(params, &basis)?;
    let op = spec.build(params, &basis)?;
    let seed = OperatorVector::from(&op);
    let lres = krylov::lanczos(&h, &seed, &opts.lanczos_options())?;

    let sigma_log = krylov::sigma_log(&lres.b)?;
    let mean_log_ratio = krylov::mean_log_ratio(&lres.b)?;

    let (trace, kc_infinite) = evolve_with_defaults(&lres.b, opts)?;

    Ok(PointRecord {
        hz: params.hz,
        operator: spec.to_string(),
        k_dim: lres.k_dim,
        b: lres.b,
        sigma_log,
        mean_log_ratio,
        kc_mean: trace.kc_mean,
        kc_std: trace.kc_std,
        tau: trace.tau,
        kc_infinite,
        eta: None,
        termination: lres.termination,
        wall_secs: started.elapsed().as_secs_f64(),
    })
}

/// Evolve a coefficient sequence on its default grid with the default
/// saturation policy (band around the infinite-time average).
pub fn evolve_with_defaults(b: &[f64], opts: &PointOptions) -> Result<(ComplexityTrace, f64)> {
    let average = dynamics::infinite_time_average(b)?;
    let k = b.len() + 1;
    let b_mean = if b.is_empty() { 1.0 } else { b.iter().sum::<f64>() / b.len() as f64 };
    let times = dynamics::time_grid(opts.time_points, opts.t_min, 10.0 * k as f64 / b_mean);
    let policy = TauPolicy::PlateauBand {
        target: average.value,
        rel_band: opts.tau_rel_band,
        consecutive: opts.tau_consecutive,
    };
    let trace = ComplexityTrace::compute(b, times, &policy)?;
    Ok((trace, average.value))
}

/// Compute eta for the chain at `eta_params`, using the spectrum cache when
/// one is supplied.
pub fn eta_for_chain(
    params: &SpinChainParams,
    sector: Parity,
    eta_opts: &EtaOptions,
    cache: Option<&Cache>,
) -> Result<spectral::EtaResult> {
    let energies = match cache.and_then(|c| c.load_spectrum(params, sector)) {
        Some(e) => e,
        None => {
            let basis = build_parity_basis(params.l, sector)?;
            let h = build_sector_hamiltonian(params, &basis)?;
            let energies = h.eigenvalues();
            if let Some(c) = cache {
                c.store_spectrum(params, sector, &energies)?;
            }
            energies
        }
    };
    let mut result = spectral::eta(&energies, eta_opts)?;
    result.label = format!("L={} {}", params.l, sector);
    Ok(result)
}

/// Sweep definition, loadable from TOML or JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    /// Chain length for the Lanczos pipeline.
    pub l: usize,
    pub j: f64,
    pub hx: f64,
    pub hz_values: Vec<f64>,
    pub operators: Vec<String>,
    /// Chain length for the eta indicator.
    pub eta_l: usize,
    pub eta: EtaOptions,
    pub point: PointOptions,
    pub output_dir: PathBuf,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            l: 6,
            j: 1.0,
            hx: 1.0,
            hz_values: default_hz_grid(),
            operators: vec!["SzT".into()],
            eta_l: 13,
            eta: EtaOptions::default(),
            point: PointOptions::default(),
            output_dir: PathBuf::from("out"),
        }
    }
}

impl SweepConfig {
    /// Swap in the fast profile: L=5 for Lanczos, L=11 for eta.
    pub fn fast_profile(mut self) -> Self {
        self.l = 5;
        self.eta_l = 11;
        self
    }

    /// Parse all operator specs, failing before any compute starts.
    pub fn parsed_operators(&self) -> Result<Vec<OperatorSpec>> {
        self.operators.iter().map(|s| s.parse()).collect()
    }

    pub fn validate(&self) -> Result<Vec<OperatorSpec>> {
        if self.hz_values.is_empty() {
            return Err(Error::InvalidConfig("hz_values must be nonempty".into()));
        }
        if self.hz_values.iter().any(|h| !h.is_finite() || *h <= 0.0) {
            return Err(Error::InvalidConfig("hz_values must be finite and positive".into()));
        }
        if self.operators.is_empty() {
            return Err(Error::InvalidConfig("need at least one operator".into()));
        }
        SpinChainParams::new(self.l, self.j, self.hx, self.hz_values[0])?;
        SpinChainParams::new(self.eta_l, self.j, self.hx, self.hz_values[0])?;
        self.parsed_operators()
    }

    pub fn params_at(&self, hz: f64) -> SpinChainParams {
        SpinChainParams { l: self.l, j: self.j, hx: self.hx, hz }
    }

    /// Hash of every compute-relevant field.
    pub fn config_hash(&self) -> String {
        cache::hash_str(&serde_json::to_string(self).expect("config serializes"))
    }

    fn point_key(&self, hz: f64, operator: &OperatorSpec) -> String {
        let mut fields = vec![
            ("kind", "point".to_string()),
            ("l", self.l.to_string()),
            ("j", cache::float_key(self.j)),
            ("hx", cache::float_key(self.hx)),
            ("hz", cache::float_key(hz)),
            ("operator", operator.to_string()),
        ];
        fields.extend(self.point.hash_fields());
        cache::hash_fields(&fields)
    }
}

/// Default h_z grid: 30 points covering [0.01, 2.5], densified on
/// [0.8, 1.8] where the integrability-chaos transition sits.
pub fn default_hz_grid() -> Vec<f64> {
    let mut grid = Vec::with_capacity(30);
    // 10 log-spaced points below the transition window
    let (lo, hi) = (0.01f64.ln(), 0.8f64.ln());
    for i in 0..10 {
        grid.push((lo + (hi - lo) * i as f64 / 10.0).exp());
    }
    // 12 uniform points across the transition
    for i in 0..12 {
        grid.push(0.8 + i as f64 * (1.8 - 0.8) / 12.0);
    }
    // 8 uniform points to the upper end
    for i in 0..8 {
        grid.push(1.8 + (i + 1) as f64 * (2.5 - 1.8) / 8.0);
    }
    grid
}

/// A sweep point that failed, with the error kept as text.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointFailure {
    pub hz: f64,
    pub operator: String,
    pub error: String,
}

/// Reproducibility record for a whole sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub config_hash: String,
    pub version: String,
    pub wall_secs: f64,
    pub points: Vec<PointRecord>,
    pub failures: Vec<PointFailure>,
}

/// Sweep output: the record plus one curve set per operator (operators whose
/// curves cannot be normalized, e.g. constant series, are skipped).
#[derive(Debug)]
pub struct SweepOutput {
    pub record: RunRecord,
    pub curves: Vec<(String, CurveSet)>,
}

/// Run every (h_z, operator) point of the sweep, compute eta once per h_z,
/// and assemble normalized curve sets. Failed points are recorded and the
/// sweep continues.
pub fn run_sweep(config: &SweepConfig, cache: Option<&Cache>) -> Result<SweepOutput> {
    let started = Instant::now();
    let operators = config.validate()?;

    // eta curve, one diagonalization per h_z at eta_l
    let eta_values: Vec<f64> = {
        let compute = |&hz: &f64| -> Result<f64> {
            let params = SpinChainParams { l: config.eta_l, j: config.j, hx: config.hx, hz };
            Ok(eta_for_chain(&params, Parity::Even, &config.eta, cache)?.eta)
        };
        // memory: sequential keeps at most one eta_l-sized matrix alive
        config.hz_values.iter().map(compute).collect::<Result<Vec<_>>>()?
    };

    // all (operator, hz) work units
    let jobs: Vec<(usize, usize)> = (0..operators.len())
        .flat_map(|oi| (0..config.hz_values.len()).map(move |hi| (oi, hi)))
        .collect();

    let run_job = |&(oi, hi): &(usize, usize)| -> (usize, usize, Result<PointRecord>) {
        let hz = config.hz_values[hi];
        let spec = &operators[oi];
        let key = config.point_key(hz, spec);
        if let Some(cached) = cache.and_then(|c| c.load::<PointRecord>("points", &key)) {
            return (oi, hi, Ok(cached));
        }
        let result = run_point(&config.params_at(hz), spec, &config.point);
        if let (Some(c), Ok(record)) = (cache, &result) {
            // flush incrementally so an interrupted sweep resumes from here
            let _ = c.store("points", &key, record);
        }
        (oi, hi, result)
    };

    let outcomes: Vec<(usize, usize, Result<PointRecord>)> = {
        #[cfg(feature = "parallel")]
        {
            jobs.par_iter().map(run_job).collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            jobs.iter().map(run_job).collect()
        }
    };

    let n_hz = config.hz_values.len();
    let mut per_operator: Vec<Vec<Option<PointRecord>>> = vec![vec![None; n_hz]; operators.len()];
    let mut points = Vec::new();
    let mut failures = Vec::new();
    for (oi, hi, outcome) in outcomes {
        match outcome {
            Ok(mut record) => {
                record.eta = Some(eta_values[hi]);
                per_operator[oi][hi] = Some(record.clone());
                points.push(record);
            }
            Err(e) => failures.push(PointFailure {
                hz: config.hz_values[hi],
                operator: operators[oi].to_string(),
                error: e.to_string(),
            }),
        }
    }

    let mut curves = Vec::new();
    for (oi, spec) in operators.iter().enumerate() {
        let complete: Option<Vec<&PointRecord>> =
            per_operator[oi].iter().map(|p| p.as_ref()).collect();
        if let Some(records) = complete {
            let sigma: Vec<f64> = records.iter().map(|r| r.sigma_log).collect();
            let kc: Vec<f64> = records.iter().map(|r| r.kc_mean).collect();
            match CurveSet::build(config.hz_values.clone(), eta_values.clone(), sigma, kc) {
                Ok(set) => curves.push((spec.to_string(), set)),
                Err(e) => failures.push(PointFailure {
                    hz: f64::NAN,
                    operator: spec.to_string(),
                    error: format!("curve normalization failed: {e}"),
                }),
            }
        }
    }

    Ok(SweepOutput {
        record: RunRecord {
            config_hash: config.config_hash(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_secs: started.elapsed().as_secs_f64(),
            points,
            failures,
        },
        curves,
    })
}

/// Pearson correlation coefficient of two equal-length series.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (a, b) in x.iter().zip(y) {
        cov += (a - mx) * (b - my);
        vx += (a - mx) * (a - mx);
        vy += (b - my) * (b - my);
    }
    cov / (vx.sqrt() * vy.sqrt())
}

/// Result of the coefficient-edit search: edits to `b_1, b_3, b_5` of the
/// integrable sequence that push its plateau below the chaotic one.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HandpickOutcome {
    /// (1-based index, replacement value) pairs actually applied.
    pub edits: Vec<(usize, f64)>,
    /// Common multiplier the search settled on.
    pub multiplier: f64,
    pub kc_mean_edited: f64,
    pub kc_std_edited: f64,
    pub sigma_log_delta: f64,
}

/// Search for a multiplier `c` such that replacing `b_i <- c b_i` at the
/// given indices of `b_integrable` drops its late-time plateau below
/// `kc_chaotic`, while moving sigma_log by less than `sigma_budget`.
/// Candidates are tried gentlest-first.
pub fn search_handpick_inversion(
    b_integrable: &[f64],
    kc_chaotic: f64,
    indices: &[usize],
    multipliers: &[f64],
    sigma_budget: f64,
    opts: &PointOptions,
) -> Result<Option<HandpickOutcome>> {
    let sigma_original = krylov::sigma_log(b_integrable)?;
    for &c in multipliers {
        let edits: Vec<(usize, f64)> = indices
            .iter()
            .map(|&i| (i, c * b_integrable[i - 1]))
            .collect();
        let edited = dynamics::handpick(b_integrable, &edits)?;
        let sigma_delta = (krylov::sigma_log(&edited)? - sigma_original).abs();
        if sigma_delta >= sigma_budget {
            continue;
        }
        // cheap screen on the analytic plateau before paying for a full trace
        let plateau = dynamics::infinite_time_average(&edited)?.value;
        if plateau >= 0.95 * kc_chaotic {
            continue;
        }
        let (trace, _) = evolve_with_defaults(&edited, opts)?;
        if trace.kc_mean < kc_chaotic {
            return Ok(Some(HandpickOutcome {
                edits,
                multiplier: c,
                kc_mean_edited: trace.kc_mean,
                kc_std_edited: trace.kc_std,
                sigma_log_delta: sigma_delta,
            }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_spans_the_stated_range() {
        let grid = default_hz_grid();
        assert_eq!(grid.len(), 30);
        assert!(grid.windows(2).all(|w| w[1] > w[0]));
        assert!((grid[0] - 0.01).abs() < 1e-12);
        assert!((grid.last().unwrap() - 2.5).abs() < 1e-12);
        // densified across the transition window
        let inside = grid.iter().filter(|&&h| (0.8..=1.8).contains(&h)).count();
        assert!(inside >= 12);
    }

    #[test]
    fn config_hash_tracks_compute_relevant_fields() {
        let a = SweepConfig::default();
        let mut b = SweepConfig::default();
        assert_eq!(a.config_hash(), b.config_hash());
        b.point.lanczos_rel_tol = 1e-6;
        assert_ne!(a.config_hash(), b.config_hash());
    }

    #[test]
    fn validate_rejects_bad_grids_and_specs() {
        let mut config = SweepConfig { hz_values: vec![], ..Default::default() };
        assert!(config.validate().is_err());
        config.hz_values = vec![-1.0];
        assert!(config.validate().is_err());
        config.hz_values = vec![0.5];
        config.operators = vec!["bogus".into()];
        assert!(config.validate().is_err());
        config.operators = vec!["SzT".into()];
        assert!(config.validate().is_ok());
    }

    #[test]
    fn run_point_produces_the_l3_krylov_bound() {
        // L=3 even sector has D=6, so a generic operator reaches K=31
        let params = SpinChainParams::new(3, 1.0, 1.0, 0.37).unwrap();
        let record = run_point(&params, &OperatorSpec::TotalSpin(crate::spin_model::Axis::Z), &PointOptions::default()).unwrap();
        assert_eq!(record.k_dim, 31);
        assert_eq!(record.b.len(), 30);
        assert!(record.kc_mean > 0.0);
        assert!((record.kc_mean - record.kc_infinite).abs() <= 2.0 * record.kc_std.max(1e-6));
    }

    #[test]
    fn pearson_of_identical_series_is_one() {
        let x = [1.0, 2.0, 5.0, 3.0];
        assert!((pearson(&x, &x) - 1.0).abs() < 1e-12);
        let y: Vec<f64> = x.iter().map(|v| -2.0 * v + 1.0).collect();
        assert!((pearson(&x, &y) + 1.0).abs() < 1e-12);
    }
}
