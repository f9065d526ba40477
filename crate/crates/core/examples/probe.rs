// Scratch probe for pipeline timings and reference values.
use krylov_spread_core::experiments::{run_point, OperatorSpec, PointOptions};
use krylov_spread_core::spin_model::SpinChainParams;
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let l: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let op: OperatorSpec = args.get(2).map(|s| s.as_str()).unwrap_or("SzT").parse().unwrap();
    let hz: f64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(0.2);

    let params = SpinChainParams::new(l, 1.0, 1.0, hz).unwrap();
    let t0 = Instant::now();
    let rec = run_point(&params, &op, &PointOptions::default()).unwrap();
    println!(
        "L={} op={} hz={}: K={} sigma_log={:.4} mean_lr={:+.4} kc={:.1}±{:.1} kc_inf={:.1} tau={:.1} wall={:.2?}",
        l, op, hz, rec.k_dim, rec.sigma_log, rec.mean_log_ratio, rec.kc_mean, rec.kc_std,
        rec.kc_infinite, rec.tau, t0.elapsed()
    );
}
