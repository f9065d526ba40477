// Scratch probe: coefficient-edit inversion search on the integrable SxT chain.
use krylov_spread_core::experiments::{
    run_point, search_handpick_inversion, OperatorSpec, PointOptions,
};
use krylov_spread_core::spin_model::{Axis, SpinChainParams};
use std::time::Instant;

fn main() {
    let opts = PointOptions::default();
    let op = OperatorSpec::TotalSpin(Axis::X);
    let t0 = Instant::now();
    let chaotic = run_point(&SpinChainParams::new(6, 1.0, 1.0, 0.2).unwrap(), &op, &opts).unwrap();
    let integrable = run_point(&SpinChainParams::new(6, 1.0, 1.0, 2.5).unwrap(), &op, &opts).unwrap();
    println!(
        "chaotic kc={:.1}±{:.1}  integrable kc={:.1}±{:.1}  b_int[0..6]={:?}",
        chaotic.kc_mean, chaotic.kc_std, integrable.kc_mean, integrable.kc_std,
        &integrable.b[..6]
    );
    let outcome = search_handpick_inversion(
        &integrable.b,
        chaotic.kc_mean,
        &[1, 3, 5],
        &[0.5, 0.3, 0.2, 0.15, 0.1, 0.07, 0.05],
        0.02,
        &opts,
    )
    .unwrap();
    match outcome {
        Some(o) => println!(
            "FOUND multiplier={} edits={:?} kc_edited={:.1}±{:.1} sigma_delta={:.4} wall={:.1?}",
            o.multiplier, o.edits, o.kc_mean_edited, o.kc_std_edited, o.sigma_log_delta,
            t0.elapsed()
        ),
        None => println!("NO multiplier found"),
    }
}
