// Scratch probe: Pearson correlation of <K_C> with eta for SzT vs a random operator.
use krylov_spread_core::experiments::{pearson, run_sweep, SweepConfig};
use std::time::Instant;

fn main() {
    let fast = std::env::args().nth(1).as_deref() == Some("fast");
    let mut config = SweepConfig {
        operators: vec!["SzT".into(), "random:1".into()],
        ..Default::default()
    };
    if fast {
        config = config.fast_profile();
    }
    let t0 = Instant::now();
    let output = run_sweep(&config, None).unwrap();
    println!("sweep wall={:.1?} failures={}", t0.elapsed(), output.record.failures.len());
    for (op, curves) in &output.curves {
        let r = pearson(&curves.kc_raw, &curves.eta);
        let r_sigma = pearson(&curves.sigma_raw, &curves.eta);
        println!("op={op}: pearson(kc,eta)={r:+.4}  pearson(sigma,eta)={r_sigma:+.4}");
    }
}
