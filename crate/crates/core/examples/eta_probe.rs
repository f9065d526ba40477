// Scratch probe: eta at the acceptance endpoints.
use krylov_spread_core::experiments::eta_for_chain;
use krylov_spread_core::spectral::EtaOptions;
use krylov_spread_core::spin_model::{Parity, SpinChainParams};
use std::time::Instant;

fn main() {
    let l: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(13);
    for hz in [0.2, 1.35, 2.5] {
        let params = SpinChainParams::new(l, 1.0, 1.0, hz).unwrap();
        let t0 = Instant::now();
        let res = eta_for_chain(&params, Parity::Even, &EtaOptions::default(), None).unwrap();
        println!(
            "L={l} hz={hz}: r_mean={:.4} eta={:.3} n_levels={} wall={:.2?}",
            res.r_mean, res.eta, res.n_levels, t0.elapsed()
        );
    }
}
