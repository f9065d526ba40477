// Scratch probe: structure of the b sequence and sigma_log variants.
use krylov_spread_core::krylov::{lanczos, log_ratios, sigma_log, LanczosOptions, OperatorVector};
use krylov_spread_core::spin_model::{
    build_parity_basis, build_sector_hamiltonian, build_total_spin, project, Axis, Parity,
    SpinChainParams,
};

fn std_of(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n).sqrt()
}

fn main() {
    let hz: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2.5);
    let axis = match std::env::args().nth(2).as_deref() {
        Some("x") => Axis::X,
        _ => Axis::Z,
    };
    let passes: usize = std::env::args().nth(3).and_then(|s| s.parse().ok()).unwrap_or(2);
    let params = SpinChainParams::new(6, 1.0, 1.0, hz).unwrap();
    let basis = build_parity_basis(6, Parity::Even).unwrap();
    let h = build_sector_hamiltonian(&params, &basis).unwrap();
    let op = project(&build_total_spin(axis, 6).unwrap(), &basis).unwrap();
    let opts = LanczosOptions { reorth_passes: passes, store_basis: true, ..Default::default() };
    let res = lanczos(&h, &OperatorVector::from(&op), &opts).unwrap();
    println!("passes={} orthonormality defect = {:.3e}", passes, res.basis.as_ref().unwrap().orthonormality_defect());
    let b = &res.b;
    let n = b.len();
    println!("K={} n_b={} termination={:?}", res.k_dim, n, res.termination);
    println!("b[0..6]   = {:?}", &b[..6]);
    println!("b[mid]    = {:?}", &b[n / 2 - 3..n / 2 + 3]);
    println!("b[last 8] = {:?}", &b[n - 8..]);
    let bmax = b.iter().cloned().fold(0.0f64, f64::max);
    let bmin = b.iter().cloned().fold(f64::INFINITY, f64::min);
    println!("bmax={bmax:.4} bmin={bmin:.4e}");

    let r = log_ratios(b).unwrap();
    let mut sorted = r.clone();
    sorted.sort_by(f64::total_cmp);
    println!("ratio extremes: {:?} ... {:?}", &sorted[..5], &sorted[sorted.len() - 5..]);
    println!("sigma_log (all {} ratios)     = {:.4}", r.len(), sigma_log(b).unwrap());
    println!("sigma_log (first half)        = {:.4}", std_of(&r[..r.len() / 2]));
    println!("sigma_log (second half)       = {:.4}", std_of(&r[r.len() / 2..]));
    println!("sigma_log (drop first 10)     = {:.4}", std_of(&r[10..]));
    println!("sigma_log (drop last 10)      = {:.4}", std_of(&r[..r.len() - 10]));
    println!("sigma_log (drop last 60)      = {:.4}", std_of(&r[..r.len() - 60]));
    // sample (n-1) denominator barely differs at this size
}
