//! Lanczos recursion on the Liouvillian `L = [H, .]` over the operator
//! Hilbert space with inner product `(A|B) = Tr(A^dag B)`.
//!
//! Starting from a normalized operator `|O_0)`, each step orthonormalizes
//! `L|O_{n-1})` against every stored basis vector (full reorthogonalization,
//! two Gram-Schmidt passes) and records the surviving norm as the Lanczos
//! coefficient `b_n`. In the resulting basis the Liouvillian is tridiagonal
//! with zero diagonal, and the Krylov dimension is bounded by `D^2 - D + 1`
//! for a D-dimensional sector.
//!
//! Real symmetric inputs stay on a real `D^2`-vector path; anything complex
//! (operators involving sigma^y) runs the same recursion over complex
//! vectors.

use nalgebra::{ComplexField, DMatrix, DMatrixView, DVector, Dyn, U1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin_model::{DenseMatrix, SectorOperator, C64};

/// Options for [`lanczos`].
#[derive(Debug, Clone, Copy)]
pub struct LanczosOptions {
    /// Stop when `b_n <= rel_tol * max(b_1..b_{n-1})`; separates true Krylov
    /// closure from floating-point residue.
    pub rel_tol: f64,
    /// Cap on the number of coefficients to produce (None = only the
    /// `D^2 - D + 1` bound applies).
    pub max_steps: Option<usize>,
    /// Gram-Schmidt passes against the stored basis per step. One pass loses
    /// orthogonality around K ~ 10^3; the default of two holds 1e-10 at the
    /// L=6 scale.
    pub reorth_passes: usize,
    /// Keep the Krylov basis in the result; it is always held during the
    /// iteration, this only controls whether it is returned.
    pub store_basis: bool,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-8, max_steps: None, reorth_passes: 2, store_basis: false }
    }
}

/// Why the recursion stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Reached the exact Krylov bound `D^2 - D + 1`.
    Natural,
    /// Coefficient fell below the termination tolerance (space closed).
    Tolerance,
    /// Hit the user-supplied step cap.
    MaxIter,
}

/// Flattened sector operator viewed as a vector of the operator Hilbert
/// space (length `D^2`, column-major).
#[derive(Debug, Clone)]
pub enum OperatorVector {
    Real(DVector<f64>),
    Complex(DVector<C64>),
}

impl OperatorVector {
    pub fn len(&self) -> usize {
        match self {
            OperatorVector::Real(v) => v.len(),
            OperatorVector::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_real(&self) -> bool {
        matches!(self, OperatorVector::Real(_))
    }

    pub fn norm(&self) -> f64 {
        match self {
            OperatorVector::Real(v) => v.norm(),
            OperatorVector::Complex(v) => v.norm(),
        }
    }

    fn to_complex(&self) -> DVector<C64> {
        match self {
            OperatorVector::Real(v) => v.map(|x| C64::new(x, 0.0)),
            OperatorVector::Complex(v) => v.clone(),
        }
    }
}

impl From<&SectorOperator> for OperatorVector {
    fn from(op: &SectorOperator) -> Self {
        match op.matrix() {
            DenseMatrix::Real(m) => OperatorVector::Real(DVector::from_column_slice(m.as_slice())),
            DenseMatrix::Complex(m) => OperatorVector::Complex(DVector::from_column_slice(m.as_slice())),
        }
    }
}

/// Trace inner product `(A|B) = Tr(A^dag B)`, conjugate-linear in `A`.
pub fn inner_product(a: &OperatorVector, b: &OperatorVector) -> Result<C64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { left: a.len(), right: b.len() });
    }
    Ok(match (a, b) {
        (OperatorVector::Real(x), OperatorVector::Real(y)) => C64::new(x.dot(y), 0.0),
        (OperatorVector::Complex(x), OperatorVector::Complex(y)) => x.dotc(y),
        (x, y) => x.to_complex().dotc(&y.to_complex()),
    })
}

/// Apply the Liouvillian: `|HO - OH)` for the flattened operator `O`.
pub fn liouvillian_apply(h: &SectorOperator, o: &OperatorVector) -> Result<OperatorVector> {
    let d = h.dim();
    if o.len() != d * d {
        return Err(Error::DimensionMismatch { left: o.len(), right: d * d });
    }
    Ok(match (h.matrix(), o) {
        (DenseMatrix::Real(hm), OperatorVector::Real(v)) => {
            OperatorVector::Real(commutator_flat(hm, v, d))
        }
        (hm, ov) => {
            let hc = hm.to_complex();
            let vc = ov.to_complex();
            OperatorVector::Complex(commutator_flat(&hc, &vc, d))
        }
    })
}

fn commutator_flat<T>(h: &DMatrix<T>, v: &DVector<T>, d: usize) -> DVector<T>
where
    T: ComplexField,
{
    let m = DMatrixView::from_slice(v.as_slice(), d, d);
    let delta = h * &m - &m * h;
    delta.reshape_generic(Dyn(d * d), U1)
}

/// Krylov basis storage matching the arithmetic path that produced it.
#[derive(Debug, Clone)]
pub enum KrylovBasis {
    Real(Vec<DVector<f64>>),
    Complex(Vec<DVector<C64>>),
}

impl KrylovBasis {
    pub fn len(&self) -> usize {
        match self {
            KrylovBasis::Real(v) => v.len(),
            KrylovBasis::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn vector(&self, i: usize) -> OperatorVector {
        match self {
            KrylovBasis::Real(v) => OperatorVector::Real(v[i].clone()),
            KrylovBasis::Complex(v) => OperatorVector::Complex(v[i].clone()),
        }
    }

    /// `max |(O_m|O_n) - delta_mn|` over all stored pairs.
    pub fn orthonormality_defect(&self) -> f64 {
        fn defect<T: ComplexField<RealField = f64>>(vs: &[DVector<T>]) -> f64 {
            let mut worst = 0.0f64;
            for m in 0..vs.len() {
                for n in m..vs.len() {
                    let ip = vs[m].dotc(&vs[n]);
                    let target = if m == n { 1.0 } else { 0.0 };
                    let dev = (ip - T::from_real(target)).abs();
                    worst = worst.max(dev);
                }
            }
            worst
        }
        match self {
            KrylovBasis::Real(v) => defect(v),
            KrylovBasis::Complex(v) => defect(v),
        }
    }
}

/// Output of the Lanczos recursion.
#[derive(Debug, Clone)]
pub struct LanczosResult {
    /// Coefficients `b_1..b_{K-1}`, all strictly above the stop threshold.
    pub b: Vec<f64>,
    /// Krylov dimension `K` (number of basis vectors spanned).
    pub k_dim: usize,
    /// The orthonormal basis, when requested.
    pub basis: Option<KrylovBasis>,
    pub termination: Termination,
}

/// Upper bound on the Krylov dimension for a `D`-dimensional sector.
pub fn krylov_bound(d: usize) -> usize {
    d * d - d + 1
}

/// Run the Lanczos recursion for the Liouvillian of `h` seeded with `o`.
pub fn lanczos(h: &SectorOperator, o: &OperatorVector, opts: &LanczosOptions) -> Result<LanczosResult> {
    let d = h.dim();
    if o.len() != d * d {
        return Err(Error::DimensionMismatch { left: o.len(), right: d * d });
    }
    match (h.matrix(), o) {
        (DenseMatrix::Real(hm), OperatorVector::Real(v)) => {
            let (b, basis, termination) = lanczos_generic(hm, v.clone(), opts)?;
            Ok(LanczosResult {
                b,
                k_dim: basis.len(),
                termination,
                basis: opts.store_basis.then_some(KrylovBasis::Real(basis)),
            })
        }
        (hm, ov) => {
            let hc = hm.to_complex();
            let (b, basis, termination) = lanczos_generic(&hc, ov.to_complex(), opts)?;
            Ok(LanczosResult {
                b,
                k_dim: basis.len(),
                termination,
                basis: opts.store_basis.then_some(KrylovBasis::Complex(basis)),
            })
        }
    }
}

fn lanczos_generic<T>(
    h: &DMatrix<T>,
    seed: DVector<T>,
    opts: &LanczosOptions,
) -> Result<(Vec<f64>, Vec<DVector<T>>, Termination)>
where
    T: ComplexField<RealField = f64>,
{
    let d = h.nrows();
    let norm0 = seed.norm();
    if !(norm0 > 0.0) || !norm0.is_finite() {
        return Err(Error::ZeroOperator);
    }
    let bound = krylov_bound(d);
    let max_vectors = opts
        .max_steps
        .map(|m| (m + 1).min(bound))
        .unwrap_or(bound);

    let mut basis: Vec<DVector<T>> = Vec::new();
    basis.push(seed.unscale(norm0));
    let mut b: Vec<f64> = Vec::new();
    let mut b_max = 0.0f64;

    // scratch for the two matrix products per step
    let mut hm = DMatrix::<T>::zeros(d, d);
    let mut mh = DMatrix::<T>::zeros(d, d);

    let termination = loop {
        if basis.len() >= max_vectors {
            break if basis.len() >= bound { Termination::Natural } else { Termination::MaxIter };
        }
        let last = basis.last().expect("basis is never empty");
        let m = DMatrixView::from_slice(last.as_slice(), d, d);
        hm.gemm(T::one(), h, &m, T::zero());
        mh.gemm(T::one(), &m, h, T::zero());
        let mut w: DVector<T> = (&hm - &mh).reshape_generic(Dyn(d * d), U1);
        let pre_norm = w.norm();

        // full reorthogonalization against every stored vector
        for _ in 0..opts.reorth_passes.max(1) {
            for v in &basis {
                let c = v.dotc(&w);
                w.axpy(-c, v, T::one());
            }
        }
        let bn = w.norm();
        if bn <= opts.rel_tol * b_max.max(pre_norm) {
            break Termination::Tolerance;
        }
        b_max = b_max.max(bn);
        b.push(bn);
        basis.push(w.unscale(bn));
    };

    Ok((b, basis, termination))
}

/// Tridiagonal matrix rebuilt from the coefficients plus the residual
/// `max |(O_m|L|O_n) - T[m,n]|` recomputed from the stored basis.
#[derive(Debug, Clone)]
pub struct TridiagonalCheck {
    pub matrix: DMatrix<f64>,
    pub residual: f64,
}

/// Reassemble `T` with `T[n,n+1] = T[n+1,n] = b_{n+1}` and measure how far
/// the stored basis is from satisfying the three-term recursion.
pub fn reconstruct_tridiagonal(result: &LanczosResult, h: &SectorOperator) -> Result<TridiagonalCheck> {
    let basis = result.basis.as_ref().ok_or(Error::BasisAbsent)?;
    let k = basis.len();
    let mut t = DMatrix::<f64>::zeros(k, k);
    for (n, &bn) in result.b.iter().enumerate() {
        t[(n, n + 1)] = bn;
        t[(n + 1, n)] = bn;
    }
    let mut residual = 0.0f64;
    for n in 0..k {
        let lv = liouvillian_apply(h, &basis.vector(n))?;
        for m in 0..k {
            let ip = inner_product(&basis.vector(m), &lv)?;
            residual = residual.max((ip - C64::new(t[(m, n)], 0.0)).norm());
        }
    }
    Ok(TridiagonalCheck { matrix: t, residual })
}

/// Logarithmic ratios `log(b_n / b_{n+1})` for consecutive coefficients.
pub fn log_ratios(b: &[f64]) -> Result<Vec<f64>> {
    if b.len() < 2 {
        return Err(Error::TooShort { needed: 2, got: b.len() });
    }
    for (i, &v) in b.iter().enumerate() {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::NonPositiveCoefficient { index: i + 1, value: v });
        }
    }
    Ok(b.windows(2).map(|w| (w[0] / w[1]).ln()).collect())
}

/// Dispersion of the Lanczos sequence: population standard deviation of
/// `log(b_n / b_{n+1})`.
pub fn sigma_log(b: &[f64]) -> Result<f64> {
    let r = log_ratios(b)?;
    Ok(population_std(&r))
}

/// Mean of `log(b_n / b_{n+1})`; near zero for the chains studied here.
pub fn mean_log_ratio(b: &[f64]) -> Result<f64> {
    let r = log_ratios(b)?;
    Ok(r.iter().sum::<f64>() / r.len() as f64)
}

pub(crate) fn population_std(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    var.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin_model::{build_parity_basis, build_total_spin, project, Axis, Parity};
    use approx::assert_abs_diff_eq;
    use nalgebra::dvector;

    fn sector_op(label: &str, m: DMatrix<f64>) -> SectorOperator {
        SectorOperator::new(label, DenseMatrix::Real(m)).unwrap()
    }

    #[test]
    fn inner_product_of_identity_with_itself_is_the_dimension() {
        let eye = sector_op("id", DMatrix::identity(5, 5));
        let v = OperatorVector::from(&eye);
        let ip = inner_product(&v, &v).unwrap();
        assert_abs_diff_eq!(ip.re, 5.0);
        assert_abs_diff_eq!(ip.im, 0.0);
    }

    #[test]
    fn projected_total_spins_are_trace_orthogonal() {
        let basis = build_parity_basis(2, Parity::Even).unwrap();
        let sz = project(&build_total_spin(Axis::Z, 2).unwrap(), &basis).unwrap();
        let sx = project(&build_total_spin(Axis::X, 2).unwrap(), &basis).unwrap();
        let ip = inner_product(&(&sz).into(), &(&sx).into()).unwrap();
        assert!(ip.norm() < 1e-14);
    }

    #[test]
    fn inner_product_rejects_mismatched_dims() {
        let a = OperatorVector::Real(dvector![1.0, 0.0, 0.0, 1.0]);
        let b = OperatorVector::Real(dvector![1.0]);
        assert!(matches!(
            inner_product(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn liouvillian_annihilates_identity_and_hamiltonian() {
        let h = sector_op("H", DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, -0.7]));
        let eye = OperatorVector::Real(DVector::from_column_slice(
            DMatrix::<f64>::identity(2, 2).as_slice(),
        ));
        assert!(liouvillian_apply(&h, &eye).unwrap().norm() < 1e-15);
        let hv = OperatorVector::from(&h);
        assert!(liouvillian_apply(&h, &hv).unwrap().norm() < 1e-15);
    }

    #[test]
    fn two_level_lanczos_gives_the_level_splitting() {
        // H = diag(E1, E2), O = sigma^x: K = 2 with b_1 = |E1 - E2|
        let (e1, e2) = (0.9, -0.4);
        let h = sector_op("H", DMatrix::from_diagonal(&dvector![e1, e2]));
        let o = OperatorVector::Real(DVector::from_column_slice(
            DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]).as_slice(),
        ));
        let res = lanczos(&h, &o, &LanczosOptions { store_basis: true, ..Default::default() }).unwrap();
        assert_eq!(res.k_dim, 2);
        assert_eq!(res.b.len(), 1);
        assert_abs_diff_eq!(res.b[0], (e1 - e2).abs(), epsilon = 1e-12);

        let check = reconstruct_tridiagonal(&res, &h).unwrap();
        assert_eq!(check.matrix.nrows(), 2);
        assert_abs_diff_eq!(check.matrix[(0, 1)], (e1 - e2).abs(), epsilon = 1e-12);
        assert_abs_diff_eq!(check.matrix[(0, 0)], 0.0);
        assert!(check.residual < 1e-12);
    }

    #[test]
    fn operator_commuting_with_h_closes_immediately() {
        let h = sector_op("H", DMatrix::from_diagonal(&dvector![1.0, 2.0, 5.0]));
        // any diagonal operator commutes with a diagonal H
        let o = OperatorVector::Real(DVector::from_column_slice(
            DMatrix::from_diagonal(&dvector![1.0, -2.0, 1.0]).as_slice(),
        ));
        let res = lanczos(&h, &o, &LanczosOptions::default()).unwrap();
        assert_eq!(res.k_dim, 1);
        assert!(res.b.is_empty());
        assert_eq!(res.termination, Termination::Tolerance);
    }

    #[test]
    fn zero_operator_is_rejected() {
        let h = sector_op("H", DMatrix::identity(2, 2));
        let o = OperatorVector::Real(DVector::zeros(4));
        assert!(matches!(lanczos(&h, &o, &LanczosOptions::default()), Err(Error::ZeroOperator)));
    }

    #[test]
    fn max_steps_caps_the_coefficient_count() {
        let h = sector_op(
            "H",
            DMatrix::from_row_slice(3, 3, &[0.4, 0.2, 0.0, 0.2, -0.3, 0.5, 0.0, 0.5, 0.9]),
        );
        let o = OperatorVector::from(&sector_op("O", DMatrix::from_diagonal(&dvector![1.0, 0.0, -1.0])));
        let res = lanczos(&h, &o, &LanczosOptions { max_steps: Some(3), ..Default::default() }).unwrap();
        assert_eq!(res.b.len(), 3);
        assert_eq!(res.k_dim, 4);
        assert_eq!(res.termination, Termination::MaxIter);
    }

    #[test]
    fn positive_rescaling_of_the_seed_leaves_coefficients_unchanged() {
        let h = sector_op(
            "H",
            DMatrix::from_row_slice(3, 3, &[0.4, 0.2, 0.0, 0.2, -0.3, 0.5, 0.0, 0.5, 0.9]),
        );
        let o = sector_op("O", DMatrix::from_diagonal(&dvector![1.0, 0.0, -1.0]));
        let v = OperatorVector::from(&o);
        let scaled = match &v {
            OperatorVector::Real(x) => OperatorVector::Real(x * 2.0),
            _ => unreachable!(),
        };
        let a = lanczos(&h, &v, &LanczosOptions::default()).unwrap();
        let b = lanczos(&h, &scaled, &LanczosOptions::default()).unwrap();
        assert_eq!(a.k_dim, b.k_dim);
        // power-of-two scaling keeps every float operation identical
        assert_eq!(a.b, b.b);
    }

    #[test]
    fn sigma_log_vanishes_for_constant_and_geometric_sequences() {
        assert_abs_diff_eq!(sigma_log(&[2.0, 2.0, 2.0, 2.0]).unwrap(), 0.0);
        let geometric: Vec<f64> = (0..12).map(|n| 3.0 * 0.8f64.powi(n)).collect();
        assert_abs_diff_eq!(sigma_log(&geometric).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn sigma_log_rejects_bad_input() {
        assert!(matches!(sigma_log(&[1.0]), Err(Error::TooShort { .. })));
        assert!(matches!(
            sigma_log(&[1.0, 0.0, 2.0]),
            Err(Error::NonPositiveCoefficient { index: 2, .. })
        ));
    }

    #[test]
    fn reconstruct_requires_a_stored_basis() {
        let h = sector_op("H", DMatrix::from_diagonal(&dvector![1.0, -1.0]));
        let o = OperatorVector::Real(DVector::from_column_slice(
            DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]).as_slice(),
        ));
        let res = lanczos(&h, &o, &LanczosOptions::default()).unwrap();
        assert!(matches!(reconstruct_tridiagonal(&res, &h), Err(Error::BasisAbsent)));
    }
}
