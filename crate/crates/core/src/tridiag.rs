//! Symmetric tridiagonal eigensolver (implicit-shift QL).
//!
//! The Krylov chain produced by the Lanczos recursion is tridiagonal with
//! zero diagonal, so its eigendecomposition never needs a Householder
//! reduction; working on the two diagonals directly keeps the K ~ 10^3
//! decompositions in the dynamics pipeline cheap. Eigenvalues converge in
//! O(K^2); accumulating eigenvectors costs O(K^3) with a K x K rotation
//! product.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 50;

/// Eigenvalues (ascending) and, optionally, the orthogonal eigenvector
/// matrix with column `k` belonging to `eigenvalues[k]`.
#[derive(Debug, Clone)]
pub struct TridiagonalEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Option<DMatrix<f64>>,
}

/// Decompose the symmetric tridiagonal matrix with the given diagonal and
/// off-diagonal (`offdiag.len() == diag.len() - 1`).
pub fn eigh_tridiagonal(diag: &[f64], offdiag: &[f64], compute_vectors: bool) -> Result<TridiagonalEigen> {
    let n = diag.len();
    if n == 0 {
        return Err(Error::TooShort { needed: 1, got: 0 });
    }
    if offdiag.len() + 1 != n {
        return Err(Error::DimensionMismatch { left: offdiag.len() + 1, right: n });
    }

    let mut d = diag.to_vec();
    // e[i] couples rows i and i+1; e[n-1] is a zero sentinel
    let mut e = vec![0.0f64; n];
    e[..n - 1].copy_from_slice(offdiag);

    let mut z = compute_vectors.then(|| DMatrix::<f64>::identity(n, n));

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            // find the first negligible coupling at or after l
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(Error::NoConvergence(l));
            }

            // Wilkinson shift from the leading 2x2 block
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(if g == 0.0 { 1.0 } else { g }));

            let (mut s, mut c, mut p) = (1.0f64, 1.0f64, 0.0f64);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    // rotation annihilated; deflate and restart the sweep
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;

                if let Some(z) = z.as_mut() {
                    rotate_columns(z, i, s, c);
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    // sort ascending, permuting eigenvector columns along
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let eigenvectors = z.map(|z| {
        let mut sorted = DMatrix::<f64>::zeros(n, n);
        for (new, &old) in order.iter().enumerate() {
            sorted.set_column(new, &z.column(old));
        }
        sorted
    });

    Ok(TridiagonalEigen { eigenvalues, eigenvectors })
}

/// Apply the plane rotation mixing columns `i` and `i+1` of `z`.
#[inline]
fn rotate_columns(z: &mut DMatrix<f64>, i: usize, s: f64, c: f64) {
    let n = z.nrows();
    let data = z.as_mut_slice();
    let (left, right) = data.split_at_mut((i + 1) * n);
    let col_i = &mut left[i * n..];
    let col_j = &mut right[..n];
    for k in 0..n {
        let f = col_j[k];
        col_j[k] = s * col_i[k] + c * f;
        col_i[k] = c * col_i[k] - s * f;
    }
}
