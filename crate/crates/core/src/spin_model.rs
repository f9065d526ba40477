//! Ising chain with a longitudinal-transverse field, its reflection symmetry,
//! and the operators whose Krylov expansion we study.
//!
//! The Hamiltonian is
//!
//! ```text
//! H = sum_k (h_x sx_k + h_z sz_k) - J sum_{k=1}^{L-1} sz_k sz_{k+1}
//! ```
//!
//! with open boundaries. Reflection about the chain center (site k -> L+1-k)
//! commutes with H, so all Lanczos work happens inside one parity sector of
//! that symmetry. Computational basis states are bitmasks with site k stored
//! in bit k-1; a cleared bit is the sz = +1 state.

use nalgebra::{Complex, DMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on the max commutator entry when checking that an
/// operator commutes with the reflection before projecting it.
pub const REFLECTION_COMM_TOL: f64 = 1e-10;

/// Relative Hermiticity tolerance enforced on every constructed operator.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Default byte budget for a single dense full-space matrix (1 GiB).
/// L = 13 real (512 MiB) fits; anything larger is refused.
pub const DEFAULT_DENSE_BUDGET: usize = 1 << 30;

pub type C64 = Complex<f64>;

/// Physical configuration of the chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinChainParams {
    /// Number of spin-1/2 sites.
    pub l: usize,
    /// Nearest-neighbor zz coupling.
    pub j: f64,
    /// Transverse field.
    pub hx: f64,
    /// Longitudinal field.
    pub hz: f64,
}

impl SpinChainParams {
    pub fn new(l: usize, j: f64, hx: f64, hz: f64) -> Result<Self> {
        if l < 2 {
            return Err(Error::InvalidConfig(format!("chain length L = {l} must be >= 2")));
        }
        if !(j.is_finite() && hx.is_finite() && hz.is_finite()) {
            return Err(Error::InvalidConfig("couplings must be finite".into()));
        }
        Ok(Self { l, j, hx, hz })
    }

    pub fn full_dim(&self) -> usize {
        1 << self.l
    }
}

/// Pauli direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Axis::X => write!(f, "x"),
            Axis::Y => write!(f, "y"),
            Axis::Z => write!(f, "z"),
        }
    }
}

/// One weighted single-site Pauli term, `weight * (1/2) sigma^axis_site`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SiteTerm {
    /// 1-based site index.
    pub site: usize,
    pub axis: Axis,
    pub weight: f64,
}

/// Parity sector of the reflection symmetry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl std::fmt::Display for Parity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Parity::Even => write!(f, "even"),
            Parity::Odd => write!(f, "odd"),
        }
    }
}

/// Reverse the low `l` bits of `state`: the reflection k -> L+1-k on sites.
#[inline]
pub fn reflect_state(state: usize, l: usize) -> usize {
    let mut out = 0usize;
    for bit in 0..l {
        out |= ((state >> bit) & 1) << (l - 1 - bit);
    }
    out
}

/// Dense matrix that is either real symmetric or complex Hermitian.
///
/// Operators built from x/z Paulis stay real; anything involving sigma^y
/// picks up imaginary entries and moves to the complex variant.
#[derive(Debug, Clone, PartialEq)]
pub enum DenseMatrix {
    Real(DMatrix<f64>),
    Complex(DMatrix<C64>),
}

impl DenseMatrix {
    pub fn dim(&self) -> usize {
        match self {
            DenseMatrix::Real(m) => m.nrows(),
            DenseMatrix::Complex(m) => m.nrows(),
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self, DenseMatrix::Real(_))
    }

    /// Promote to a complex matrix (copying).
    pub fn to_complex(&self) -> DMatrix<C64> {
        match self {
            DenseMatrix::Real(m) => m.map(|x| C64::new(x, 0.0)),
            DenseMatrix::Complex(m) => m.clone(),
        }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        match self {
            DenseMatrix::Real(m) => m.iter().fold(0.0f64, |a, x| a.max(x.abs())),
            DenseMatrix::Complex(m) => m.iter().fold(0.0f64, |a, x| a.max(x.norm())),
        }
    }

    /// Max deviation from Hermiticity, `max |M - M^dag|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim();
        let mut dev = 0.0f64;
        match self {
            DenseMatrix::Real(m) => {
                for i in 0..n {
                    for j in 0..i {
                        dev = dev.max((m[(i, j)] - m[(j, i)]).abs());
                    }
                }
            }
            DenseMatrix::Complex(m) => {
                for i in 0..n {
                    for j in 0..=i {
                        dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
                    }
                }
            }
        }
        dev
    }

    pub fn trace(&self) -> C64 {
        match self {
            DenseMatrix::Real(m) => C64::new(m.trace(), 0.0),
            DenseMatrix::Complex(m) => m.trace(),
        }
    }
}

/// Hermitian operator on the full 2^L space, tagged with its provenance.
#[derive(Debug, Clone)]
pub struct FullOperator {
    pub label: String,
    data: DenseMatrix,
}

impl FullOperator {
    fn new(label: impl Into<String>, data: DenseMatrix) -> Self {
        Self { label: label.into(), data }
    }

    pub fn dim(&self) -> usize {
        self.data.dim()
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.data
    }

    /// Site count this operator was built for (dim = 2^L).
    pub fn sites(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    /// Max entry of the commutator with the reflection permutation.
    ///
    /// `[M, R]_{ij} = M_{i, rev(j)} - M_{rev(i), j}`, so no matrix product is
    /// needed.
    pub fn reflection_commutator_max(&self) -> f64 {
        let l = self.sites();
        let n = self.dim();
        let mut max = 0.0f64;
        match &self.data {
            DenseMatrix::Real(m) => {
                for j in 0..n {
                    let rj = reflect_state(j, l);
                    for i in 0..n {
                        let ri = reflect_state(i, l);
                        max = max.max((m[(i, rj)] - m[(ri, j)]).abs());
                    }
                }
            }
            DenseMatrix::Complex(m) => {
                for j in 0..n {
                    let rj = reflect_state(j, l);
                    for i in 0..n {
                        let ri = reflect_state(i, l);
                        max = max.max((m[(i, rj)] - m[(ri, j)]).norm());
                    }
                }
            }
        }
        max
    }

    pub fn commutes_with_reflection(&self) -> bool {
        self.reflection_commutator_max() <= REFLECTION_COMM_TOL
    }
}

/// Orthonormal basis of one parity sector, stored as reflection orbits.
///
/// Each basis vector is `(|s> + |rev(s)>)/sqrt(2)` (even) or
/// `(|s> - |rev(s)>)/sqrt(2)` (odd); self-reflective states enter the even
/// sector alone with coefficient 1.
#[derive(Debug, Clone)]
pub struct ParitySectorBasis {
    l: usize,
    sector: Parity,
    /// `(rep, mirror)` with `rep <= mirror`; equal for palindromic states.
    orbits: Vec<(u32, u32)>,
    /// Sector index of the orbit containing each computational state,
    /// `u32::MAX` when the state has no vector in this sector.
    index_of: Vec<u32>,
}

const NO_INDEX: u32 = u32::MAX;

impl ParitySectorBasis {
    pub fn l(&self) -> usize {
        self.l
    }

    pub fn sector(&self) -> Parity {
        self.sector
    }

    pub fn dim(&self) -> usize {
        self.orbits.len()
    }

    /// Components of basis vector `i` as (computational state, coefficient).
    pub fn components(&self, i: usize) -> impl Iterator<Item = (usize, f64)> {
        let (rep, mirror) = self.orbits[i];
        let (rep, mirror) = (rep as usize, mirror as usize);
        let pair = if rep == mirror {
            [(rep, 1.0), (usize::MAX, 0.0)]
        } else {
            let c = std::f64::consts::FRAC_1_SQRT_2;
            let sign = if self.sector == Parity::Even { c } else { -c };
            [(rep, c), (mirror, sign)]
        };
        pair.into_iter().filter(|(s, _)| *s != usize::MAX)
    }

    /// Sector index of the orbit containing `state`, if it has one.
    pub fn index_of_state(&self, state: usize) -> Option<usize> {
        match self.index_of[state] {
            NO_INDEX => None,
            i => Some(i as usize),
        }
    }

    /// Coefficient of `state` inside basis vector `i` (0 when disjoint).
    pub fn coefficient(&self, i: usize, state: usize) -> f64 {
        self.components(i)
            .find(|(s, _)| *s == state)
            .map_or(0.0, |(_, c)| c)
    }

    /// Dense 2^L x dim matrix whose columns are the basis vectors.
    pub fn dense(&self) -> DMatrix<f64> {
        let mut b = DMatrix::zeros(1 << self.l, self.dim());
        for i in 0..self.dim() {
            for (state, coeff) in self.components(i) {
                b[(state, i)] = coeff;
            }
        }
        b
    }
}

/// Enumerate the orthonormal basis of one reflection-parity sector.
pub fn build_parity_basis(l: usize, sector: Parity) -> Result<ParitySectorBasis> {
    if l < 2 {
        return Err(Error::InvalidConfig(format!("chain length L = {l} must be >= 2")));
    }
    if l > 26 {
        return Err(Error::ResourceLimit { dim: 1 << l, needed: usize::MAX, budget: DEFAULT_DENSE_BUDGET });
    }
    let n = 1usize << l;
    let mut orbits = Vec::new();
    let mut index_of = vec![NO_INDEX; n];
    for s in 0..n {
        let r = reflect_state(s, l);
        if r < s {
            continue; // orbit already visited from its representative
        }
        if s == r && sector == Parity::Odd {
            continue; // antisymmetric combination of a palindrome vanishes
        }
        let idx = orbits.len() as u32;
        orbits.push((s as u32, r as u32));
        index_of[s] = idx;
        index_of[r] = idx;
    }
    Ok(ParitySectorBasis { l, sector, orbits, index_of })
}

/// Hermitian operator restricted to one parity sector.
#[derive(Debug, Clone)]
pub struct SectorOperator {
    pub label: String,
    data: DenseMatrix,
}

impl SectorOperator {
    /// Wrap a dense sector matrix, enforcing Hermiticity to
    /// [`HERMITICITY_TOL`] relative to the largest entry.
    pub fn new(label: impl Into<String>, data: DenseMatrix) -> Result<Self> {
        let scale = data.max_abs().max(1e-300);
        let dev = data.hermiticity_deviation();
        if dev > HERMITICITY_TOL * scale {
            return Err(Error::NotHermitian { max_dev: dev, scale });
        }
        Ok(Self { label: label.into(), data })
    }

    pub fn dim(&self) -> usize {
        self.data.dim()
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.data
    }

    pub fn is_real(&self) -> bool {
        self.data.is_real()
    }

    /// Sorted eigenvalues (ascending).
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = match &self.data {
            DenseMatrix::Real(m) => m.clone().symmetric_eigenvalues().iter().copied().collect(),
            DenseMatrix::Complex(m) => m.clone().symmetric_eigenvalues().iter().copied().collect(),
        };
        ev.sort_by(f64::total_cmp);
        ev
    }
}

fn check_budget(l: usize, complex: bool, budget: usize) -> Result<usize> {
    let dim = 1usize.checked_shl(l as u32).ok_or(Error::ResourceLimit {
        dim: usize::MAX,
        needed: usize::MAX,
        budget,
    })?;
    let entry = if complex { 16 } else { 8 };
    let needed = dim
        .checked_mul(dim)
        .and_then(|e| e.checked_mul(entry))
        .ok_or(Error::ResourceLimit { dim, needed: usize::MAX, budget })?;
    if needed > budget {
        return Err(Error::ResourceLimit { dim, needed, budget });
    }
    Ok(dim)
}

/// Diagonal matrix element of H on a computational basis state.
fn hamiltonian_diagonal(state: usize, p: &SpinChainParams) -> f64 {
    let z = |k: usize| if (state >> k) & 1 == 0 { 1.0 } else { -1.0 };
    let mut diag = 0.0;
    for k in 0..p.l {
        diag += p.hz * z(k);
        if k + 1 < p.l {
            diag -= p.j * z(k) * z(k + 1);
        }
    }
    diag
}

/// Build the full-space Hamiltonian as a real symmetric 2^L x 2^L matrix.
pub fn build_hamiltonian(params: &SpinChainParams) -> Result<FullOperator> {
    build_hamiltonian_with_budget(params, DEFAULT_DENSE_BUDGET)
}

/// Same as [`build_hamiltonian`] with an explicit dense-memory budget.
pub fn build_hamiltonian_with_budget(params: &SpinChainParams, budget: usize) -> Result<FullOperator> {
    let dim = check_budget(params.l, false, budget)?;
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    for s in 0..dim {
        m[(s, s)] = hamiltonian_diagonal(s, params);
        for k in 0..params.l {
            m[(s ^ (1 << k), s)] += params.hx;
        }
    }
    let label = format!(
        "H(L={},J={},hx={},hz={})",
        params.l, params.j, params.hx, params.hz
    );
    Ok(FullOperator::new(label, DenseMatrix::Real(m)))
}

/// Total spin component `S^alpha_T = sum_k (1/2) sigma^alpha_k`.
pub fn build_total_spin(axis: Axis, l: usize) -> Result<FullOperator> {
    if l < 1 {
        return Err(Error::InvalidConfig("need at least one site".into()));
    }
    let terms: Vec<SiteTerm> = (1..=l).map(|site| SiteTerm { site, axis, weight: 1.0 }).collect();
    let mut op = build_site_combination(&terms, l)?;
    op.label = format!("S{axis}T");
    Ok(op)
}

/// Weighted sum of single-site Paulis, `sum_i w_i (1/2) sigma^{a_i}_{s_i}`.
///
/// The result need not commute with reflection; [`project`] checks that.
pub fn build_site_combination(terms: &[SiteTerm], l: usize) -> Result<FullOperator> {
    for t in terms {
        if t.site < 1 || t.site > l {
            return Err(Error::SiteOutOfRange { site: t.site, l });
        }
        if !t.weight.is_finite() {
            return Err(Error::InvalidConfig("term weight must be finite".into()));
        }
    }
    let needs_complex = terms.iter().any(|t| t.axis == Axis::Y);
    let dim = check_budget(l, needs_complex, DEFAULT_DENSE_BUDGET)?;

    let label = {
        let body: Vec<String> = terms
            .iter()
            .map(|t| {
                if (t.weight - 1.0).abs() < 1e-15 {
                    format!("{}{}", t.site, t.axis)
                } else {
                    format!("{}*{}{}", t.weight, t.site, t.axis)
                }
            })
            .collect();
        format!("sites:{}", body.join("+"))
    };

    if needs_complex {
        let mut m = DMatrix::<C64>::zeros(dim, dim);
        for t in terms {
            let bit = t.site - 1;
            let half = 0.5 * t.weight;
            for s in 0..dim {
                match t.axis {
                    Axis::X => m[(s ^ (1 << bit), s)] += C64::new(half, 0.0),
                    // sigma^y |0> = i|1>, sigma^y |1> = -i|0>
                    Axis::Y => {
                        let sign = if (s >> bit) & 1 == 0 { 1.0 } else { -1.0 };
                        m[(s ^ (1 << bit), s)] += C64::new(0.0, sign * half);
                    }
                    Axis::Z => {
                        let z = if (s >> bit) & 1 == 0 { 1.0 } else { -1.0 };
                        m[(s, s)] += C64::new(half * z, 0.0);
                    }
                }
            }
        }
        Ok(FullOperator::new(label, DenseMatrix::Complex(m)))
    } else {
        let mut m = DMatrix::<f64>::zeros(dim, dim);
        for t in terms {
            let bit = t.site - 1;
            let half = 0.5 * t.weight;
            for s in 0..dim {
                match t.axis {
                    Axis::X => m[(s ^ (1 << bit), s)] += half,
                    Axis::Y => unreachable!(),
                    Axis::Z => {
                        let z = if (s >> bit) & 1 == 0 { 1.0 } else { -1.0 };
                        m[(s, s)] += half * z;
                    }
                }
            }
        }
        Ok(FullOperator::new(label, DenseMatrix::Real(m)))
    }
}

/// Project a full-space operator into a parity sector: `B^dag M B` with `B`
/// the column matrix of sector basis vectors.
///
/// Fails with [`Error::SymmetryViolation`] when the operator does not commute
/// with the reflection, since it would then leak between sectors.
pub fn project(op: &FullOperator, basis: &ParitySectorBasis) -> Result<SectorOperator> {
    if op.dim() != 1 << basis.l() {
        return Err(Error::DimensionMismatch { left: op.dim(), right: 1 << basis.l() });
    }
    let max_entry = op.reflection_commutator_max();
    if max_entry > REFLECTION_COMM_TOL {
        return Err(Error::SymmetryViolation { max_entry });
    }
    let dim = basis.dim();
    let data = match op.matrix() {
        DenseMatrix::Real(m) => {
            let mut out = DMatrix::<f64>::zeros(dim, dim);
            for b in 0..dim {
                for a in 0..dim {
                    let mut acc = 0.0;
                    for (v, cv) in basis.components(a) {
                        for (u, cu) in basis.components(b) {
                            acc += cu * cv * m[(u, v)];
                        }
                    }
                    out[(a, b)] = acc;
                }
            }
            DenseMatrix::Real(out)
        }
        DenseMatrix::Complex(m) => {
            let mut out = DMatrix::<C64>::zeros(dim, dim);
            for b in 0..dim {
                for a in 0..dim {
                    let mut acc = C64::new(0.0, 0.0);
                    for (v, cv) in basis.components(a) {
                        for (u, cu) in basis.components(b) {
                            acc += m[(u, v)] * (cu * cv);
                        }
                    }
                    out[(a, b)] = acc;
                }
            }
            DenseMatrix::Complex(out)
        }
    };
    SectorOperator::new(op.label.clone(), data)
}

/// Build the sector-projected Hamiltonian without materializing the 2^L
/// matrix, by applying the sparse H action to each (at most two-component)
/// sector basis vector. Equivalent to `project(build_hamiltonian(p), basis)`
/// and usable at L = 13 where the full-space route blows the memory budget.
pub fn build_sector_hamiltonian(params: &SpinChainParams, basis: &ParitySectorBasis) -> Result<SectorOperator> {
    if basis.l() != params.l {
        return Err(Error::DimensionMismatch { left: 1 << basis.l(), right: 1 << params.l });
    }
    let dim = basis.dim();
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    for a in 0..dim {
        for (u, cu) in basis.components(a) {
            // diagonal part of H|u>
            add_sector_amplitude(&mut m, basis, a, u, cu * hamiltonian_diagonal(u, params));
            // transverse part flips one bit at a time
            for k in 0..params.l {
                add_sector_amplitude(&mut m, basis, a, u ^ (1 << k), cu * params.hx);
            }
        }
    }
    let label = format!(
        "H(L={},J={},hx={},hz={})",
        params.l, params.j, params.hx, params.hz
    );
    SectorOperator::new(label, DenseMatrix::Real(m))
}

#[inline]
fn add_sector_amplitude(m: &mut DMatrix<f64>, basis: &ParitySectorBasis, col: usize, state: usize, amp: f64) {
    if let Some(row) = basis.index_of_state(state) {
        let c = basis.coefficient(row, state);
        m[(row, col)] += c * amp;
    }
}

/// Real symmetric traceless matrix with i.i.d. Gaussian entries, generated
/// directly in the sector (a generic full-space random matrix would not
/// commute with parity). Deterministic for a fixed seed.
pub fn random_gaussian_traceless(dim: usize, seed: u64) -> Result<SectorOperator> {
    if dim < 2 {
        return Err(Error::InvalidConfig(format!("random operator needs dim >= 2, got {dim}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    for j in 0..dim {
        for i in 0..dim {
            m[(i, j)] = StandardNormal.sample(&mut rng);
        }
    }
    // symmetrize, then remove the trace component
    m = (m.clone() + m.transpose()) * 0.5;
    let shift = m.trace() / dim as f64;
    for i in 0..dim {
        m[(i, i)] -= shift;
    }
    SectorOperator::new(format!("random(seed={seed})"), DenseMatrix::Real(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sorted_eigenvalues(op: &FullOperator) -> Vec<f64> {
        let mut ev: Vec<f64> = match op.matrix() {
            DenseMatrix::Real(m) => m.clone().symmetric_eigenvalues().iter().copied().collect(),
            DenseMatrix::Complex(m) => m.clone().symmetric_eigenvalues().iter().copied().collect(),
        };
        ev.sort_by(f64::total_cmp);
        ev
    }

    #[test]
    fn field_only_hamiltonian_is_diagonal_with_known_spectrum() {
        let p = SpinChainParams::new(2, 0.0, 0.0, 1.0).unwrap();
        let h = build_hamiltonian(&p).unwrap();
        let ev = sorted_eigenvalues(&h);
        for (got, want) in ev.iter().zip([-2.0, 0.0, 0.0, 2.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn single_zz_bond_spectrum() {
        let p = SpinChainParams::new(2, 1.0, 0.0, 0.0).unwrap();
        let h = build_hamiltonian(&p).unwrap();
        let ev = sorted_eigenvalues(&h);
        for (got, want) in ev.iter().zip([-1.0, -1.0, 1.0, 1.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn hamiltonian_budget_is_enforced() {
        let p = SpinChainParams::new(8, 1.0, 1.0, 0.5).unwrap();
        let err = build_hamiltonian_with_budget(&p, 1024).unwrap_err();
        assert!(matches!(err, Error::ResourceLimit { .. }));
    }

    #[test]
    fn parity_dims_follow_the_palindrome_formula() {
        for l in 2..=8 {
            let even = build_parity_basis(l, Parity::Even).unwrap();
            let odd = build_parity_basis(l, Parity::Odd).unwrap();
            let pal = 1usize << l.div_ceil(2);
            assert_eq!(even.dim(), ((1 << l) + pal) / 2, "L={l}");
            assert_eq!(even.dim() + odd.dim(), 1 << l, "L={l}");
        }
        assert_eq!(build_parity_basis(6, Parity::Even).unwrap().dim(), 36);
        assert_eq!(build_parity_basis(7, Parity::Even).unwrap().dim(), 72);
        assert_eq!(build_parity_basis(13, Parity::Even).unwrap().dim(), 4160);
    }

    #[test]
    fn even_basis_at_l2_is_the_three_expected_states() {
        let basis = build_parity_basis(2, Parity::Even).unwrap();
        assert_eq!(basis.dim(), 3);
        // |00>, (|01>+|10>)/sqrt(2), |11>
        let c = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(basis.components(0).collect::<Vec<_>>(), vec![(0, 1.0)]);
        assert_eq!(basis.components(1).collect::<Vec<_>>(), vec![(1, c), (2, c)]);
        assert_eq!(basis.components(2).collect::<Vec<_>>(), vec![(3, 1.0)]);
    }

    #[test]
    fn basis_vectors_are_orthonormal() {
        for sector in [Parity::Even, Parity::Odd] {
            let basis = build_parity_basis(5, sector).unwrap();
            let b = basis.dense();
            let gram = b.transpose() * &b;
            let eye = DMatrix::<f64>::identity(basis.dim(), basis.dim());
            assert!((gram - eye).iter().all(|x| x.abs() < 1e-14));
        }
    }

    #[test]
    fn projecting_identity_gives_sector_identity() {
        let basis = build_parity_basis(4, Parity::Odd).unwrap();
        let eye = FullOperator::new("id", DenseMatrix::Real(DMatrix::identity(16, 16)));
        let proj = project(&eye, &basis).unwrap();
        match proj.matrix() {
            DenseMatrix::Real(m) => {
                let eye = DMatrix::<f64>::identity(basis.dim(), basis.dim());
                assert!((m - eye).iter().all(|x| x.abs() < 1e-14));
            }
            _ => panic!("expected real projection"),
        }
    }

    #[test]
    fn transverse_pair_projects_to_known_three_state_matrix() {
        // sigma^x_1 + sigma^x_2 at L=2 (weight 2 cancels the spin-1/2 factor)
        let op = build_site_combination(
            &[
                SiteTerm { site: 1, axis: Axis::X, weight: 2.0 },
                SiteTerm { site: 2, axis: Axis::X, weight: 2.0 },
            ],
            2,
        )
        .unwrap();
        let basis = build_parity_basis(2, Parity::Even).unwrap();
        let proj = project(&op, &basis).unwrap();
        let s = std::f64::consts::SQRT_2;
        let want = DMatrix::from_row_slice(3, 3, &[0.0, s, 0.0, s, 0.0, s, 0.0, s, 0.0]);
        match proj.matrix() {
            DenseMatrix::Real(m) => assert!((m - want).iter().all(|x| x.abs() < 1e-14)),
            _ => panic!("expected real projection"),
        }
    }

    #[test]
    fn total_spin_z_at_l2_is_the_expected_diagonal() {
        let op = build_total_spin(Axis::Z, 2).unwrap();
        match op.matrix() {
            DenseMatrix::Real(m) => {
                let want = DMatrix::from_diagonal(&nalgebra::dvector![1.0, 0.0, 0.0, -1.0]);
                assert!((m - want).iter().all(|x| x.abs() < 1e-14));
            }
            _ => panic!("expected real matrix"),
        }
    }

    #[test]
    fn total_spin_x_single_site_is_half_sigma_x() {
        let op = build_total_spin(Axis::X, 1).unwrap();
        match op.matrix() {
            DenseMatrix::Real(m) => {
                assert_eq!(m.nrows(), 2);
                assert_abs_diff_eq!(m[(0, 1)], 0.5);
                assert_abs_diff_eq!(m[(1, 0)], 0.5);
                assert_abs_diff_eq!(m[(0, 0)], 0.0);
            }
            _ => panic!("expected real matrix"),
        }
    }

    #[test]
    fn total_spin_commutes_with_reflection_exactly() {
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            for l in 2..=5 {
                let op = build_total_spin(axis, l).unwrap();
                assert_eq!(op.reflection_commutator_max(), 0.0, "axis={axis} L={l}");
            }
        }
    }

    #[test]
    fn total_spin_is_traceless_and_hermitian() {
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let op = build_total_spin(axis, 4).unwrap();
            assert!(op.matrix().trace().norm() < 1e-12);
            let scale = op.matrix().max_abs();
            assert!(op.matrix().hermiticity_deviation() <= HERMITICITY_TOL * scale);
        }
    }

    #[test]
    fn site_combination_rejects_out_of_range_sites() {
        let err = build_site_combination(&[SiteTerm { site: 7, axis: Axis::Z, weight: 1.0 }], 6).unwrap_err();
        assert!(matches!(err, Error::SiteOutOfRange { site: 7, l: 6 }));
    }

    #[test]
    fn single_site_z_is_half_sigma_z_tensor_identity() {
        let op = build_site_combination(&[SiteTerm { site: 1, axis: Axis::Z, weight: 1.0 }], 2).unwrap();
        match op.matrix() {
            DenseMatrix::Real(m) => {
                let want = DMatrix::from_diagonal(&nalgebra::dvector![0.5, -0.5, 0.5, -0.5]);
                assert!((m - want).iter().all(|x| x.abs() < 1e-14));
            }
            _ => panic!("expected real matrix"),
        }
    }

    #[test]
    fn mirror_pair_commutes_and_mixed_pair_does_not() {
        let mirror = build_site_combination(
            &[
                SiteTerm { site: 3, axis: Axis::Z, weight: 1.0 },
                SiteTerm { site: 4, axis: Axis::Z, weight: 1.0 },
            ],
            6,
        )
        .unwrap();
        assert!(mirror.commutes_with_reflection());

        let mixed = build_site_combination(
            &[
                SiteTerm { site: 3, axis: Axis::Z, weight: 1.0 },
                SiteTerm { site: 4, axis: Axis::X, weight: 1.0 },
            ],
            6,
        )
        .unwrap();
        assert!(!mixed.commutes_with_reflection());
        let basis = build_parity_basis(6, Parity::Even).unwrap();
        let err = project(&mixed, &basis).unwrap_err();
        assert!(matches!(err, Error::SymmetryViolation { .. }));
    }

    #[test]
    fn random_operator_is_deterministic_symmetric_traceless() {
        let a = random_gaussian_traceless(36, 1).unwrap();
        let b = random_gaussian_traceless(36, 1).unwrap();
        let c = random_gaussian_traceless(36, 2).unwrap();
        let (ma, mb, mc) = match (a.matrix(), b.matrix(), c.matrix()) {
            (DenseMatrix::Real(x), DenseMatrix::Real(y), DenseMatrix::Real(z)) => (x, y, z),
            _ => panic!("expected real matrices"),
        };
        assert_eq!(ma, mb);
        assert_ne!(ma, mc);
        assert!(ma.trace().abs() < 1e-12);
        assert!(mc.trace().abs() < 1e-12);
        assert!((ma - ma.transpose()).iter().all(|x| x.abs() == 0.0));

        let tiny = random_gaussian_traceless(2, 9).unwrap();
        assert!(tiny.matrix().trace().norm() <= 1e-14);
    }

    #[test]
    fn sector_hamiltonian_matches_projection_route() {
        for l in [2, 4, 6] {
            for sector in [Parity::Even, Parity::Odd] {
                let p = SpinChainParams::new(l, 1.0, 1.0, 0.2).unwrap();
                let basis = build_parity_basis(l, sector).unwrap();
                let via_projection = project(&build_hamiltonian(&p).unwrap(), &basis).unwrap();
                let direct = build_sector_hamiltonian(&p, &basis).unwrap();
                match (via_projection.matrix(), direct.matrix()) {
                    (DenseMatrix::Real(a), DenseMatrix::Real(b)) => {
                        assert!((a - b).iter().all(|x| x.abs() < 1e-12), "L={l} {sector}");
                    }
                    _ => panic!("expected real matrices"),
                }
            }
        }
    }

    #[test]
    fn reflect_state_reverses_bits() {
        assert_eq!(reflect_state(0b01, 2), 0b10);
        assert_eq!(reflect_state(0b001011, 6), 0b110100);
        assert_eq!(reflect_state(0b101, 3), 0b101);
    }
}
