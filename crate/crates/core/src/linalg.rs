//! Dense symmetric eigendecomposition, SVD, numerical rank, subspace bases
//! and principal angles.
//!
//! Every decomposition returned here is sorted descending with ties broken
//! by the solver's original index, and every singular/eigen vector carries a
//! sign convention (largest-magnitude entry positive) so results are
//! deterministic for a fixed input.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default symmetry tolerance, relative to the largest entry.
pub const DEFAULT_SYM_TOL: f64 = 1e-12;

const SOLVER_EPS: f64 = f64::EPSILON;
const MAX_SWEEPS: usize = 10_000;
const JACOBI_SWEEPS: usize = 60;

/// Rank tolerance used when the caller does not supply one: `n * eps`.
pub fn default_rel_tol(n: usize) -> f64 {
    n.max(1) as f64 * f64::EPSILON
}

/// A dense real symmetric matrix, stored exactly symmetrized.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    entries: DMatrix<f64>,
}

impl SymmetricMatrix {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        Self::with_tolerance(entries, DEFAULT_SYM_TOL)
    }

    /// Accepts `entries` when `|m_ij - m_ji| <= sym_tol * max|m|` and stores
    /// `(M + M^T) / 2`.
    pub fn with_tolerance(entries: DMatrix<f64>, sym_tol: f64) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "symmetric matrix must be square, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let scale = entries.amax();
        let tol = sym_tol * scale;
        let n = entries.nrows();
        for j in 0..n {
            for i in (j + 1)..n {
                let diff = (entries[(i, j)] - entries[(j, i)]).abs();
                if diff > tol {
                    return Err(Error::NotSymmetric {
                        row: i,
                        col: j,
                        diff,
                        tol,
                    });
                }
            }
        }
        Ok(Self {
            entries: symmetrize(entries),
        })
    }

    pub fn from_row_slice(n: usize, data: &[f64]) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(n, n, data))
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        Self::new(DMatrix::from_fn(n, n, |i, j| if i == j { diag[i] } else { 0.0 }))
    }

    pub fn identity(n: usize) -> Self {
        Self {
            entries: DMatrix::identity(n, n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            entries: DMatrix::zeros(n, n),
        }
    }

    pub fn order(&self) -> usize {
        self.entries.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.entries
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.norm()
    }
}

impl SymmetricMatrix {
    /// Stores `(M + M^T) / 2` for a product that is symmetric in exact
    /// arithmetic.
    pub(crate) fn symmetrized(entries: DMatrix<f64>) -> Self {
        debug_assert!(entries.is_square());
        Self {
            entries: symmetrize(entries),
        }
    }
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    let mt = m.transpose();
    (m + mt) * 0.5
}

/// A dense real rectangular matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RectMatrix {
    entries: DMatrix<f64>,
}

impl RectMatrix {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { entries })
    }

    pub fn from_row_slice(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(rows, cols, data))
    }

    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.entries
    }
}

/// Eigenpairs of a symmetric matrix, `values` descending, column `i` of
/// `vectors` paired with `values[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigDecomposition {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl EigDecomposition {
    /// `(||M V - V diag(values)||_F, ||V^T V - I||_F)`.
    pub fn residuals(&self, m: &SymmetricMatrix) -> (f64, f64) {
        let n = self.values.len();
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.values));
        let recon = (m.as_matrix() * &self.vectors - &self.vectors * d).norm();
        let orth = (self.vectors.transpose() * &self.vectors - DMatrix::identity(n, n)).norm();
        (recon, orth)
    }

    /// Rebuilds `V diag(f(values)) V^T`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let mut scaled = self.vectors.clone();
        for (j, &v) in self.values.iter().enumerate() {
            let s = f(v);
            scaled.column_mut(j).scale_mut(s);
        }
        &scaled * self.vectors.transpose()
    }
}

/// Economy SVD `N = Q diag(s) V^T` with `k = min(rows, cols)` columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdDecomposition {
    pub singular_values: Vec<f64>,
    pub left: DMatrix<f64>,
    pub right: DMatrix<f64>,
}

impl SvdDecomposition {
    pub fn reconstruction_residual(&self, n: &RectMatrix) -> f64 {
        let mut scaled = self.left.clone();
        for (j, &s) in self.singular_values.iter().enumerate() {
            scaled.column_mut(j).scale_mut(s);
        }
        (n.as_matrix() - scaled * self.right.transpose()).norm()
    }
}

/// Permutation sorting `keys` descending; ties keep original order.
fn descending_order(keys: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..keys.len()).collect();
    idx.sort_by(|&a, &b| keys[b].total_cmp(&keys[a]));
    idx
}

/// Index of the first largest-magnitude entry.
fn pivot_index(col: nalgebra::DVectorView<'_, f64>) -> usize {
    let mut best = 0;
    let mut best_abs = -1.0;
    for (i, v) in col.iter().enumerate() {
        if v.abs() > best_abs {
            best = i;
            best_abs = v.abs();
        }
    }
    best
}

pub fn sym_eig(m: &SymmetricMatrix) -> Result<EigDecomposition> {
    let a = m.as_matrix();
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(EigDecomposition {
            values: Vec::new(),
            vectors: DMatrix::zeros(0, 0),
        });
    }
    let eig = SymmetricEigen::try_new(a.clone(), SOLVER_EPS, MAX_SWEEPS)
        .ok_or(Error::ConvergenceFailure)?;
    let raw: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let order = descending_order(&raw);
    let mut vectors = DMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        values.push(raw[src]);
        let col = eig.eigenvectors.column(src);
        let sign = if col[pivot_index(col)] < 0.0 { -1.0 } else { 1.0 };
        vectors.set_column(dst, &(col * sign));
    }
    Ok(EigDecomposition { values, vectors })
}

/// Raw SVD of an arbitrary matrix, sorted and sign-normalized. Returns
/// `(values, U, V)` with `min(rows, cols)` columns each.
fn sorted_svd(a: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>, DMatrix<f64>)> {
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let (r, c) = a.shape();
    let k = r.min(c);
    if k == 0 {
        return Ok((Vec::new(), DMatrix::zeros(r, 0), DMatrix::zeros(c, 0)));
    }
    let (raw, u, v) = if r >= c {
        jacobi_svd(a.clone())?
    } else {
        let (s, u, v) = jacobi_svd(a.transpose())?;
        (s, v, u)
    };
    let order = descending_order(&raw);
    let mut left = DMatrix::zeros(r, k);
    let mut right = DMatrix::zeros(c, k);
    let mut values = Vec::with_capacity(k);
    for (dst, &src) in order.iter().enumerate() {
        values.push(raw[src]);
        let vcol = v.column(src);
        let sign = if vcol[pivot_index(vcol)] < 0.0 { -1.0 } else { 1.0 };
        right.set_column(dst, &(vcol * sign));
        left.set_column(dst, &(u.column(src) * sign));
    }
    Ok((values, left, right))
}

/// One-sided Jacobi SVD of a tall matrix (`rows >= cols`). Returns the
/// unsorted singular values with thin `U` and square `V`. Left vectors of
/// zero singular values are filled in to keep `U` orthonormal.
fn jacobi_svd(mut w: DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>, DMatrix<f64>)> {
    let c = w.ncols();
    let tol = (w.nrows() as f64).sqrt() * f64::EPSILON;
    // Columns this small are roundoff and never become orthogonal.
    let negligible = (f64::EPSILON * w.norm()).powi(2);
    let mut v = DMatrix::<f64>::identity(c, c);
    let mut converged = false;
    for _ in 0..JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..c {
            for q in p + 1..c {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(q).norm_squared();
                let gamma = w.column(p).dot(&w.column(q));
                if gamma == 0.0 || alpha.min(beta) <= negligible || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                rotate_columns(&mut w, p, q, cs, sn);
                rotate_columns(&mut v, p, q, cs, sn);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::ConvergenceFailure);
    }

    let values: Vec<f64> = (0..c).map(|j| w.column(j).norm()).collect();
    let scale = values.iter().fold(0.0f64, |a, &s| a.max(s));
    let mut filled = vec![false; c];
    for j in 0..c {
        if values[j] > f64::MIN_POSITIVE.max(scale * f64::EPSILON * w.nrows() as f64) {
            let s = values[j];
            w.column_mut(j).unscale_mut(s);
            filled[j] = true;
        }
    }
    complete_orthonormal(&mut w, &filled);
    Ok((values, w, v))
}

fn rotate_columns(m: &mut DMatrix<f64>, p: usize, q: usize, cs: f64, sn: f64) {
    for i in 0..m.nrows() {
        let (x, y) = (m[(i, p)], m[(i, q)]);
        m[(i, p)] = cs * x - sn * y;
        m[(i, q)] = sn * x + cs * y;
    }
}

/// Replaces the columns not marked `filled` with unit vectors orthogonal to
/// all other columns (Gram-Schmidt over the standard basis).
fn complete_orthonormal(m: &mut DMatrix<f64>, filled: &[bool]) {
    let n = m.nrows();
    let mut done: Vec<bool> = filled.to_vec();
    let mut candidate = 0;
    for j in 0..m.ncols() {
        if done[j] {
            continue;
        }
        while candidate < n {
            let mut x = nalgebra::DVector::<f64>::zeros(n);
            x[candidate] = 1.0;
            candidate += 1;
            for _ in 0..2 {
                for (l, &d) in done.iter().enumerate() {
                    if d {
                        let proj = m.column(l).dot(&x);
                        x.axpy(-proj, &m.column(l), 1.0);
                    }
                }
            }
            let norm = x.norm();
            if norm > 0.5 {
                m.set_column(j, &(x / norm));
                done[j] = true;
                break;
            }
        }
    }
}

pub fn svd(n: &RectMatrix) -> Result<SvdDecomposition> {
    let (singular_values, left, right) = sorted_svd(n.as_matrix())?;
    Ok(SvdDecomposition {
        singular_values,
        left,
        right,
    })
}

/// Number of entries strictly greater than `rel_tol * values[0]`.
pub fn numerical_rank(values: &[f64], rel_tol: f64) -> usize {
    match values.first() {
        Some(&top) if top > 0.0 => {
            let threshold = rel_tol * top;
            values.iter().filter(|&&v| v > threshold).count()
        }
        _ => 0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubspaceKind {
    Range,
    Kernel,
}

/// Orthonormal basis of a range or kernel, with the rank tolerance that
/// decided its dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    columns: DMatrix<f64>,
    kind: SubspaceKind,
    rank_tol: f64,
}

impl SubspaceBasis {
    /// Wraps columns that are already orthonormal.
    pub fn from_orthonormal(columns: DMatrix<f64>, kind: SubspaceKind, rank_tol: f64) -> Result<Self> {
        let k = columns.ncols();
        let err = (columns.transpose() * &columns - DMatrix::identity(k, k)).norm();
        if err > 1e-10 * k.max(1) as f64 {
            return Err(Error::DimensionMismatch(format!(
                "basis columns are not orthonormal (residual {err:e})"
            )));
        }
        Ok(Self {
            columns,
            kind,
            rank_tol,
        })
    }

    /// Orthonormal basis for the span of arbitrary columns.
    pub fn span_of(columns: &DMatrix<f64>, rel_tol: f64) -> Result<Self> {
        let (values, left, _) = sorted_svd(columns)?;
        let rank = numerical_rank(&values, rel_tol);
        Ok(Self {
            columns: left.columns(0, rank).into_owned(),
            kind: SubspaceKind::Range,
            rank_tol: rel_tol,
        })
    }

    pub(crate) fn from_parts(columns: DMatrix<f64>, kind: SubspaceKind, rank_tol: f64) -> Self {
        Self {
            columns,
            kind,
            rank_tol,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.columns.nrows()
    }

    pub fn dim(&self) -> usize {
        self.columns.ncols()
    }

    pub fn columns(&self) -> &DMatrix<f64> {
        &self.columns
    }

    pub fn kind(&self) -> SubspaceKind {
        self.kind
    }

    pub fn rank_tol(&self) -> f64 {
        self.rank_tol
    }

    pub fn orthonormality_residual(&self) -> f64 {
        let k = self.dim();
        (self.columns.transpose() * &self.columns - DMatrix::identity(k, k)).norm()
    }
}

/// Splits eigenvectors of a symmetric matrix by magnitude of eigenvalue.
fn split_eigenspaces(m: &SymmetricMatrix, rel_tol: f64) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let eig = sym_eig(m)?;
    let magnitudes: Vec<f64> = eig.values.iter().map(|v| v.abs()).collect();
    let order = descending_order(&magnitudes);
    let sorted: Vec<f64> = order.iter().map(|&i| magnitudes[i]).collect();
    let rank = numerical_rank(&sorted, rel_tol);
    let n = m.order();
    let mut range = DMatrix::zeros(n, rank);
    let mut kernel = DMatrix::zeros(n, n - rank);
    for (pos, &src) in order.iter().enumerate() {
        if pos < rank {
            range.set_column(pos, &eig.vectors.column(src));
        } else {
            kernel.set_column(pos - rank, &eig.vectors.column(src));
        }
    }
    Ok((range, kernel))
}

pub fn range_basis(m: &SymmetricMatrix, rel_tol: f64) -> Result<SubspaceBasis> {
    let (range, _) = split_eigenspaces(m, rel_tol)?;
    Ok(SubspaceBasis::from_parts(range, SubspaceKind::Range, rel_tol))
}

pub fn kernel_basis(m: &SymmetricMatrix, rel_tol: f64) -> Result<SubspaceBasis> {
    let (_, kernel) = split_eigenspaces(m, rel_tol)?;
    Ok(SubspaceBasis::from_parts(kernel, SubspaceKind::Kernel, rel_tol))
}

/// Full right singular basis of `N` (`cols x cols`), obtained by padding
/// short-wide matrices with zero rows.
fn full_right_singular(n: &RectMatrix) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let a = n.as_matrix();
    let (r, c) = a.shape();
    let padded = if r < c {
        let mut p = DMatrix::zeros(c, c);
        p.rows_mut(0, r).copy_from(a);
        p
    } else {
        a.clone()
    };
    let (values, _, right) = sorted_svd(&padded)?;
    Ok((values, right))
}

/// Null space of a rectangular matrix.
pub fn kernel_basis_rect(n: &RectMatrix, rel_tol: f64) -> Result<SubspaceBasis> {
    let (values, right) = full_right_singular(n)?;
    let rank = numerical_rank(&values, rel_tol);
    let c = n.cols();
    Ok(SubspaceBasis::from_parts(
        right.columns(rank, c - rank).into_owned(),
        SubspaceKind::Kernel,
        rel_tol,
    ))
}

/// Row space of a rectangular matrix, i.e. `range(N^T)`.
pub fn row_space_basis(n: &RectMatrix, rel_tol: f64) -> Result<SubspaceBasis> {
    let (values, _, right) = sorted_svd(n.as_matrix())?;
    let rank = numerical_rank(&values, rel_tol);
    Ok(SubspaceBasis::from_parts(
        right.columns(0, rank).into_owned(),
        SubspaceKind::Range,
        rel_tol,
    ))
}

/// Principal angles between two subspaces of the same ambient space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrincipalAngles {
    /// Singular values of `X^T Y`, clamped into `[0, 1]`, descending.
    pub cosines: Vec<f64>,
    /// Radians, ascending.
    pub angles: Vec<f64>,
}

impl PrincipalAngles {
    pub fn theta_min(&self) -> f64 {
        self.angles.first().copied().unwrap_or(std::f64::consts::FRAC_PI_2)
    }

    pub fn cos_min_angle(&self) -> f64 {
        self.cosines.first().copied().unwrap_or(0.0)
    }

    /// `1 - cos(theta_min)`, evaluated as `2 sin^2(theta_min / 2)` so small
    /// angles keep their relative accuracy.
    pub fn rho(&self) -> f64 {
        one_minus_cos(self.theta_min())
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }
}

/// `1 - cos(theta)` without cancellation.
pub fn one_minus_cos(theta: f64) -> f64 {
    let s = (0.5 * theta).sin();
    2.0 * s * s
}

/// Cosines come from the SVD of `X^T Y`; sines from the SVD of the component
/// of the smaller basis orthogonal to the larger one. Angles below 45 degrees
/// are taken from the sines, the rest from the cosines.
pub fn principal_angles(x: &SubspaceBasis, y: &SubspaceBasis) -> Result<PrincipalAngles> {
    if x.ambient_dim() != y.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "subspaces live in R^{} and R^{}",
            x.ambient_dim(),
            y.ambient_dim()
        )));
    }
    if x.dim() == 0 || y.dim() == 0 {
        return Err(Error::EmptySubspace);
    }
    let (big, small) = if x.dim() >= y.dim() { (x, y) } else { (y, x) };
    let k = small.dim();

    let cross = big.columns().transpose() * small.columns();
    let (cos_raw, _, _) = sorted_svd(&cross)?;
    let cosines: Vec<f64> = cos_raw.iter().take(k).map(|c| c.clamp(0.0, 1.0)).collect();

    let residual = small.columns() - big.columns() * &cross;
    let (sin_raw, _, _) = sorted_svd(&residual)?;
    let mut sines: Vec<f64> = sin_raw.iter().map(|s| s.clamp(0.0, 1.0)).collect();
    sines.reverse();

    let angles = cosines
        .iter()
        .zip(sines.iter())
        .map(|(&c, &s)| if c * c >= 0.5 { s.asin() } else { c.acos() })
        .collect();
    Ok(PrincipalAngles { cosines, angles })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6};

    fn basis(cols: &[&[f64]]) -> SubspaceBasis {
        let n = cols[0].len();
        let m = DMatrix::from_fn(n, cols.len(), |i, j| cols[j][i]);
        SubspaceBasis::span_of(&m, 1e-12).unwrap()
    }

    #[test]
    fn svd_recovers_prescribed_singular_values() {
        // Q1 diag(s) Q2^T built from Householder reflectors.
        let reflector = |n: usize, seed: f64| {
            let v = nalgebra::DVector::from_fn(n, |i, _| (seed * (i as f64 + 1.0)).sin());
            DMatrix::identity(n, n) - (&v * v.transpose()) * (2.0 / v.norm_squared())
        };
        let s = [3.0, 0.9482391892237104, 0.6849672410476345, 1e-9];
        let mut d = DMatrix::zeros(7, 4);
        for (i, v) in s.iter().enumerate() {
            d[(i, i)] = *v;
        }
        let m = reflector(7, 0.7) * d * reflector(4, 1.3);
        let (vals, u, v) = sorted_svd(&m).unwrap();
        for (got, want) in vals.iter().zip(s) {
            assert!((got - want).abs() <= 4.0 * f64::EPSILON * 3.0, "{got} vs {want}");
        }
        assert!((u.tr_mul(&u) - DMatrix::identity(4, 4)).amax() < 1e-12);
        assert!((v.tr_mul(&v) - DMatrix::identity(4, 4)).amax() < 1e-14);
        let sig = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vals));
        assert!((&u * sig * v.transpose() - &m).amax() < 1e-14);

        let (wide, _, _) = sorted_svd(&m.transpose()).unwrap();
        assert_eq!(wide.len(), 4);
        assert!((wide[1] - s[1]).abs() < 1e-15);
    }

    #[test]
    fn eig_identity_and_diagonal() {
        let e = sym_eig(&SymmetricMatrix::identity(3)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0, 1.0]);
        let e = sym_eig(&SymmetricMatrix::from_diagonal(&[3.0, 1.0, 2.0]).unwrap()).unwrap();
        assert_eq!(e.values, vec![3.0, 2.0, 1.0]);
        let e = sym_eig(&SymmetricMatrix::from_diagonal(&[1.0, 0.0]).unwrap()).unwrap();
        assert_eq!(e.values, vec![1.0, 0.0]);
        assert_eq!(e.vectors, DMatrix::identity(2, 2));
    }

    #[test]
    fn symmetric_construction_checks() {
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.1, 1.0]);
        assert!(matches!(SymmetricMatrix::new(asym), Err(Error::NotSymmetric { .. })));
        let nan = DMatrix::from_row_slice(2, 2, &[1.0, f64::NAN, f64::NAN, 1.0]);
        assert!(matches!(SymmetricMatrix::new(nan), Err(Error::NonFinite)));
        let almost = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0 + 1e-14, 1.0]);
        let s = SymmetricMatrix::new(almost).unwrap();
        assert_eq!(s.as_matrix()[(0, 1)], s.as_matrix()[(1, 0)]);
        assert!(matches!(
            SymmetricMatrix::new(DMatrix::zeros(2, 3)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn svd_examples() {
        let (b1, b2) = (0.6, 0.8);
        let s = svd(&RectMatrix::from_row_slice(1, 2, &[b1, b2]).unwrap()).unwrap();
        assert!((s.singular_values[0] - 1.0).abs() < 1e-15);

        let z = svd(&RectMatrix::from_row_slice(1, 3, &[0.0; 3]).unwrap()).unwrap();
        assert_eq!(z.singular_values, vec![0.0]);

        let n = RectMatrix::from_row_slice(2, 3, &[2.0, 0.0, 0.0, 0.0, 3.0, 0.0]).unwrap();
        let s = svd(&n).unwrap();
        assert!((s.singular_values[0] - 3.0).abs() < 1e-14);
        assert!((s.singular_values[1] - 2.0).abs() < 1e-14);
        assert!(s.reconstruction_residual(&n) < 1e-12);
        assert_eq!(s.left.shape(), (2, 2));
        assert_eq!(s.right.shape(), (3, 2));
    }

    #[test]
    fn nonfinite_rejected_by_svd() {
        let n = RectMatrix {
            entries: DMatrix::from_row_slice(1, 2, &[f64::INFINITY, 1.0]),
        };
        assert!(matches!(svd(&n), Err(Error::NonFinite)));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(numerical_rank(&[1.0, 1e-20], 1e-14), 1);
        assert_eq!(numerical_rank(&[5.0, 4.0, 3.0], 1e-14), 3);
        assert_eq!(numerical_rank(&[1.0, 0.0], 1e-3), 1);
        assert_eq!(numerical_rank(&[0.0, 0.0], 1e-3), 0);
        assert_eq!(numerical_rank(&[], 1e-3), 0);
    }

    #[test]
    fn bases_of_toy_blocks() {
        let a = SymmetricMatrix::from_diagonal(&[1.0, 0.0]).unwrap();
        let r = range_basis(&a, 1e-14).unwrap();
        let k = kernel_basis(&a, 1e-14).unwrap();
        assert_eq!(r.columns().as_slice(), &[1.0, 0.0]);
        assert_eq!(k.columns().as_slice(), &[0.0, 1.0]);
        assert_eq!(k.kind(), SubspaceKind::Kernel);

        let (b1, b2) = (0.6, 0.8);
        let b = RectMatrix::from_row_slice(1, 2, &[b1, b2]).unwrap();
        let kb = kernel_basis_rect(&b, 1e-14).unwrap();
        assert_eq!(kb.dim(), 1);
        let v = kb.columns().column(0);
        // span{(-b2, b1)} up to sign
        assert!((v[0].abs() - b2).abs() < 1e-15 && (v[1].abs() - b1).abs() < 1e-15);
        assert!((v[0] * b1 + v[1] * b2).abs() < 1e-15);

        let id = SymmetricMatrix::identity(4);
        assert_eq!(kernel_basis(&id, 1e-14).unwrap().dim(), 0);
        assert_eq!(range_basis(&id, 1e-14).unwrap().dim(), 4);
    }

    #[test]
    fn angle_examples() {
        let e1 = basis(&[&[1.0, 0.0]]);
        let e2 = basis(&[&[0.0, 1.0]]);
        let same = principal_angles(&e1, &e1).unwrap();
        assert_eq!(same.angles, vec![0.0]);
        let ortho = principal_angles(&e1, &e2).unwrap();
        assert!((ortho.angles[0] - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(ortho.rho(), one_minus_cos(FRAC_PI_2));

        for &(b1, b2) in &[(0.6, 0.8), (0.8, 0.6), (0.1, (0.99f64).sqrt())] {
            let bb = basis(&[&[b1, b2]]);
            let pa = principal_angles(&e1, &bb).unwrap();
            assert!((pa.cosines[0] - b1).abs() < 1e-15);
            // brute force: max |x^T y| over unit x in span{e1, e3}, y = (b1, b2, 0)
            let x2 = basis(&[&[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0]]);
            let y2 = basis(&[&[b1, b2, 0.0]]);
            let pa3 = principal_angles(&x2, &y2).unwrap();
            let brute = (0..=36_000)
                .map(|t| {
                    let phi = t as f64 * std::f64::consts::PI / 18_000.0;
                    (phi.cos() * b1 + phi.sin() * 0.0).abs()
                })
                .fold(0.0f64, f64::max);
            assert!((brute - pa3.cosines[0]).abs() < 1e-12);
            assert!((brute - pa.cosines[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn angles_errors() {
        let e1 = basis(&[&[1.0, 0.0]]);
        let e3 = basis(&[&[1.0, 0.0, 0.0]]);
        assert!(matches!(principal_angles(&e1, &e3), Err(Error::DimensionMismatch(_))));
        let empty = kernel_basis(&SymmetricMatrix::identity(2), 1e-14).unwrap();
        assert!(matches!(principal_angles(&e1, &empty), Err(Error::EmptySubspace)));
    }

    #[test]
    fn small_angle_keeps_relative_accuracy() {
        let t = 1e-9f64;
        let x = basis(&[&[1.0, 0.0, 0.0]]);
        let y = basis(&[&[t.cos(), t.sin(), 0.0]]);
        let pa = principal_angles(&x, &y).unwrap();
        assert!((pa.angles[0] - t).abs() < 1e-20);
        assert!((pa.rho() / (0.5 * t * t) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn two_dimensional_angles() {
        let (s6, c6) = (FRAC_PI_6.sin(), FRAC_PI_6.cos());
        let (s3, c3) = (FRAC_PI_3.sin(), FRAC_PI_3.cos());
        let x = basis(&[&[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0]]);
        let y = basis(&[&[c6, 0.0, s6, 0.0], &[0.0, c3, 0.0, s3]]);
        let pa = principal_angles(&x, &y).unwrap();
        assert!((pa.angles[0] - FRAC_PI_6).abs() < 1e-14);
        assert!((pa.angles[1] - FRAC_PI_3).abs() < 1e-14);
        assert!((pa.cosines[0] - c6).abs() < 1e-14);
    }
}
