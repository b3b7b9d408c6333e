use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    default_rel_tol, sym_eig, svd, EigDecomposition, RectMatrix, SubspaceBasis, SubspaceKind, SvdDecomposition,
    SymmetricMatrix,
};

/// Default tolerance below which a principal angle is treated as zero.
pub const DEFAULT_ANGLE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProblemOptions {
    /// Relative rank tolerance; `None` means `(n + m) * eps`.
    pub rel_tol: Option<f64>,
    pub angle_tol: f64,
    /// Reject (instead of clamp) slightly negative eigenvalues of `A`.
    pub strict_psd: bool,
}

impl Default for ProblemOptions {
    fn default() -> Self {
        Self {
            rel_tol: None,
            angle_tol: DEFAULT_ANGLE_TOL,
            strict_psd: false,
        }
    }
}

/// A validated saddle-point pair `(A, B)`: `A` symmetric positive
/// semidefinite `n x n`, `B` full row rank `m x n` with `m < n`, and
/// `K = [[A, B^T], [B, 0]]` nonsingular.
///
/// The eigendecomposition of `A` and the SVD of `B` are computed once at
/// construction; eigenvalues of `A` in `[-rel_tol * mu_max, 0)` are clamped
/// to zero in the cached decomposition, the stored `A` itself is untouched.
#[derive(Debug, Clone)]
pub struct SaddleProblem {
    a: SymmetricMatrix,
    b: RectMatrix,
    rel_tol: f64,
    angle_tol: f64,
    a_eig: EigDecomposition,
    b_svd: SvdDecomposition,
    rank_a: usize,
}

impl SaddleProblem {
    pub fn new(a: SymmetricMatrix, b: RectMatrix) -> Result<Self> {
        Self::with_options(a, b, ProblemOptions::default())
    }

    pub fn with_options(a: SymmetricMatrix, b: RectMatrix, opts: ProblemOptions) -> Result<Self> {
        let n = a.order();
        let m = b.rows();
        if b.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "A is {n}x{n} but B has {} columns",
                b.cols()
            )));
        }
        if m == 0 || m >= n {
            return Err(Error::DimensionMismatch(format!(
                "need 0 < m < n, got n = {n}, m = {m}"
            )));
        }
        let rel_tol = opts.rel_tol.unwrap_or_else(|| default_rel_tol(n + m));
        if !(rel_tol > 0.0) || !(opts.angle_tol > 0.0) {
            return Err(Error::ParameterOutOfRange(
                "tolerances must be positive".into(),
            ));
        }

        let mut a_eig = sym_eig(&a)?;
        let mu_max = a_eig.values[0].max(0.0);
        let psd_floor = -rel_tol * mu_max;
        let lowest = a_eig.values[n - 1];
        if lowest < psd_floor || (opts.strict_psd && lowest < 0.0) {
            return Err(Error::NotPositiveSemidefinite {
                what: "A",
                eigenvalue: lowest,
                tol: if opts.strict_psd { 0.0 } else { -psd_floor },
            });
        }
        for v in a_eig.values.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let rank_a = crate::linalg::numerical_rank(&a_eig.values, rel_tol);

        let b_svd = svd(&b)?;
        let sigma_max = b_svd.singular_values[0];
        let sigma_min = b_svd.singular_values[m - 1];
        if !(sigma_min > rel_tol * sigma_max) {
            return Err(Error::RankDeficientB {
                sigma_min,
                sigma_max,
            });
        }

        let k = assemble_saddle(&a, &b);
        let k_eig = sym_eig(&k)?;
        let k_norm = k_eig.values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let smallest = k_eig.values.iter().fold(f64::INFINITY, |acc, v| acc.min(v.abs()));
        let threshold = rel_tol * k_norm;
        if smallest <= threshold {
            return Err(Error::SingularK {
                smallest,
                threshold,
            });
        }

        Ok(Self {
            a,
            b,
            rel_tol,
            angle_tol: opts.angle_tol,
            a_eig,
            b_svd,
            rank_a,
        })
    }

    pub fn n(&self) -> usize {
        self.a.order()
    }

    pub fn m(&self) -> usize {
        self.b.rows()
    }

    pub fn a(&self) -> &SymmetricMatrix {
        &self.a
    }

    pub fn b(&self) -> &RectMatrix {
        &self.b
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn angle_tol(&self) -> f64 {
        self.angle_tol
    }

    /// Eigendecomposition of `A` with negatives clamped to zero.
    pub fn a_eigen(&self) -> &EigDecomposition {
        &self.a_eig
    }

    pub fn b_svd(&self) -> &SvdDecomposition {
        &self.b_svd
    }

    pub fn rank_a(&self) -> usize {
        self.rank_a
    }

    pub fn nullity_a(&self) -> usize {
        self.n() - self.rank_a
    }

    /// `rank(A) = n - m`.
    pub fn is_lowest_rank(&self) -> bool {
        self.rank_a == self.n() - self.m()
    }

    /// Eigenvectors of the `k` largest eigenvalues of `A`.
    pub fn leading_eigvecs(&self, k: usize) -> SubspaceBasis {
        SubspaceBasis::from_parts(
            self.a_eig.vectors.columns(0, k).into_owned(),
            SubspaceKind::Range,
            self.rel_tol,
        )
    }

    pub fn range_a(&self) -> SubspaceBasis {
        self.leading_eigvecs(self.rank_a)
    }

    pub fn kernel_a(&self) -> SubspaceBasis {
        let n = self.n();
        SubspaceBasis::from_parts(
            self.a_eig.vectors.columns(self.rank_a, n - self.rank_a).into_owned(),
            SubspaceKind::Kernel,
            self.rel_tol,
        )
    }

    /// `range(B^T)`, the right singular vectors of `B`.
    pub fn range_bt(&self) -> SubspaceBasis {
        SubspaceBasis::from_parts(self.b_svd.right.clone(), SubspaceKind::Range, self.rel_tol)
    }

    pub fn kernel_b(&self) -> Result<SubspaceBasis> {
        crate::linalg::kernel_basis_rect(&self.b, self.rel_tol)
    }

    /// `K = [[A, B^T], [B, 0]]`.
    pub fn assemble_k(&self) -> SymmetricMatrix {
        assemble_saddle(&self.a, &self.b)
    }
}

pub(crate) fn assemble_saddle(a: &SymmetricMatrix, b: &RectMatrix) -> SymmetricMatrix {
    let n = a.order();
    let m = b.rows();
    let mut k = DMatrix::zeros(n + m, n + m);
    k.view_mut((0, 0), (n, n)).copy_from(a.as_matrix());
    k.view_mut((n, 0), (m, n)).copy_from(b.as_matrix());
    k.view_mut((0, n), (n, m)).copy_from(&b.as_matrix().transpose());
    SymmetricMatrix::symmetrized(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(b1: f64, b2: f64) -> Result<SaddleProblem> {
        SaddleProblem::new(
            SymmetricMatrix::from_diagonal(&[1.0, 0.0]).unwrap(),
            RectMatrix::from_row_slice(1, 2, &[b1, b2]).unwrap(),
        )
    }

    #[test]
    fn toy_is_valid_and_lowest_rank() {
        let p = toy(0.6, 0.8).unwrap();
        assert_eq!((p.n(), p.m(), p.rank_a(), p.nullity_a()), (2, 1, 1, 1));
        assert!(p.is_lowest_rank());
        let k = p.assemble_k();
        let expect = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.6, 0.0, 0.0, 0.8, 0.6, 0.8, 0.0]);
        assert_eq!(k.as_matrix(), &expect);
    }

    #[test]
    fn singular_k_rejected() {
        assert!(matches!(toy(1.0, 0.0), Err(Error::SingularK { .. })));
    }

    #[test]
    fn structural_errors() {
        let a = SymmetricMatrix::from_diagonal(&[1.0, -1.0]).unwrap();
        let b = RectMatrix::from_row_slice(1, 2, &[0.6, 0.8]).unwrap();
        assert!(matches!(
            SaddleProblem::new(a, b.clone()),
            Err(Error::NotPositiveSemidefinite { .. })
        ));

        let a3 = SymmetricMatrix::identity(3);
        let zero_row = RectMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            SaddleProblem::new(a3, zero_row),
            Err(Error::RankDeficientB { .. })
        ));

        let square = RectMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(
            SaddleProblem::new(SymmetricMatrix::identity(2), square),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn tiny_negative_eigenvalue_clamped_or_rejected() {
        let a = SymmetricMatrix::from_diagonal(&[1.0, -1e-17]).unwrap();
        let b = RectMatrix::from_row_slice(1, 2, &[0.6, 0.8]).unwrap();
        let p = SaddleProblem::new(a.clone(), b.clone()).unwrap();
        assert_eq!(p.a_eigen().values, vec![1.0, 0.0]);
        assert_eq!(p.a().as_matrix()[(1, 1)], -1e-17);
        let strict = ProblemOptions {
            strict_psd: true,
            ..Default::default()
        };
        assert!(SaddleProblem::with_options(a, b, strict).is_err());
    }
}
