//! Eigenvalue bounds for saddle-point matrices.
//!
//! Every lower bound here targets the smallest positive eigenvalue of
//! `K = [[A, B^T], [B, 0]]`. The augmentation bounds start from
//! `K(W) = [[A + B^T W B, B^T], [B, 0]]` and use the fact that
//! `K^{-1} <= blockdiag(A_W^{-1}, W)` in the Loewner order; the angle bounds
//! then estimate `mu_min(A + gamma B^T B)` through the smallest principal
//! angle between `range(A)` and `range(B^T)`.

mod problem;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    one_minus_cos, principal_angles, sym_eig, PrincipalAngles, SubspaceBasis, SymmetricMatrix,
};

pub use problem::{ProblemOptions, SaddleProblem, DEFAULT_ANGLE_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SpectralSummary {
    pub mu_max: f64,
    pub mu_min: f64,
    pub mu_min_plus: f64,
    pub sigma_max: f64,
    pub sigma_min: f64,
    pub rank_a: usize,
    pub nullity_a: usize,
    /// Rows of `B`.
    pub m: usize,
    pub rel_tol: f64,
}

pub fn spectral_summary(p: &SaddleProblem) -> SpectralSummary {
    let values = &p.a_eigen().values;
    let n = p.n();
    let rank = p.rank_a();
    let sv = &p.b_svd().singular_values;
    SpectralSummary {
        mu_max: values[0],
        mu_min: if rank < n { 0.0 } else { values[n - 1] },
        mu_min_plus: values[rank - 1],
        sigma_max: sv[0],
        sigma_min: sv[sv.len() - 1],
        rank_a: rank,
        nullity_a: n - rank,
        m: p.m(),
        rel_tol: p.rel_tol(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    RustenWinther,
    Wbound,
    Agamma,
    LowestRank,
    KernelAngle,
    GeneralRank,
}

impl BoundKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundKind::RustenWinther => "rusten-winther",
            BoundKind::Wbound => "wbound",
            BoundKind::Agamma => "agamma",
            BoundKind::LowestRank => "lowest-rank",
            BoundKind::KernelAngle => "kernel-angle",
            BoundKind::GeneralRank => "general-rank",
        }
    }
}

/// Serialized as a bare number or as `{"negative": [lo, hi], "positive": [lo, hi]}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoundValue {
    /// Lower bound on the positive eigenvalues of `K`.
    Lower(f64),
    /// Inclusion intervals `I- u I+` for the whole spectrum.
    Intervals {
        negative: (f64, f64),
        positive: (f64, f64),
    },
}

impl BoundValue {
    /// The lower bound on positive eigenvalues carried by this value.
    pub fn positive_lower(&self) -> f64 {
        match *self {
            BoundValue::Lower(v) => v,
            BoundValue::Intervals { positive, .. } => positive.0,
        }
    }
}

/// Which argument of the two-term minimum determined the bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActiveTerm {
    /// `mu * (1 - cos theta)` (or `rho * mu_min^+` for the `A_gamma` bound).
    Eigenvalue,
    /// `sigma_min * sqrt(1 - cos theta)` (or `rho * gamma * sigma_min^2`).
    SingularValue,
    /// `mu_min(A_W)`.
    AugmentedBlock,
    /// `1 / mu_max(W)`.
    InverseWeight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Warning {
    /// The `I+` lower endpoint is `mu_min(A) = 0`.
    VacuousLowerEndpoint,
    /// Minimum principal angle within `angle_tol`; the angle bound is zero.
    ZeroAngle,
    /// Eigenvalues `n-m` and `n-m+1` of `A` tie; the split is not unique.
    DegenerateSplit,
    /// `--auto-gamma` on a problem that is not lowest rank.
    FallbackToGeneralRank,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BoundInputs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_min: Option<f64>,
    /// Eigenvalue of `A` entering the angle bound (`mu_min^+` or `mu_{n-m}`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu_min_augmented: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu_max_weight: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AssumptionFlags {
    pub lowest_rank: bool,
    pub rank_at_least_n_minus_m: bool,
}

impl AssumptionFlags {
    fn of(p: &SaddleProblem) -> Self {
        Self {
            lowest_rank: p.is_lowest_rank(),
            rank_at_least_n_minus_m: p.rank_a() >= p.n() - p.m(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BoundReport {
    pub name: BoundKind,
    pub value: BoundValue,
    pub inputs: BoundInputs,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub active: Option<ActiveTerm>,
    pub assumptions: AssumptionFlags,
    pub assumptions_met: bool,
    pub warnings: Vec<Warning>,
}

impl BoundReport {
    pub fn lower_bound(&self) -> f64 {
        self.value.positive_lower()
    }

    pub fn has_warning(&self, w: Warning) -> bool {
        self.warnings.contains(&w)
    }
}

/// Inclusion intervals for the spectrum of `K` from the extreme eigenvalues
/// of `A` and singular values of `B`.
pub fn rusten_winther(s: &SpectralSummary) -> BoundReport {
    let half = |x: f64| 0.5 * x;
    let neg_lo = half(s.mu_min - (s.mu_min * s.mu_min + 4.0 * s.sigma_max * s.sigma_max).sqrt());
    let neg_hi = half(s.mu_max - (s.mu_max * s.mu_max + 4.0 * s.sigma_min * s.sigma_min).sqrt());
    let pos_lo = s.mu_min;
    let pos_hi = half(s.mu_max + (s.mu_max * s.mu_max + 4.0 * s.sigma_max * s.sigma_max).sqrt());
    let mut warnings = Vec::new();
    if pos_lo <= 0.0 {
        warnings.push(Warning::VacuousLowerEndpoint);
    }
    BoundReport {
        name: BoundKind::RustenWinther,
        value: BoundValue::Intervals {
            negative: (neg_lo, neg_hi),
            positive: (pos_lo, pos_hi),
        },
        inputs: BoundInputs {
            mu: Some(s.mu_min),
            sigma_min: Some(s.sigma_min),
            ..Default::default()
        },
        active: None,
        assumptions: AssumptionFlags {
            lowest_rank: s.nullity_a == s.m,
            rank_at_least_n_minus_m: s.nullity_a <= s.m,
        },
        assumptions_met: true,
        warnings,
    }
}

/// The weight in `A + B^T W B`: either `gamma * I` or a full symmetric
/// positive semidefinite `m x m` matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightMatrix {
    Scalar(f64),
    Full(SymmetricMatrix),
}

impl WeightMatrix {
    /// Checks dimensions and semidefiniteness; returns `mu_max(W)`.
    fn validate(&self, m: usize, rel_tol: f64) -> Result<f64> {
        match self {
            WeightMatrix::Scalar(g) => {
                if !g.is_finite() || *g < 0.0 {
                    return Err(Error::ParameterOutOfRange(format!(
                        "gamma must be finite and nonnegative, got {g}"
                    )));
                }
                Ok(*g)
            }
            WeightMatrix::Full(w) => {
                if w.order() != m {
                    return Err(Error::DimensionMismatch(format!(
                        "W is {0}x{0} but B has {m} rows",
                        w.order()
                    )));
                }
                let eig = sym_eig(w)?;
                let top = eig.values[0].max(0.0);
                let low = eig.values[m - 1];
                if low < -rel_tol * top {
                    return Err(Error::NotPositiveSemidefinite {
                        what: "W",
                        eigenvalue: low,
                        tol: rel_tol * top,
                    });
                }
                Ok(top)
            }
        }
    }

    pub fn gamma(&self) -> Option<f64> {
        match self {
            WeightMatrix::Scalar(g) => Some(*g),
            WeightMatrix::Full(_) => None,
        }
    }
}

/// `A_W = A + B^T W B`.
pub fn assemble_augmented(p: &SaddleProblem, w: &WeightMatrix) -> Result<SymmetricMatrix> {
    let a = p.a().as_matrix();
    let b = p.b().as_matrix();
    let aw = match w {
        WeightMatrix::Scalar(g) => a + b.tr_mul(b) * *g,
        WeightMatrix::Full(wm) => {
            if wm.order() != p.m() {
                return Err(Error::DimensionMismatch(format!(
                    "W is {0}x{0} but B has {1} rows",
                    wm.order(),
                    p.m()
                )));
            }
            a + b.transpose() * wm.as_matrix() * b
        }
    };
    Ok(SymmetricMatrix::symmetrized(aw))
}

/// `mu_min(A + gamma B^T B)` by dense eigensolve.
pub fn mu_min_augmented(p: &SaddleProblem, gamma: f64) -> Result<f64> {
    let ag = assemble_augmented(p, &WeightMatrix::Scalar(gamma))?;
    let eig = sym_eig(&ag)?;
    Ok(*eig.values.last().expect("nonempty"))
}

/// `min{mu_min(A_W), 1 / mu_max(W)}`, with `1/0 = +inf`.
pub fn wbound(p: &SaddleProblem, w: &WeightMatrix) -> Result<BoundReport> {
    let w_top = w.validate(p.m(), p.rel_tol())?;
    let aw = assemble_augmented(p, w)?;
    let eig = sym_eig(&aw)?;
    let mu_top = eig.values[0];
    let mu_low = *eig.values.last().expect("nonempty");
    let threshold = p.rel_tol() * mu_top;
    if !(mu_low > threshold) {
        return Err(Error::AugmentedBlockSingular {
            mu_min: mu_low,
            threshold,
        });
    }
    let inv_weight = if w_top > 0.0 { 1.0 / w_top } else { f64::INFINITY };
    let (value, active) = if mu_low <= inv_weight {
        (mu_low, ActiveTerm::AugmentedBlock)
    } else {
        (inv_weight, ActiveTerm::InverseWeight)
    };
    Ok(BoundReport {
        name: BoundKind::Wbound,
        value: BoundValue::Lower(value),
        inputs: BoundInputs {
            gamma: w.gamma(),
            mu_min_augmented: Some(mu_low),
            mu_max_weight: Some(w_top),
            ..Default::default()
        },
        active: Some(active),
        assumptions: AssumptionFlags::of(p),
        assumptions_met: true,
        warnings: Vec::new(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RhoAngle {
    /// `1 - cos(theta_min)`.
    pub rho: f64,
    pub theta_min: f64,
    /// Whether `rank(A) = n - m`; `rho` only carries its meaning then.
    pub lowest_rank: bool,
}

/// `rho = 1 - cos(theta_min)` for the angle between `range(A)` and
/// `range(B^T)`.
pub fn rho_from_angles(p: &SaddleProblem) -> Result<RhoAngle> {
    let pa = principal_angles(&p.range_a(), &p.range_bt())?;
    Ok(RhoAngle {
        rho: pa.rho(),
        theta_min: pa.theta_min(),
        lowest_rank: p.is_lowest_rank(),
    })
}

fn require_lowest_rank(p: &SaddleProblem) -> Result<()> {
    if p.is_lowest_rank() {
        Ok(())
    } else {
        Err(Error::RankAssumptionViolated {
            expected: p.n() - p.m(),
            found: p.rank_a(),
        })
    }
}

fn sigma_min(p: &SaddleProblem) -> f64 {
    *p.b_svd().singular_values.last().expect("m >= 1")
}

/// `rho * min{mu_min^+, gamma * sigma_min^2}`, a lower bound on
/// `mu_min(A + gamma B^T B)` when `rank(A) = n - m`.
pub fn agamma_lower_bound(p: &SaddleProblem, gamma: f64) -> Result<f64> {
    require_lowest_rank(p)?;
    let (value, _) = agamma_terms(p, gamma)?;
    Ok(value)
}

fn agamma_terms(p: &SaddleProblem, gamma: f64) -> Result<(f64, ActiveTerm)> {
    let rho = rho_from_angles(p)?.rho;
    let mu_plus = p.a_eigen().values[p.rank_a() - 1];
    let s = sigma_min(p);
    let sing = gamma * s * s;
    Ok(if mu_plus <= sing {
        (rho * mu_plus, ActiveTerm::Eigenvalue)
    } else {
        (rho * sing, ActiveTerm::SingularValue)
    })
}

/// `min{1/gamma, rho * min{mu_min^+, gamma sigma_min^2}}`: the augmentation
/// bound for `W = gamma I` with `mu_min(A_gamma)` replaced by its angle
/// estimate, so no augmented matrix is formed.
pub fn agamma_bound(p: &SaddleProblem, gamma: f64) -> Result<BoundReport> {
    require_lowest_rank(p)?;
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::ParameterOutOfRange(format!(
            "gamma must be positive and finite, got {gamma}"
        )));
    }
    let ra = rho_from_angles(p)?;
    let (estimate, term) = agamma_terms(p, gamma)?;
    let inv = 1.0 / gamma;
    let (value, active) = if estimate <= inv {
        (estimate, term)
    } else {
        (inv, ActiveTerm::InverseWeight)
    };
    Ok(BoundReport {
        name: BoundKind::Agamma,
        value: BoundValue::Lower(value),
        inputs: BoundInputs {
            gamma: Some(gamma),
            rho: Some(ra.rho),
            theta_min: Some(ra.theta_min),
            mu: Some(p.a_eigen().values[p.rank_a() - 1]),
            sigma_min: Some(sigma_min(p)),
            mu_min_augmented: Some(estimate),
            ..Default::default()
        },
        active: Some(active),
        assumptions: AssumptionFlags::of(p),
        assumptions_met: true,
        warnings: Vec::new(),
    })
}

/// `gamma` solving `1/gamma = min{mu_min^+ rho, sigma_min sqrt(rho)}`.
pub fn optimal_gamma(p: &SaddleProblem) -> Result<f64> {
    require_lowest_rank(p)?;
    let ra = rho_from_angles(p)?;
    if ra.theta_min <= p.angle_tol() {
        return Err(Error::ZeroAngle {
            theta: ra.theta_min,
            tol: p.angle_tol(),
        });
    }
    let mu_plus = p.a_eigen().values[p.rank_a() - 1];
    Ok(1.0 / angle_terms(mu_plus, sigma_min(p), ra.rho).0)
}

/// `min{mu rho, sigma sqrt(rho)}` and the active argument.
fn angle_terms(mu: f64, sigma: f64, rho: f64) -> (f64, ActiveTerm) {
    let eig_term = mu * rho;
    let sv_term = sigma * rho.sqrt();
    if eig_term <= sv_term {
        (eig_term, ActiveTerm::Eigenvalue)
    } else {
        (sv_term, ActiveTerm::SingularValue)
    }
}

fn angle_report(
    p: &SaddleProblem,
    kind: BoundKind,
    mu: f64,
    angles: &PrincipalAngles,
    assumptions_met: bool,
    mut warnings: Vec<Warning>,
) -> BoundReport {
    let theta = angles.theta_min();
    let rho = angles.rho();
    let s = sigma_min(p);
    let (mut value, active) = angle_terms(mu, s, rho);
    if theta <= p.angle_tol() {
        value = 0.0;
        warnings.push(Warning::ZeroAngle);
    }
    BoundReport {
        name: kind,
        value: BoundValue::Lower(value),
        inputs: BoundInputs {
            gamma: if value > 0.0 { Some(1.0 / value) } else { None },
            rho: Some(rho),
            theta_min: Some(theta),
            mu: Some(mu),
            sigma_min: Some(s),
            ..Default::default()
        },
        active: Some(active),
        assumptions: AssumptionFlags::of(p),
        assumptions_met,
        warnings,
    }
}

/// Lower bound for lowest-rank `A` from the angle between `range(A)` and
/// `range(B^T)`.
pub fn lowest_rank_bound(p: &SaddleProblem) -> Result<BoundReport> {
    require_lowest_rank(p)?;
    let k = p.n() - p.m();
    let angles = principal_angles(&p.leading_eigvecs(k), &p.range_bt())?;
    let mu = p.a_eigen().values[k - 1];
    Ok(angle_report(p, BoundKind::LowestRank, mu, &angles, true, Vec::new()))
}

/// Same bound measured through `ker(A)` and `ker(B)`.
pub fn kernel_angle_bound(p: &SaddleProblem) -> Result<BoundReport> {
    require_lowest_rank(p)?;
    let angles = principal_angles(&p.kernel_a(), &p.kernel_b()?)?;
    let mu = p.a_eigen().values[p.rank_a() - 1];
    Ok(angle_report(p, BoundKind::KernelAngle, mu, &angles, true, Vec::new()))
}

/// `A = A_max + A_min`, the parts of `A` carried by its `n - m` largest and
/// `m` smallest eigenpairs.
#[derive(Debug, Clone)]
pub struct SpectralSplit {
    pub a_max: SymmetricMatrix,
    pub a_min: SymmetricMatrix,
    /// `mu_{n-m}`, the smallest kept eigenvalue.
    pub mu_kept_min: f64,
    /// Eigenvalues `n-m` and `n-m+1` tie within tolerance.
    pub degenerate: bool,
}

pub fn spectral_split(a: &SymmetricMatrix, m: usize, rel_tol: f64) -> Result<SpectralSplit> {
    let n = a.order();
    if m == 0 || m >= n {
        return Err(Error::DimensionMismatch(format!(
            "split needs 0 < m < n, got n = {n}, m = {m}"
        )));
    }
    let mut eig = sym_eig(a)?;
    let top = eig.values[0].max(0.0);
    let low = eig.values[n - 1];
    if low < -rel_tol * top {
        return Err(Error::NotPositiveSemidefinite {
            what: "A",
            eigenvalue: low,
            tol: rel_tol * top,
        });
    }
    for v in eig.values.iter_mut() {
        *v = v.max(0.0);
    }
    Ok(split_from_eig(&eig.values, &eig.vectors, n - m, rel_tol))
}

fn split_from_eig(values: &[f64], vectors: &DMatrix<f64>, keep: usize, rel_tol: f64) -> SpectralSplit {
    let n = values.len();
    let part = |start: usize, len: usize| {
        let u = vectors.columns(start, len);
        let mut scaled = u.clone_owned();
        for j in 0..len {
            scaled.column_mut(j).scale_mut(values[start + j]);
        }
        SymmetricMatrix::symmetrized(&scaled * u.transpose())
    };
    let top = values[0].max(0.0);
    SpectralSplit {
        a_max: part(0, keep),
        a_min: part(keep, n - keep),
        mu_kept_min: values[keep - 1],
        degenerate: (values[keep - 1] - values[keep]).abs() <= rel_tol * top,
    }
}

/// Lower bound for `rank(A) >= n - m`, obtained by dropping the `m` smallest
/// eigenpairs of `A` and applying the lowest-rank bound to what is left.
pub fn general_rank_bound(p: &SaddleProblem) -> Result<BoundReport> {
    let keep = p.n() - p.m();
    if p.rank_a() < keep {
        return Err(Error::RankTooLow {
            required: keep,
            found: p.rank_a(),
        });
    }
    let values = &p.a_eigen().values;
    let mu_keep = values[keep - 1];
    let mut warnings = Vec::new();
    if (mu_keep - values[keep]).abs() <= p.rel_tol() * values[0] {
        warnings.push(Warning::DegenerateSplit);
    }
    let angles = principal_angles(&p.leading_eigvecs(keep), &p.range_bt())?;
    Ok(angle_report(p, BoundKind::GeneralRank, mu_keep, &angles, true, warnings))
}

/// Spectral split of a validated problem's `A`, reusing its cached
/// eigendecomposition.
pub fn problem_split(p: &SaddleProblem) -> SpectralSplit {
    let eig = p.a_eigen();
    split_from_eig(&eig.values, &eig.vectors, p.n() - p.m(), p.rel_tol())
}

/// Spectrum of `P^T P` for `P = [U V]`, `U` spanning `range(A)` and `V`
/// spanning `range(B^T)`, next to the spectrum predicted from the principal
/// angles between them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GramStructure {
    /// Computed eigenvalues of `P^T P`, descending.
    pub eigenvalues: Vec<f64>,
    /// `{1}^{|n-2m|} u {1 +- cos theta_i}`, descending.
    pub predicted: Vec<f64>,
    pub max_deviation: f64,
    /// `||P^{-1}||^{-2} = mu_min(P^T P)`.
    pub inv_norm_sq_recip: f64,
    /// `1 - cos(theta_min)`.
    pub rho: f64,
}

pub fn gram_structure(p: &SaddleProblem) -> Result<GramStructure> {
    require_lowest_rank(p)?;
    let u = p.range_a();
    let v = p.range_bt();
    let pm = concat_columns(&u, &v);
    let gram = SymmetricMatrix::symmetrized(pm.tr_mul(&pm));
    let eigenvalues = sym_eig(&gram)?.values;

    let angles = principal_angles(&u, &v)?;
    let k = angles.len();
    let mut predicted = Vec::with_capacity(p.n());
    predicted.extend(std::iter::repeat_n(1.0, p.n() - 2 * k));
    for &t in &angles.angles {
        predicted.push(1.0 + t.cos());
        predicted.push(one_minus_cos(t));
    }
    predicted.sort_by(|a, b| b.total_cmp(a));

    let max_deviation = eigenvalues
        .iter()
        .zip(&predicted)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(GramStructure {
        inv_norm_sq_recip: *eigenvalues.last().expect("nonempty"),
        eigenvalues,
        predicted,
        max_deviation,
        rho: angles.rho(),
    })
}

fn concat_columns(x: &SubspaceBasis, y: &SubspaceBasis) -> DMatrix<f64> {
    let n = x.ambient_dim();
    let mut out = DMatrix::zeros(n, x.dim() + y.dim());
    out.columns_mut(0, x.dim()).copy_from(x.columns());
    out.columns_mut(x.dim(), y.dim()).copy_from(y.columns());
    out
}

/// Every bound that applies to `p`, in a fixed order. `gamma` adds the
/// `W = gamma I` augmentation bounds.
pub fn all_bounds(p: &SaddleProblem, gamma: Option<f64>) -> Result<Vec<BoundReport>> {
    let mut out = vec![rusten_winther(&spectral_summary(p))];
    if let Some(g) = gamma {
        match wbound(p, &WeightMatrix::Scalar(g)) {
            Ok(r) => out.push(r),
            Err(Error::AugmentedBlockSingular { .. }) => {}
            Err(e) => return Err(e),
        }
        if p.is_lowest_rank() {
            out.push(agamma_bound(p, g)?);
        }
    }
    if p.is_lowest_rank() {
        out.push(lowest_rank_bound(p)?);
        out.push(kernel_angle_bound(p)?);
    }
    out.push(general_rank_bound(p)?);
    Ok(out)
}

/// [`all_bounds`] at `gamma = optimal_gamma(p)` for lowest-rank problems.
/// Otherwise (or when the angle is zero) no augmentation weight is used and
/// the general-rank report carries [`Warning::FallbackToGeneralRank`].
pub fn all_bounds_auto(p: &SaddleProblem) -> Result<(Option<f64>, Vec<BoundReport>)> {
    if p.is_lowest_rank() {
        match optimal_gamma(p) {
            Ok(g) => return Ok((Some(g), all_bounds(p, Some(g))?)),
            Err(Error::ZeroAngle { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    let mut out = all_bounds(p, None)?;
    for r in out.iter_mut().filter(|r| r.name == BoundKind::GeneralRank) {
        r.warnings.push(Warning::FallbackToGeneralRank);
    }
    Ok((None, out))
}
