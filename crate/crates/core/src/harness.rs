//! Dense-oracle certification of bounds, the augmentation inverse identity,
//! and the gamma sweep.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    all_bounds, assemble_augmented, gram_structure, mu_min_augmented, BoundKind, BoundReport, BoundValue,
    SaddleProblem, WeightMatrix,
};
use crate::error::{Error, Result};
use crate::linalg::{sym_eig, SymmetricMatrix};
use crate::problems::{corpus_candidates, GeneratorSpec};

pub const DEFAULT_SIZE_CAP: usize = 2000;
pub const DEFAULT_CERT_SLACK: f64 = 1e-8;
/// Condition number above which the inverse identity is not checked.
pub const DEFAULT_COND_CAP: f64 = 1e12;
pub const DEFAULT_GRID_MIN: f64 = 1e-4;
pub const DEFAULT_GRID_MAX: f64 = 1e4;
pub const DEFAULT_GRID_POINTS: usize = 25;
/// Weights used by the corpus-wide inverse identity check.
pub const IDENTITY_GAMMAS: [f64; 3] = [0.1, 1.0, 10.0];

pub fn assemble_k(p: &SaddleProblem) -> SymmetricMatrix {
    p.assemble_k()
}

/// Ground truth from a dense eigensolve of `K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OracleResult {
    /// All `n + m` eigenvalues, descending.
    pub all_eigs: Vec<f64>,
    pub mu_min_plus_k: f64,
    pub pos_count: usize,
    pub neg_count: usize,
    /// `|lambda|` below this counts as zero.
    pub zero_threshold: f64,
    /// `pos_count == n && neg_count == m`.
    pub inertia_ok: bool,
}

pub fn oracle(p: &SaddleProblem) -> Result<OracleResult> {
    oracle_with_cap(p, DEFAULT_SIZE_CAP)
}

pub fn oracle_with_cap(p: &SaddleProblem, cap: usize) -> Result<OracleResult> {
    let size = p.n() + p.m();
    if size > cap {
        return Err(Error::SizeCapExceeded { size, cap });
    }
    let eig = sym_eig(&p.assemble_k())?;
    let norm = eig.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let zero_threshold = p.rel_tol() * norm;
    let pos: Vec<f64> = eig.values.iter().copied().filter(|&v| v > zero_threshold).collect();
    let neg_count = eig.values.iter().filter(|&&v| v < -zero_threshold).count();
    let mu_min_plus_k = pos.last().copied().unwrap_or(f64::NAN);
    Ok(OracleResult {
        mu_min_plus_k,
        pos_count: pos.len(),
        neg_count,
        zero_threshold,
        inertia_ok: pos.len() == p.n() && neg_count == p.m(),
        all_eigs: eig.values,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertStatus {
    Sound,
    Violated,
    /// Sound but carries no information (`value <= 0`).
    Vacuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Certification {
    pub name: BoundKind,
    pub status: CertStatus,
    pub value: f64,
    pub actual: f64,
    /// `actual - value`.
    pub slack: f64,
}

impl Certification {
    pub fn is_sound(&self) -> bool {
        self.status != CertStatus::Violated
    }
}

pub fn certify(report: &BoundReport, o: &OracleResult) -> Certification {
    certify_with(report, o, DEFAULT_CERT_SLACK)
}

/// Sound iff `value <= actual + tol * max(1, actual)`.
pub fn certify_with(report: &BoundReport, o: &OracleResult, tol: f64) -> Certification {
    let value = report.lower_bound();
    let actual = o.mu_min_plus_k;
    let status = if !(value <= actual + tol * actual.max(1.0)) {
        CertStatus::Violated
    } else if value <= 0.0 {
        CertStatus::Vacuous
    } else {
        CertStatus::Sound
    };
    Certification {
        name: report.name,
        status,
        value,
        actual,
        slack: actual - value,
    }
}

/// Largest distance of an eigenvalue of `K` outside `I- u I+`; zero when
/// every eigenvalue is contained. `None` for non-interval reports.
pub fn interval_excess(report: &BoundReport, o: &OracleResult) -> Option<f64> {
    let BoundValue::Intervals { negative, positive } = report.value else {
        return None;
    };
    let dist = |x: f64, (lo, hi): (f64, f64)| {
        if x < lo {
            lo - x
        } else if x > hi {
            x - hi
        } else {
            0.0
        }
    };
    Some(
        o.all_eigs
            .iter()
            .map(|&x| dist(x, negative).min(dist(x, positive)))
            .fold(0.0, f64::max),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum InverseIdentity {
    #[serde(rename_all = "camelCase")]
    Checked {
        /// `||K^-1 - K(W)^-1 - blockdiag(0, W)||_F / max(1, ||K^-1||_F)`.
        residual: f64,
        /// Same normalization for the block form of `K^-1` built from
        /// `A_W^-1` and `S_W = B A_W^-1 B^T`; absent when `A_W` is not
        /// positive definite.
        schur_residual: Option<f64>,
        cond: f64,
    },
    Skipped {
        cond: f64,
    },
}

impl InverseIdentity {
    pub fn max_residual(&self) -> Option<f64> {
        match *self {
            InverseIdentity::Checked {
                residual,
                schur_residual,
                ..
            } => Some(residual.max(schur_residual.unwrap_or(0.0))),
            InverseIdentity::Skipped { .. } => None,
        }
    }
}

fn condition(m: &SymmetricMatrix) -> Result<f64> {
    let eig = sym_eig(m)?;
    let (lo, hi) = eig
        .values
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v.abs()), hi.max(v.abs())));
    Ok(if lo > 0.0 { hi / lo } else { f64::INFINITY })
}

/// Checks `K^-1 = K(W)^-1 + blockdiag(0, W)` and the Schur-complement block
/// form of `K^-1` with dense inverses. Skipped when `K` or `K(W)` has
/// condition number above `cond_cap`.
pub fn inverse_identity_residual(p: &SaddleProblem, w: &WeightMatrix, cond_cap: f64) -> Result<InverseIdentity> {
    let (n, m) = (p.n(), p.m());
    let aw = assemble_augmented(p, w)?;
    let k = p.assemble_k();
    let mut kw = k.as_matrix().clone();
    kw.view_mut((0, 0), (n, n)).copy_from(aw.as_matrix());
    let kw = SymmetricMatrix::symmetrized(kw);

    let cond_kw = condition(&kw)?;
    if !cond_kw.is_finite() {
        return Err(Error::SingularAugmented);
    }
    let cond = condition(&k)?.max(cond_kw);
    if cond > cond_cap {
        return Ok(InverseIdentity::Skipped { cond });
    }

    let k_inv = k.as_matrix().clone().try_inverse().ok_or(Error::SingularK {
        smallest: 0.0,
        threshold: 0.0,
    })?;
    let kw_inv = kw.as_matrix().clone().try_inverse().ok_or(Error::SingularAugmented)?;
    let w_mat = match w {
        WeightMatrix::Scalar(g) => DMatrix::identity(m, m) * *g,
        WeightMatrix::Full(wm) => wm.as_matrix().clone(),
    };
    let mut predicted = kw_inv;
    let mut corner = predicted.view_mut((n, n), (m, m));
    corner += &w_mat;
    let scale = k_inv.norm().max(1.0);
    let residual = (&k_inv - &predicted).norm() / scale;

    let schur_residual = aw.as_matrix().clone().cholesky().and_then(|chol| {
        let aw_inv = chol.inverse();
        let b = p.b().as_matrix();
        let aw_inv_bt = &aw_inv * b.transpose();
        let s = SymmetricMatrix::symmetrized(b * &aw_inv_bt);
        let s_inv = s.as_matrix().clone().cholesky()?.inverse();
        let top_right = &aw_inv_bt * &s_inv;
        let mut block = DMatrix::zeros(n + m, n + m);
        block
            .view_mut((0, 0), (n, n))
            .copy_from(&(&aw_inv - &top_right * aw_inv_bt.transpose()));
        block.view_mut((0, n), (n, m)).copy_from(&top_right);
        block.view_mut((n, 0), (m, n)).copy_from(&top_right.transpose());
        block.view_mut((n, n), (m, m)).copy_from(&(&w_mat - &s_inv));
        Some((&k_inv - block).norm() / scale)
    });

    Ok(InverseIdentity::Checked {
        residual,
        schur_residual,
        cond,
    })
}

/// `points` log-spaced values from `min` to `max` inclusive.
pub fn log_grid(min: f64, max: f64, points: usize) -> Result<Vec<f64>> {
    if points == 0 || !(min > 0.0) || !max.is_finite() {
        return Err(Error::ParameterOutOfRange(format!(
            "gamma grid needs points > 0 and 0 < min, got min = {min}, max = {max}, points = {points}"
        )));
    }
    if points == 1 {
        return Ok(vec![min]);
    }
    if !(min < max) {
        return Err(Error::ParameterOutOfRange(format!(
            "gamma grid needs min < max, got {min} >= {max}"
        )));
    }
    let (lo, hi) = (min.log10(), max.log10());
    let step = (hi - lo) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| match i {
            0 => min,
            i if i == points - 1 => max,
            i => 10f64.powf(lo + step * i as f64),
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepRow {
    pub gamma: f64,
    pub inv_gamma: f64,
    pub mu_min_a_gamma: f64,
    /// `min{1/gamma, mu_min(A_gamma)}`.
    pub predicted_bound: f64,
    pub actual_min_pos_eig: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// First `i` where `1/gamma - mu_min(A_gamma)` changes sign between rows
    /// `i` and `i + 1`.
    pub crossing_index: Option<usize>,
}

pub const SWEEP_CSV_HEADER: &str = "gamma,inv_gamma,mu_min_A_gamma,predicted_bound,actual_min_pos_eig";

impl SweepResult {
    /// Index of the largest predicted bound (first on ties).
    pub fn argmax_predicted(&self) -> usize {
        let mut best = 0;
        for (i, r) in self.rows.iter().enumerate() {
            if r.predicted_bound > self.rows[best].predicted_bound {
                best = i;
            }
        }
        best
    }

    pub fn mu_min_nondecreasing(&self, tol: f64) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].mu_min_a_gamma >= w[0].mu_min_a_gamma - tol * w[0].mu_min_a_gamma.abs().max(1.0))
    }

    /// Every predicted bound is at most the actual eigenvalue.
    pub fn dominated(&self, tol: f64) -> bool {
        self.rows
            .iter()
            .all(|r| r.predicted_bound <= r.actual_min_pos_eig + tol * r.actual_min_pos_eig.max(1.0))
    }

    /// The bound maximizer sits within one grid index of the crossing.
    pub fn maximizer_at_crossing(&self) -> bool {
        match self.crossing_index {
            Some(c) => self.argmax_predicted().abs_diff(c) <= 1,
            None => false,
        }
    }

    /// Rows as CSV, 17 significant digits per value.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(96 * (self.rows.len() + 1));
        out.push_str(SWEEP_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                r.gamma, r.inv_gamma, r.mu_min_a_gamma, r.predicted_bound, r.actual_min_pos_eig
            ));
        }
        out
    }
}

fn sweep_row(p: &SaddleProblem, gamma: f64, actual: f64) -> Result<SweepRow> {
    let mu = mu_min_augmented(p, gamma)?;
    let inv = 1.0 / gamma;
    Ok(SweepRow {
        gamma,
        inv_gamma: inv,
        mu_min_a_gamma: mu,
        predicted_bound: inv.min(mu),
        actual_min_pos_eig: actual,
    })
}

/// Evaluates `min{1/gamma, mu_min(A_gamma)}` on a strictly increasing grid,
/// next to the oracle's `mu_min^+(K)`. Rows are computed independently (in
/// parallel with the `parallel` feature) and kept in grid order.
pub fn gamma_sweep(p: &SaddleProblem, grid: &[f64]) -> Result<SweepResult> {
    if grid.is_empty() {
        return Err(Error::ParameterOutOfRange("gamma grid is empty".into()));
    }
    if grid.iter().any(|g| !(*g > 0.0 && g.is_finite())) || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::ParameterOutOfRange(
            "gamma grid must be positive and strictly increasing".into(),
        ));
    }
    let actual = oracle(p)?.mu_min_plus_k;

    #[cfg(feature = "parallel")]
    let rows: Result<Vec<SweepRow>> = {
        use rayon::prelude::*;
        grid.par_iter().map(|&g| sweep_row(p, g, actual)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Result<Vec<SweepRow>> = grid.iter().map(|&g| sweep_row(p, g, actual)).collect();
    let rows = rows?;

    let gap: Vec<f64> = rows.iter().map(|r| r.inv_gamma - r.mu_min_a_gamma).collect();
    let crossing_index = gap.windows(2).position(|w| (w[0] > 0.0) != (w[1] > 0.0));
    Ok(SweepResult { rows, crossing_index })
}

/// Smallest `mu_min^+(K)` admitted into the standard corpus.
pub const CORPUS_MIN_GAP: f64 = 3e-4;
/// Replacement rounds tried per corpus slot.
pub const CORPUS_ROUNDS: u64 = 16;

/// The standard corpus: slot by slot, the first candidate round whose
/// problem generates and has `mu_min^+(K) >= CORPUS_MIN_GAP`. Problems
/// closer to singular put the `1/gamma = mu_min(A_gamma)` crossing outside
/// the default grid.
pub fn standard_corpus() -> Result<Vec<GeneratorSpec>> {
    let rounds: Vec<Vec<GeneratorSpec>> = (0..CORPUS_ROUNDS).map(corpus_candidates).collect();
    let slots = rounds[0].len();
    let admit = |slot: usize| -> Result<GeneratorSpec> {
        let mut last = String::new();
        for round in &rounds {
            let spec = &round[slot];
            match spec.generate() {
                Ok(p) => {
                    let gap = oracle(&p)?.mu_min_plus_k;
                    if gap >= CORPUS_MIN_GAP {
                        return Ok(spec.clone());
                    }
                    last = format!("mu_min+(K) = {gap:e}");
                }
                Err(e) => last = e.to_string(),
            }
        }
        Err(Error::GenerationFailed {
            attempts: CORPUS_ROUNDS as usize,
            last,
        })
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..slots).into_par_iter().map(admit).collect()
    }
    #[cfg(not(feature = "parallel"))]
    (0..slots).map(admit).collect()
}

/// One named invariant checked by [`verify_problem`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub skipped: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: impl Into<String>, passed: bool, detail: String) -> Self {
        Self {
            name: name.into(),
            passed,
            skipped: false,
            detail,
        }
    }

    fn skipped(name: impl Into<String>, detail: String) -> Self {
        Self {
            name: name.into(),
            passed: true,
            skipped: true,
            detail,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VerifyConfig {
    /// Extra weight for the augmentation bounds and inverse identity.
    pub gamma: Option<f64>,
    pub cert_slack: f64,
    pub cond_cap: f64,
    pub size_cap: usize,
    /// Structural tolerance for the `P^T P` spectrum and kernel/range check.
    pub structure_tol: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            gamma: None,
            cert_slack: DEFAULT_CERT_SLACK,
            cond_cap: DEFAULT_COND_CAP,
            size_cap: DEFAULT_SIZE_CAP,
            structure_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VerifyReport {
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Runs inertia, interval containment, soundness of every applicable bound,
/// the inverse identity and (for lowest-rank problems) the `P^T P` structure
/// and kernel/range equivalence.
pub fn verify_problem(p: &SaddleProblem, cfg: &VerifyConfig) -> Result<VerifyReport> {
    let o = oracle_with_cap(p, cfg.size_cap)?;
    let mut checks = Vec::new();

    checks.push(CheckOutcome::new(
        "inertia",
        o.inertia_ok,
        format!("{} positive, {} negative (n = {}, m = {})", o.pos_count, o.neg_count, p.n(), p.m()),
    ));

    let reports = all_bounds(p, cfg.gamma)?;
    for r in &reports {
        if let Some(excess) = interval_excess(r, &o) {
            checks.push(CheckOutcome::new(
                "containment",
                excess <= cfg.cert_slack,
                format!("largest excess {excess:e}"),
            ));
        }
        if r.assumptions_met {
            let c = certify_with(r, &o, cfg.cert_slack);
            checks.push(CheckOutcome::new(
                format!("soundness:{}", r.name.as_str()),
                c.is_sound(),
                format!("bound {:e} vs mu_min+(K) {:e}, slack {:e}", c.value, c.actual, c.slack),
            ));
        }
    }

    let gammas: Vec<f64> = match cfg.gamma {
        Some(g) => vec![g],
        None => IDENTITY_GAMMAS.to_vec(),
    };
    for g in gammas {
        let name = format!("inverse-identity:gamma={g}");
        match inverse_identity_residual(p, &WeightMatrix::Scalar(g), cfg.cond_cap)? {
            InverseIdentity::Skipped { cond } => {
                checks.push(CheckOutcome::skipped(name, format!("cond {cond:e} above cap")))
            }
            check => {
                let res = check.max_residual().unwrap_or(0.0);
                checks.push(CheckOutcome::new(name, res <= cfg.structure_tol, format!("residual {res:e}")));
            }
        }
    }

    if p.is_lowest_rank() {
        let gs = gram_structure(p)?;
        let inv_dev = (gs.inv_norm_sq_recip - gs.rho).abs();
        checks.push(CheckOutcome::new(
            "gram-structure",
            gs.max_deviation <= cfg.structure_tol && inv_dev <= cfg.structure_tol,
            format!("spectrum deviation {:e}, ||P^-1||^-2 deviation {inv_dev:e}", gs.max_deviation),
        ));
        let lr = reports.iter().find(|r| r.name == BoundKind::LowestRank);
        let ka = reports.iter().find(|r| r.name == BoundKind::KernelAngle);
        if let (Some(lr), Some(ka)) = (lr, ka) {
            let (a, b) = (lr.lower_bound(), ka.lower_bound());
            let diff = (a - b).abs();
            checks.push(CheckOutcome::new(
                "kernel-range-equivalence",
                diff <= cfg.structure_tol * a.abs().max(1.0),
                format!("difference {diff:e}"),
            ));
        }
    }

    Ok(VerifyReport { checks })
}
