//! Seeded generators: the two worked examples (the 2x2 toy with a rank-one
//! leading block and the 3x3 counterexample for the spectral split) plus
//! synthetic families with controlled rank and principal angles.

use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::bounds::{ProblemOptions, SaddleProblem};
use crate::error::{Error, Result};
use crate::linalg::{RectMatrix, SymmetricMatrix};

/// Retry budget for families that resample on a singular `K`.
pub const GENERATION_ATTEMPTS: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", rename_all_fields = "camelCase")]
pub enum Family {
    #[serde(rename = "toy-2x2")]
    Toy2x2 { b1: f64, b2: f64 },
    #[serde(rename = "remark-3x3")]
    Remark3x3 { alpha: f64 },
    PrescribedAngles {
        n: usize,
        m: usize,
        a_eigs: Vec<f64>,
        b_sing_vals: Vec<f64>,
        thetas: Vec<f64>,
    },
    IpmLike { n: usize, m: usize, delta: f64 },
    RandomLowestRank { n: usize, m: usize },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Toy2x2 { .. } => "toy-2x2",
            Family::Remark3x3 { .. } => "remark-3x3",
            Family::PrescribedAngles { .. } => "prescribed-angles",
            Family::IpmLike { .. } => "ipm-like",
            Family::RandomLowestRank { .. } => "random-lowest-rank",
        }
    }
}

/// A reproducible problem description: family, parameters and seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub family: Family,
    #[serde(default)]
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(family: Family, seed: u64) -> Self {
        Self { family, seed }
    }

    pub fn generate(&self) -> Result<SaddleProblem> {
        self.generate_with(ProblemOptions::default())
    }

    pub fn generate_with(&self, opts: ProblemOptions) -> Result<SaddleProblem> {
        match &self.family {
            Family::Toy2x2 { b1, b2 } => {
                check_toy(*b1, *b2, false)?;
                toy_problem(*b1, *b2, opts)
            }
            Family::Remark3x3 { alpha } => {
                check_remark(*alpha)?;
                let (a, b) = remark_blocks(*alpha);
                SaddleProblem::with_options(a, b, opts)
            }
            Family::PrescribedAngles {
                n,
                m,
                a_eigs,
                b_sing_vals,
                thetas,
            } => {
                let (a, b) = prescribed_angle_blocks(*n, *m, a_eigs, b_sing_vals, thetas, self.seed)?;
                SaddleProblem::with_options(a, b, opts)
            }
            Family::IpmLike { n, m, delta } => {
                let (a, b) = ipm_blocks(*n, *m, *delta, self.seed)?;
                SaddleProblem::with_options(a, b, opts)
            }
            Family::RandomLowestRank { n, m } => random_lowest_rank(*n, *m, self.seed, opts),
        }
    }
}

fn check_toy(b1: f64, b2: f64, allow_boundary: bool) -> Result<()> {
    if !b1.is_finite() || !b2.is_finite() || ((b1 * b1 + b2 * b2) - 1.0).abs() > 1e-12 {
        return Err(Error::ParameterOutOfRange(format!(
            "toy problem needs b1^2 + b2^2 = 1, got b1 = {b1}, b2 = {b2}"
        )));
    }
    let ok = if allow_boundary {
        b1 >= 0.0 && b2 >= 0.0
    } else {
        // b2 = 0 is left to validation, which reports the singular K.
        b1 > 0.0 && b2 >= 0.0
    };
    if !ok {
        return Err(Error::ParameterOutOfRange(format!(
            "toy problem needs b1, b2 > 0, got b1 = {b1}, b2 = {b2}"
        )));
    }
    Ok(())
}

fn toy_problem(b1: f64, b2: f64, opts: ProblemOptions) -> Result<SaddleProblem> {
    let a = SymmetricMatrix::from_diagonal(&[1.0, 0.0])?;
    let b = RectMatrix::from_row_slice(1, 2, &[b1, b2])?;
    SaddleProblem::with_options(a, b, opts)
}

/// `A = diag(1, 0)`, `B = [b1 b2]` with `b1^2 + b2^2 = 1`, `b1, b2 > 0`.
/// The characteristic polynomial of `K` is `l^3 - l^2 - l + b2^2`.
pub fn gen_toy(b1: f64, b2: f64) -> Result<SaddleProblem> {
    check_toy(b1, b2, false)?;
    toy_problem(b1, b2, ProblemOptions::default())
}

/// [`gen_toy`] with the boundary values `b1 = 0` or `b2 = 0` admitted (the
/// latter still fails validation with a singular `K`).
pub fn gen_toy_boundary(b1: f64, b2: f64) -> Result<SaddleProblem> {
    check_toy(b1, b2, true)?;
    toy_problem(b1, b2, ProblemOptions::default())
}

/// Largest admissible `alpha` for the remark matrix.
pub const REMARK_ALPHA_MAX: f64 = 1.0 - 1e-12;

fn check_remark(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= REMARK_ALPHA_MAX) {
        return Err(Error::ParameterOutOfRange(format!(
            "remark matrix needs 0 < alpha < 1, got {alpha}"
        )));
    }
    Ok(())
}

fn remark_blocks(alpha: f64) -> (SymmetricMatrix, RectMatrix) {
    let a = SymmetricMatrix::from_diagonal(&[1.0, alpha, 0.0]).expect("finite diagonal");
    let b = RectMatrix::from_row_slice(2, 3, &[0.0, 0.0, 1.0, 1.0, 0.0, 0.0]).expect("finite");
    (a, b)
}

/// `n = 3`, `m = 2`: `A = diag(1, alpha, 0)`, `B = [e3^T; e1^T]`. The
/// positive eigenvalues of `K` are `alpha`, `1` and the golden ratio, yet the
/// kept eigenvector `e1` lies in `range(B^T)`, so the general-rank bound is 0.
pub fn gen_remark(alpha: f64) -> Result<SaddleProblem> {
    check_remark(alpha)?;
    let (a, b) = remark_blocks(alpha);
    SaddleProblem::new(a, b)
}

fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    // Column-major fill order, fixed for reproducibility.
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// Haar-like orthogonal matrix: `Q` from the QR of a Gaussian matrix, with
/// columns flipped so `R` has a positive diagonal.
pub fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let qr = gaussian(rng, n, n).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

fn check_positive(name: &str, values: &[f64], len: usize) -> Result<()> {
    if values.len() != len {
        return Err(Error::ParameterOutOfRange(format!(
            "{name} needs {len} entries, got {}",
            values.len()
        )));
    }
    if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::ParameterOutOfRange(format!("{name} entries must be positive, got {v}")));
    }
    Ok(())
}

fn prescribed_angle_blocks(
    n: usize,
    m: usize,
    a_eigs: &[f64],
    b_sing_vals: &[f64],
    thetas: &[f64],
    seed: u64,
) -> Result<(SymmetricMatrix, RectMatrix)> {
    if m == 0 || n < 2 * m {
        return Err(Error::InfeasibleDimensions(format!(
            "prescribed angles need 1 <= m and n >= 2m, got n = {n}, m = {m}"
        )));
    }
    check_positive("aEigs", a_eigs, n - m)?;
    check_positive("bSingVals", b_sing_vals, m)?;
    if thetas.len() != m {
        return Err(Error::ParameterOutOfRange(format!(
            "thetas needs {m} entries, got {}",
            thetas.len()
        )));
    }
    if thetas.iter().any(|t| !(*t > 0.0 && *t <= FRAC_PI_2)) {
        return Err(Error::ParameterOutOfRange("thetas must lie in (0, pi/2]".into()));
    }
    if thetas.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::ParameterOutOfRange("thetas must be sorted ascending".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = random_orthogonal(&mut rng, n);
    let mix = random_orthogonal(&mut rng, m);
    let e = q.columns(0, m);
    let f = q.columns(m, m);
    let g = q.columns(2 * m, n - 2 * m);

    // U = [E cos + F sin | G], V = E, so U^T V = [diag(cos); 0].
    let mut u = DMatrix::zeros(n, n - m);
    for (j, &t) in thetas.iter().enumerate() {
        u.set_column(j, &(e.column(j) * t.cos() + f.column(j) * t.sin()));
    }
    u.columns_mut(m, n - 2 * m).copy_from(&g);

    let mut scaled = u.clone();
    for (j, &lam) in a_eigs.iter().enumerate() {
        scaled.column_mut(j).scale_mut(lam);
    }
    let a = SymmetricMatrix::symmetrized(&scaled * u.transpose());

    let mut s_vt = e.transpose();
    for (i, &s) in b_sing_vals.iter().enumerate() {
        s_vt.row_mut(i).scale_mut(s);
    }
    let b = RectMatrix::new(mix * s_vt)?;
    Ok((a, b))
}

/// Lowest-rank problem whose `range(A)` and `range(B^T)` meet at the given
/// principal angles, with prescribed nonzero eigenvalues of `A` and singular
/// values of `B`.
pub fn gen_prescribed_angles(
    n: usize,
    m: usize,
    a_eigs: &[f64],
    b_sing_vals: &[f64],
    thetas: &[f64],
    seed: u64,
) -> Result<SaddleProblem> {
    let (a, b) = prescribed_angle_blocks(n, m, a_eigs, b_sing_vals, thetas, seed)?;
    SaddleProblem::new(a, b)
}

fn ipm_blocks(n: usize, m: usize, delta: f64, seed: u64) -> Result<(SymmetricMatrix, RectMatrix)> {
    if m == 0 || m >= n {
        return Err(Error::InfeasibleDimensions(format!(
            "ipm-like needs 0 < m < n, got n = {n}, m = {m}"
        )));
    }
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::ParameterOutOfRange(format!(
            "delta must be finite and nonnegative, got {delta}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1.0 / (n as f64).sqrt();
    let factor = gaussian(&mut rng, n, n - m) * scale;
    let mut h = &factor * factor.transpose();
    // The shrinking complementarity entries of X^{-1} Z.
    for i in rand::seq::index::sample(&mut rng, n, m) {
        h[(i, i)] += delta;
    }
    let a = SymmetricMatrix::symmetrized(h);
    let b = RectMatrix::new(gaussian(&mut rng, m, n) * scale)?;
    Ok((a, b))
}

/// Interior-point style KKT block: `A = H + D` with `H` a random rank
/// `n - m` semidefinite matrix and `D` diagonal, equal to `delta` on `m`
/// seeded positions and zero elsewhere.
pub fn gen_ipm_like(n: usize, m: usize, delta: f64, seed: u64) -> Result<SaddleProblem> {
    let (a, b) = ipm_blocks(n, m, delta, seed)?;
    SaddleProblem::new(a, b)
}

fn random_lowest_rank_blocks(n: usize, m: usize, seed: u64) -> Result<(SymmetricMatrix, RectMatrix)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = random_orthogonal(&mut rng, n);
    let log_eig = Uniform::new(0.1f64.ln(), 10f64.ln()).expect("valid range");
    let u = q.columns(0, n - m);
    let mut scaled = u.clone_owned();
    for j in 0..(n - m) {
        let lam = log_eig.sample(&mut rng).exp();
        scaled.column_mut(j).scale_mut(lam);
    }
    let a = SymmetricMatrix::symmetrized(&scaled * u.transpose());
    let b = RectMatrix::new(gaussian(&mut rng, m, n) * (1.0 / (n as f64).sqrt()))?;
    Ok((a, b))
}

fn random_lowest_rank(n: usize, m: usize, seed: u64, opts: ProblemOptions) -> Result<SaddleProblem> {
    if m == 0 || m >= n {
        return Err(Error::InfeasibleDimensions(format!(
            "random lowest-rank needs 0 < m < n, got n = {n}, m = {m}"
        )));
    }
    let mut last = String::new();
    for attempt in 0..GENERATION_ATTEMPTS as u64 {
        let (a, b) = random_lowest_rank_blocks(n, m, seed.wrapping_add(attempt))?;
        match SaddleProblem::with_options(a, b, opts) {
            Ok(p) if p.is_lowest_rank() => return Ok(p),
            Ok(p) => last = format!("rank(A) = {} != n - m", p.rank_a()),
            Err(e) => last = e.to_string(),
        }
    }
    Err(Error::GenerationFailed {
        attempts: GENERATION_ATTEMPTS,
        last,
    })
}

/// Random lowest-rank problem: `A = Q diag(lambda) Q^T` on `n - m` random
/// orthonormal columns with log-uniform eigenvalues in `[0.1, 10]`, and a
/// Gaussian `B`. Resamples with an incremented seed when validation fails.
pub fn gen_random_lowest_rank(n: usize, m: usize, seed: u64) -> Result<SaddleProblem> {
    random_lowest_rank(n, m, seed, ProblemOptions::default())
}

/// Candidate specs for the standard corpus: 100 random lowest-rank problems
/// (`n <= 60`, including `n < 2m`), 40 prescribed-angle problems with seeded
/// spectra and angles in `[0.1, pi/2]`, and 80 interior-point style problems
/// with `delta` in `{0, 1e-8, 1e-2, 1}`. `round` shifts every seed, giving
/// replacement candidates slot by slot.
pub fn corpus_candidates(round: u64) -> Vec<GeneratorSpec> {
    const SEEDS: u64 = 5;
    let mut out = Vec::new();

    let lowest_rank_sizes = [
        (2, 1),
        (3, 1),
        (4, 2),
        (5, 2),
        (6, 3),
        (8, 3),
        (10, 4),
        (12, 5),
        (15, 5),
        (20, 8),
        (25, 10),
        (30, 12),
        (40, 15),
        (50, 20),
        (60, 20),
        (60, 25),
        (7, 5),
        (9, 6),
        (20, 15),
        (30, 25),
    ];
    for &(n, m) in &lowest_rank_sizes {
        for seed in 0..SEEDS {
            out.push(GeneratorSpec::new(Family::RandomLowestRank { n, m }, 1000 + seed + 100 * round));
        }
    }

    let angle_sizes = [(4, 2), (6, 2), (8, 3), (10, 4), (12, 5), (20, 6), (30, 10), (40, 12)];
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed + round);
    let log_spec = Uniform::new(0.1f64.ln(), 10f64.ln()).expect("valid range");
    let angle = Uniform::new(0.1, FRAC_PI_2).expect("valid range");
    for &(n, m) in &angle_sizes {
        for seed in 0..SEEDS {
            let a_eigs = (0..n - m).map(|_| log_spec.sample(&mut rng).exp()).collect();
            let b_sing_vals = (0..m).map(|_| log_spec.sample(&mut rng).exp()).collect();
            let mut thetas: Vec<f64> = (0..m).map(|_| angle.sample(&mut rng)).collect();
            thetas.sort_by(f64::total_cmp);
            out.push(GeneratorSpec::new(
                Family::PrescribedAngles {
                    n,
                    m,
                    a_eigs,
                    b_sing_vals,
                    thetas,
                },
                2000 + seed + 100 * round,
            ));
        }
    }

    for &delta in &[0.0, 1e-8, 1e-2, 1.0] {
        for &(n, m) in &[(10, 3), (20, 8), (40, 15), (60, 20)] {
            for seed in 0..SEEDS {
                out.push(GeneratorSpec::new(Family::IpmLike { n, m, delta }, 3000 + seed + 100 * round));
            }
        }
    }
    out
}
