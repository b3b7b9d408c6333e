//! Acceptance criteria. Runs without the libtest harness and prints one
//! `PASS`/`FAIL` line per criterion; exits nonzero if any fails.
//!
//! Ground truth is computed here from the raw blocks with nalgebra and
//! closed forms, not through the library's own oracle.

use std::f64::consts::FRAC_PI_2;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, SymmetricEigen};
use saddle_bounds::bounds::{
    all_bounds, all_bounds_auto, general_rank_bound, gram_structure, kernel_angle_bound, lowest_rank_bound,
    BoundValue, Warning,
};
use saddle_bounds::harness::{gamma_sweep, log_grid, standard_corpus, IDENTITY_GAMMAS};
use saddle_bounds::problems::{gen_prescribed_angles, gen_remark, gen_toy, gen_toy_boundary, Family, GeneratorSpec};
use saddle_bounds::{BoundKind, SaddleProblem};

type Check = fn() -> Result<String, String>;

const CRITERIA: [(&str, Option<u64>, Check); 9] = [
    ("toy cubic agreement", Some(1), toy_cubic),
    ("remark matrix", Some(1), remark_matrix),
    ("soundness sweep", Some(60), soundness),
    ("gram structure", Some(10), gram),
    ("kernel/range equivalence", None, kernel_range),
    ("inverse identity", None, inverse_identity),
    ("gamma-sweep geometry", Some(120), sweep_geometry),
    ("tightness witnesses", None, tightness),
    ("determinism", None, determinism),
];

fn main() {
    let mut failed = 0;
    for (i, (name, limit, check)) in CRITERIA.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|d| match limit {
            Some(s) if elapsed > Duration::from_secs(*s) => Err(format!("{d}; exceeded {s} s limit")),
            _ => Ok(d),
        });
        match outcome {
            Ok(d) => println!("PASS {} {name}: {d} [{:.2} s]", i + 1, elapsed.as_secs_f64()),
            Err(d) => {
                failed += 1;
                println!("FAIL {} {name}: {d} [{:.2} s]", i + 1, elapsed.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---- oracles ----

fn k_matrix(p: &SaddleProblem) -> DMatrix<f64> {
    let (n, m) = (p.n(), p.m());
    let mut k = DMatrix::zeros(n + m, n + m);
    k.view_mut((0, 0), (n, n)).copy_from(p.a().as_matrix());
    k.view_mut((n, 0), (m, n)).copy_from(p.b().as_matrix());
    k.view_mut((0, n), (n, m)).copy_from(&p.b().as_matrix().transpose());
    k
}

fn ascending_eigs(m: DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Spectrum of `K` ascending; the `m` negative eigenvalues come first.
struct Spectrum {
    eigs: Vec<f64>,
    m: usize,
}

impl Spectrum {
    fn of(p: &SaddleProblem) -> Self {
        Spectrum {
            eigs: ascending_eigs(k_matrix(p)),
            m: p.m(),
        }
    }

    fn inertia_ok(&self) -> bool {
        self.eigs[self.m - 1] < 0.0 && self.eigs[self.m] > 0.0
    }

    fn mu_min_plus(&self) -> f64 {
        self.eigs[self.m]
    }
}

/// Smaller positive root of `l^3 - l^2 - l + c` by bisection.
fn cubic_small_root(c: f64) -> f64 {
    let f = |l: f64| ((l - 1.0) * l - 1.0) * l + c;
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn singular_values(m: DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Orthonormal bases of `range(A)` (top `n - m` eigenvectors) and
/// `range(B^T)` (thin QR).
fn range_bases(p: &SaddleProblem) -> (DMatrix<f64>, DMatrix<f64>) {
    let (n, m) = (p.n(), p.m());
    let eig = SymmetricEigen::new(p.a().as_matrix().clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let mut u = DMatrix::zeros(n, n - m);
    for (c, &i) in order.iter().take(n - m).enumerate() {
        u.set_column(c, &eig.eigenvectors.column(i));
    }
    let v = p.b().as_matrix().transpose().qr().q();
    (u, v)
}

fn corpus() -> &'static [(GeneratorSpec, SaddleProblem, Spectrum)] {
    static CORPUS: OnceLock<Vec<(GeneratorSpec, SaddleProblem, Spectrum)>> = OnceLock::new();
    CORPUS.get_or_init(|| {
        standard_corpus()
            .expect("corpus")
            .into_iter()
            .map(|spec| {
                let p = spec.generate().expect("corpus problem");
                let s = Spectrum::of(&p);
                (spec, p, s)
            })
            .collect()
    })
}

fn label(spec: &GeneratorSpec) -> String {
    format!("{} seed {}", spec.family.name(), spec.seed)
}

// ---- criteria ----

fn toy_cubic() -> Result<String, String> {
    let mut worst = 0.0f64;
    for i in 1..=9 {
        let b2 = i as f64 / 10.0;
        let b1 = (1.0 - b2 * b2).sqrt();
        let p = gen_toy(b1, b2).map_err(|e| e.to_string())?;
        let got = Spectrum::of(&p).mu_min_plus();
        let want = cubic_small_root(b2 * b2);
        let err = (got - want).abs();
        ensure(err <= 1e-10, || format!("b2 = {b2}: {got} vs root {want}"))?;
        worst = worst.max(err);
    }
    Ok(format!("9 cases, max error {worst:.1e}"))
}

fn remark_matrix() -> Result<String, String> {
    let golden = 0.5 * (1.0 + 5f64.sqrt());
    for alpha in [0.1, 0.5, 0.9] {
        let p = gen_remark(alpha).map_err(|e| e.to_string())?;
        let s = Spectrum::of(&p);
        let pos = &s.eigs[s.m..];
        let mut want = [alpha, 1.0, golden];
        want.sort_by(f64::total_cmp);
        for (g, w) in pos.iter().zip(want) {
            ensure((g - w).abs() <= 1e-10, || format!("alpha = {alpha}: eigenvalues {pos:?}"))?;
        }
        let r = general_rank_bound(&p).map_err(|e| e.to_string())?;
        ensure(r.lower_bound() == 0.0 && r.has_warning(Warning::ZeroAngle), || {
            format!("alpha = {alpha}: general-rank {} warnings {:?}", r.lower_bound(), r.warnings)
        })?;
    }
    Ok("alpha in {0.1, 0.5, 0.9}".into())
}

fn soundness() -> Result<String, String> {
    let c = corpus();
    ensure(c.len() >= 200, || format!("corpus has {} problems", c.len()))?;
    let mut certified = 0;
    let mut worst = f64::INFINITY;
    for (spec, p, s) in c {
        ensure(s.inertia_ok(), || format!("{}: inertia", label(spec)))?;
        let mut reports = all_bounds_auto(p).map_err(|e| e.to_string())?.1;
        for g in IDENTITY_GAMMAS {
            reports.extend(all_bounds(p, Some(g)).map_err(|e| format!("{}: {e}", label(spec)))?);
        }
        for r in reports.iter().filter(|r| r.assumptions_met) {
            let slack = s.mu_min_plus() - r.lower_bound();
            ensure(slack >= -1e-8, || {
                format!("{} {}: bound {} above {}", label(spec), r.name.as_str(), r.lower_bound(), s.mu_min_plus())
            })?;
            worst = worst.min(slack);
            certified += 1;
            if let BoundValue::Intervals { negative, positive } = r.value {
                for (i, &l) in s.eigs.iter().enumerate() {
                    let (lo, hi) = if i < s.m { negative } else { positive };
                    ensure(l >= lo - 1e-8 && l <= hi + 1e-8, || {
                        format!("{}: eigenvalue {l} outside [{lo}, {hi}]", label(spec))
                    })?;
                }
            }
        }
    }
    Ok(format!("{} problems, {certified} bounds certified, min slack {worst:.2e}", c.len()))
}

fn gram() -> Result<String, String> {
    let mut count = 0;
    for (spec, p, _) in corpus().iter().filter(|(_, p, _)| p.is_lowest_rank()) {
        let (n, m) = (p.n(), p.m());
        let (u, v) = range_bases(p);
        let mut pm = DMatrix::zeros(n, n);
        pm.columns_mut(0, n - m).copy_from(&u);
        pm.columns_mut(n - m, m).copy_from(&v);
        let eigs = ascending_eigs(pm.tr_mul(&pm));

        let cosines = singular_values(u.tr_mul(&v));
        if let Family::PrescribedAngles { thetas, .. } = &spec.family {
            let mut want: Vec<f64> = thetas.iter().map(|t| t.cos()).collect();
            want.sort_by(|a, b| b.total_cmp(a));
            for (c, w) in cosines.iter().zip(&want) {
                ensure((c - w).abs() <= 1e-8, || format!("{}: cosines {cosines:?} vs {want:?}", label(spec)))?;
            }
        }
        let mut predicted = vec![1.0; n - 2 * cosines.len()];
        for &c in &cosines {
            predicted.extend([1.0 + c, 1.0 - c]);
        }
        predicted.sort_by(f64::total_cmp);
        for (e, w) in eigs.iter().zip(&predicted) {
            ensure((e - w).abs() <= 1e-8, || format!("{}: P^T P {e} vs {w}", label(spec)))?;
        }

        let sigma_min = *singular_values(pm).last().unwrap();
        let rho = 1.0 - cosines[0];
        ensure((sigma_min * sigma_min - rho).abs() <= 1e-8, || {
            format!("{}: ||P^-1||^-2 = {} vs 1 - cos = {rho}", label(spec), sigma_min * sigma_min)
        })?;

        let g = gram_structure(p).map_err(|e| e.to_string())?;
        let mut lib = g.eigenvalues.clone();
        lib.sort_by(f64::total_cmp);
        for (a, b) in lib.iter().zip(&eigs) {
            ensure((a - b).abs() <= 1e-8, || format!("{}: library P^T P {a} vs {b}", label(spec)))?;
        }
        ensure((g.rho - rho).abs() <= 1e-8, || format!("{}: library rho {} vs {rho}", label(spec), g.rho))?;
        count += 1;
    }
    ensure(count >= 50, || format!("only {count} lowest-rank instances"))?;
    Ok(format!("{count} lowest-rank instances"))
}

fn kernel_range() -> Result<String, String> {
    let mut count = 0;
    let mut worst = 0.0f64;
    for (spec, p, _) in corpus().iter().filter(|(_, p, _)| p.is_lowest_rank()) {
        let lr = lowest_rank_bound(p).map_err(|e| e.to_string())?.lower_bound();
        let ka = kernel_angle_bound(p).map_err(|e| e.to_string())?.lower_bound();
        let scale = lr.abs().max(1.0);
        ensure((lr - ka).abs() <= 1e-8 * scale, || format!("{}: range {lr} vs kernel {ka}", label(spec)))?;

        let (u, v) = range_bases(p);
        let rho = 1.0 - singular_values(u.tr_mul(&v))[0];
        let mu_plus = ascending_eigs(p.a().as_matrix().clone())[p.m()];
        let sigma = *singular_values(p.b().as_matrix().clone()).last().unwrap();
        let want = (mu_plus * rho).min(sigma * rho.sqrt());
        ensure((lr - want).abs() <= 1e-8 * scale, || format!("{}: bound {lr} vs formula {want}", label(spec)))?;
        worst = worst.max((lr - ka).abs() / scale);
        count += 1;
    }
    Ok(format!("{count} instances, max relative difference {worst:.1e}"))
}

fn inverse_identity() -> Result<String, String> {
    let (mut checked, mut skipped) = (0usize, 0usize);
    let mut worst = 0.0f64;
    for (spec, p, _) in corpus() {
        let (n, m) = (p.n(), p.m());
        let k = k_matrix(p);
        let b = p.b().as_matrix();
        let cond = |mat: &DMatrix<f64>| {
            let s = singular_values(mat.clone());
            s[0] / s[s.len() - 1]
        };
        let cond_k = cond(&k);
        for g in IDENTITY_GAMMAS {
            let mut kw = k.clone();
            let aw = p.a().as_matrix() + b.tr_mul(b) * g;
            kw.view_mut((0, 0), (n, n)).copy_from(&aw);
            if cond_k.max(cond(&kw)) > 1e12 {
                skipped += 1;
                continue;
            }
            let k_inv = k.clone().lu().try_inverse().ok_or("K not invertible")?;
            let mut predicted = kw.lu().try_inverse().ok_or("K(W) not invertible")?;
            for i in n..n + m {
                predicted[(i, i)] += g;
            }
            let residual = (&k_inv - predicted).norm() / k_inv.norm().max(1.0);
            ensure(residual <= 1e-8, || format!("{} gamma {g}: residual {residual:e}", label(spec)))?;
            worst = worst.max(residual);
            checked += 1;
        }
    }
    let total = checked + skipped;
    ensure(checked * 10 >= total * 9, || format!("{skipped} of {total} skipped"))?;
    Ok(format!("{checked} of {total} configurations checked, max residual {worst:.1e}"))
}

fn sweep_geometry() -> Result<String, String> {
    let grid = log_grid(1e-4, 1e4, 25).map_err(|e| e.to_string())?;
    for (spec, p, s) in corpus() {
        let sweep = gamma_sweep(p, &grid).map_err(|e| format!("{}: {e}", label(spec)))?;
        ensure(sweep.rows.len() == 25, || format!("{}: {} rows", label(spec), sweep.rows.len()))?;
        let b = p.b().as_matrix();
        let mut mus = Vec::with_capacity(25);
        for (row, &g) in sweep.rows.iter().zip(&grid) {
            let mu = ascending_eigs(p.a().as_matrix() + b.tr_mul(b) * g)[0];
            let tol = 1e-8 * mu.abs().max(1.0);
            ensure((row.mu_min_a_gamma - mu).abs() <= tol, || {
                format!("{} gamma {g}: mu_min(A_gamma) {} vs {mu}", label(spec), row.mu_min_a_gamma)
            })?;
            ensure(row.predicted_bound <= s.mu_min_plus() + 1e-8, || {
                format!("{} gamma {g}: predicted {} above {}", label(spec), row.predicted_bound, s.mu_min_plus())
            })?;
            mus.push(mu);
        }
        for (i, w) in mus.windows(2).enumerate() {
            ensure(w[1] >= w[0] - 1e-10 * w[0].abs().max(1.0), || {
                format!("{}: mu_min(A_gamma) decreases at index {i}", label(spec))
            })?;
        }
        let gap: Vec<f64> = grid.iter().zip(&mus).map(|(g, mu)| 1.0 / g - mu).collect();
        let crossing = gap
            .windows(2)
            .position(|w| w[0] > 0.0 && w[1] <= 0.0)
            .ok_or_else(|| format!("{}: no crossing in grid", label(spec)))?;
        let argmax = sweep.argmax_predicted();
        ensure(argmax.abs_diff(crossing) <= 1, || {
            format!("{}: maximizer {argmax}, crossing {crossing}", label(spec))
        })?;
    }
    Ok(format!("{} problems x 25 grid points", corpus().len()))
}

fn tightness() -> Result<String, String> {
    let mut cases: Vec<(String, SaddleProblem, f64)> = Vec::new();
    let half_pi = |k: usize| vec![FRAC_PI_2; k];
    let witnesses: [(usize, usize, &[f64], &[f64]); 4] = [
        (4, 2, &[0.5, 2.0], &[1.0, 3.0]),
        (6, 3, &[2.0, 3.0, 5.0], &[0.3, 1.0, 2.0]),
        (8, 3, &[1.0, 1.5, 2.0, 4.0, 7.0], &[0.8, 1.1, 6.0]),
        (7, 3, &[0.7, 9.0, 9.5, 12.0], &[2.0, 2.5, 4.0]),
    ];
    for (i, (n, m, a_eigs, b_sing)) in witnesses.into_iter().enumerate() {
        let p = gen_prescribed_angles(n, m, a_eigs, b_sing, &half_pi(m.min(n - m)), 40 + i as u64)
            .map_err(|e| e.to_string())?;
        // Orthogonal ranges decouple K, so mu_min^+(K) = min(mu_min^+(A), sigma_min(B)).
        let closed = a_eigs.iter().chain(b_sing).copied().fold(f64::INFINITY, f64::min);
        cases.push((format!("prescribed n={n} m={m}"), p, closed));
    }
    cases.push(("toy b2 = 1".into(), gen_toy_boundary(0.0, 1.0).map_err(|e| e.to_string())?, 1.0));

    let mut worst = 0.0f64;
    for (name, p, closed) in &cases {
        let actual = Spectrum::of(p).mu_min_plus();
        ensure((actual - closed).abs() <= 1e-10, || format!("{name}: mu_min^+ {actual} vs {closed}"))?;
        for kind in [BoundKind::LowestRank, BoundKind::KernelAngle, BoundKind::GeneralRank] {
            let r = all_bounds(p, None)
                .map_err(|e| e.to_string())?
                .into_iter()
                .find(|r| r.name == kind)
                .ok_or_else(|| format!("{name}: {} missing", kind.as_str()))?;
            let slack = actual - r.lower_bound();
            ensure((-1e-8..=1e-8).contains(&slack), || {
                format!("{name} {}: slack {slack:e}", kind.as_str())
            })?;
            worst = worst.max(slack.abs());
        }
    }
    Ok(format!("{} witnesses attained, max |slack| {worst:.1e}", cases.len()))
}

fn run_cli(args: &[&str], cwd: &Path) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_saddle-bounds"))
        .args(args)
        .current_dir(cwd)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!("{args:?} exited {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr))
    })?;
    Ok(out.stdout)
}

fn dir_bytes(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .map_err(|e| e.to_string())?
        .map(|e| {
            let e = e.map_err(|e| e.to_string())?;
            let bytes = std::fs::read(e.path()).map_err(|e| e.to_string())?;
            Ok((e.file_name().to_string_lossy().into_owned(), bytes))
        })
        .collect::<Result<_, String>>()?;
    files.sort();
    Ok(files)
}

fn determinism() -> Result<String, String> {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let root = tmp.path();
    let problems = [
        ("random", r#"{"n":20,"m":8}"#, "7"),
        ("angles", r#"{"n":8,"m":3,"aEigs":[1,2,3,4,5],"bSingVals":[0.5,1,2],"thetas":[0.3,0.8,1.2]}"#, "3"),
        ("ipm", r#"{"n":15,"m":5,"delta":0.01}"#, "11"),
    ];
    let mut compared = 0;
    for (family, params, seed) in problems {
        run_cli(&["generate", "--family", family, "--params", params, "--seed", seed, "--out", family], root)?;
        let a = format!("{family}/A.mtx");
        let b = format!("{family}/B.mtx");
        let runs: [Vec<&str>; 5] = [
            vec!["bound", "--A", &a, "--B", &b, "--json"],
            vec!["bound", "--A", &a, "--B", &b, "--gamma", "0.5", "--csv"],
            vec!["bound", "--A", &a, "--B", &b, "--auto-gamma"],
            vec!["sweep", "--A", &a, "--B", &b, "--gamma-min", "1e-4", "--gamma-max", "1e4", "--points", "25"],
            vec!["sweep", "--A", &a, "--B", &b, "--points", "9", "--gamma-min", "1e-2", "--gamma-max", "1e2"],
        ];
        for args in &runs {
            let first = run_cli(args, root)?;
            let second = run_cli(args, root)?;
            ensure(!first.is_empty() && first == second, || format!("{args:?}: stdout differs"))?;
            compared += 1;

            let mut with_out = args.clone();
            let (d1, d2) = (format!("{family}-out-1"), format!("{family}-out-2"));
            with_out.extend(["--out", &d1]);
            run_cli(&with_out, root)?;
            *with_out.last_mut().unwrap() = &d2;
            run_cli(&with_out, root)?;
            let (f1, f2) = (dir_bytes(&root.join(&d1))?, dir_bytes(&root.join(&d2))?);
            ensure(!f1.is_empty() && f1 == f2, || format!("{args:?}: output files differ"))?;
            compared += 1;
            std::fs::remove_dir_all(root.join(&d1)).map_err(|e| e.to_string())?;
            std::fs::remove_dir_all(root.join(&d2)).map_err(|e| e.to_string())?;
        }
    }
    Ok(format!("{compared} repeated runs byte-identical"))
}
