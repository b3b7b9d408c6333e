//! Browser bindings for the demo page in `www/`. Every export returns a JSON
//! string; the `*_json` functions behind them are plain Rust and are what the
//! native tests exercise.

use std::f64::consts::FRAC_PI_2;

use saddle_bounds::bounds::{all_bounds_auto, rho_from_angles, BoundValue};
use saddle_bounds::harness::{gamma_sweep, log_grid, oracle};
use saddle_bounds::problems::{gen_ipm_like, gen_prescribed_angles, gen_random_lowest_rank, gen_toy};
use saddle_bounds::{BoundReport, SaddleProblem};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn bounds_json(reports: &[BoundReport]) -> Value {
    reports
        .iter()
        .map(|r| {
            let mut v = json!({
                "name": r.name.as_str(),
                "lower": r.lower_bound(),
                "warnings": r.warnings,
            });
            if let BoundValue::Intervals { negative, positive } = r.value {
                v["negative"] = json!([negative.0, negative.1]);
                v["positive"] = json!([positive.0, positive.1]);
            }
            v
        })
        .collect()
}

fn problem_json(p: &SaddleProblem) -> Result<Value, String> {
    let o = oracle(p).map_err(err)?;
    let (gamma, reports) = all_bounds_auto(p).map_err(err)?;
    Ok(json!({
        "n": p.n(),
        "m": p.m(),
        "eigenvalues": o.all_eigs,
        "muMinPlus": o.mu_min_plus_k,
        "gamma": gamma,
        "bounds": bounds_json(&reports),
    }))
}

/// Toy 2x2 problem over `b2` in `(0, 1)`: smallest positive eigenvalue of `K`
/// next to every bound, one entry per grid point.
pub fn toy_curve_json(points: usize) -> Result<String, String> {
    if !(2..=2000).contains(&points) {
        return Err(format!("points must be in 2..=2000, got {points}"));
    }
    let rows = (1..=points)
        .map(|i| {
            let b2 = i as f64 / (points + 1) as f64;
            let p = gen_toy((1.0 - b2 * b2).sqrt(), b2).map_err(err)?;
            let mut v = problem_json(&p)?;
            v["b2"] = json!(b2);
            Ok(v)
        })
        .collect::<Result<Vec<Value>, String>>()?;
    Ok(Value::Array(rows).to_string())
}

/// `min{1/gamma, mu_min(A_gamma)}` on a log grid for a seeded problem.
/// `family` is `"random"` or `"ipm"`.
pub fn sweep_json(family: &str, n: usize, m: usize, delta: f64, seed: u64, points: usize) -> Result<String, String> {
    if n > 120 {
        return Err(format!("n must be at most 120 in the demo, got {n}"));
    }
    let p = match family {
        "random" => gen_random_lowest_rank(n, m, seed),
        "ipm" => gen_ipm_like(n, m, delta, seed),
        other => return Err(format!("unknown family {other:?}")),
    }
    .map_err(err)?;
    let grid = log_grid(1e-4, 1e4, points).map_err(err)?;
    let sweep = gamma_sweep(&p, &grid).map_err(err)?;
    Ok(json!({
        "rows": sweep.rows,
        "crossingIndex": sweep.crossing_index,
        "argmax": sweep.argmax_predicted(),
        "problem": problem_json(&p)?,
    })
    .to_string())
}

/// Four-dimensional problem with `range(A)` and `range(B^T)` at angles
/// `(theta, pi/2)`, `A` eigenvalues `(mu, 2 mu)` and `B` singular values
/// `(sigma, 2 sigma)`.
pub fn angles_json(theta: f64, mu: f64, sigma: f64) -> Result<String, String> {
    if !(theta > 0.0 && theta <= FRAC_PI_2) {
        return Err(format!("theta must lie in (0, pi/2], got {theta}"));
    }
    let p = gen_prescribed_angles(4, 2, &[mu, 2.0 * mu], &[sigma, 2.0 * sigma], &[theta, FRAC_PI_2], 7).map_err(err)?;
    let rho = rho_from_angles(&p).map_err(err)?;
    let mut v = problem_json(&p)?;
    v["rho"] = json!(rho.rho);
    v["thetaMin"] = json!(rho.theta_min);
    Ok(v.to_string())
}

#[wasm_bindgen]
pub fn toy_curve(points: usize) -> Result<String, JsError> {
    toy_curve_json(points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn sweep(family: &str, n: usize, m: usize, delta: f64, seed: u32, points: usize) -> Result<String, JsError> {
    sweep_json(family, n, m, delta, seed.into(), points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn angles(theta: f64, mu: f64, sigma: f64) -> Result<String, JsError> {
    angles_json(theta, mu, sigma).map_err(|e| JsError::new(&e))
}
