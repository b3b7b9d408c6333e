//! Reference computations used as oracles. None of these route through the
//! library's own decompositions.
#![allow(dead_code)]

/// Smaller positive root of `l^3 - l^2 - l + c` for `0 < c <= 1`, by
/// bisection on `[0, 1]` (the cubic is positive at 0 and `c - 1 <= 0` at 1).
pub fn toy_cubic_small_root(c: f64) -> f64 {
    let p = |l: f64| ((l - 1.0) * l - 1.0) * l + c;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if p(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Eigenvalues of `[[a, b], [b, d]]`, ascending, in closed form.
pub fn eig2(a: f64, b: f64, d: f64) -> (f64, f64) {
    let mean = 0.5 * (a + d);
    let rad = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    let hi = mean + rad;
    // Smaller root through the determinant avoids cancellation.
    let det = a * d - b * b;
    let lo = if hi != 0.0 { det / hi } else { mean - rad };
    (lo, hi)
}

/// Determinant of a 3x3 matrix by cofactor expansion.
pub fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

pub fn golden() -> f64 {
    0.5 * (1.0 + 5f64.sqrt())
}

/// Largest `|x^T y|` over unit `x` in `span{e1, e3}` and the fixed unit `y`,
/// by dense sampling of the circle.
pub fn brute_force_cos(xs: &[[f64; 3]; 2], y: [f64; 3], samples: usize) -> f64 {
    let mut best = 0.0f64;
    for k in 0..samples {
        let t = std::f64::consts::PI * k as f64 / samples as f64;
        let (c, s) = (t.cos(), t.sin());
        let x = [
            c * xs[0][0] + s * xs[1][0],
            c * xs[0][1] + s * xs[1][1],
            c * xs[0][2] + s * xs[1][2],
        ];
        best = best.max((x[0] * y[0] + x[1] * y[1] + x[2] * y[2]).abs());
    }
    best
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}
