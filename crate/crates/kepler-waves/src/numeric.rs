//! Small numeric helpers: reproducible cube roots, the even power
//! |w|^(2/3) and its derivatives, ℝ³ vector arithmetic, and a least-squares
//! line fit used by the blow-up exponent estimators.

/// Cube root computed as exp(ln|x|/3) followed by one Newton step.
///
/// The Newton polish `y ← (2y + x/y²)/3` squares the relative error of the
/// exponent-by-logarithm seed (~1e−16), so the result is the correctly
/// rounded root on every platform with faithful `ln`/`exp`.
pub fn cbrt(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let a = x.abs();
    let seed = (a.ln() / 3.0).exp();
    sign * (2.0 * seed + a / (seed * seed)) / 3.0
}

/// |w|^(2/3), computed as the real even power (w²)^(1/3).
///
/// Valid for either sign of w; only w = 0 is singular for the derivatives.
pub fn abs_pow_two_thirds(w: f64) -> f64 {
    cbrt(w * w)
}

/// d/dw |w|^(2/3) = (2/3)·sign(w)·|w|^(−1/3), written as (2/3)·w·|w|^(−4/3).
pub fn d1_abs_pow_two_thirds(w: f64) -> f64 {
    let u = abs_pow_two_thirds(w); // |w|^(2/3)
    2.0 / 3.0 * w / (u * u)
}

/// d²/dw² |w|^(2/3) = −(2/9)·|w|^(−4/3).
pub fn d2_abs_pow_two_thirds(w: f64) -> f64 {
    let u = abs_pow_two_thirds(w);
    -2.0 / 9.0 / (u * u)
}

pub fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm3(a: &[f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

pub fn add3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn scale3(s: f64, a: &[f64; 3]) -> [f64; 3] {
    [s * a[0], s * a[1], s * a[2]]
}

pub fn cross3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// `n` evenly spaced samples covering [a, b] inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Least-squares line fit, returning (slope, intercept).
pub fn linear_fit(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let sum_x: f64 = points.iter().map(|(x, _)| x).sum();
    let sum_y: f64 = points.iter().map(|(_, y)| y).sum();
    let sum_xx: f64 = points.iter().map(|(x, _)| x * x).sum();
    let sum_xy: f64 = points.iter().map(|(x, y)| x * y).sum();

    let slope = (n * sum_xy - sum_x * sum_y) / (n * sum_xx - sum_x * sum_x);
    let intercept = (sum_y - slope * sum_x) / n;
    (slope, intercept)
}

/// Slope of ln(y) against ln(x); the blow-up exponent of y ∝ x^slope data.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    linear_fit(&logs).0
}
