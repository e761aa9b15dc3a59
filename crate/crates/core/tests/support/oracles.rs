//! Independent Bessel-function oracles shared by test targets.

use std::f64::consts::PI;

/// `J_n(x) = (1/2π) ∫_0^{2π} cos(nτ - x sin τ) dτ`, periodic trapezoid rule.
/// Absolute accuracy is about 1e-16, so tiny values need an absolute floor.
pub fn j_integral(n: usize, x: f64) -> f64 {
    let q = 2 * (n + x.ceil() as usize) + 256;
    let h = 2.0 * PI / q as f64;
    (0..q)
        .map(|i| {
            let t = i as f64 * h;
            (n as f64 * t - x * t.sin()).cos()
        })
        .sum::<f64>()
        / q as f64
}

/// Ascending series `Σ (-1)^k (x/2)^{2k+n} / (k! (n+k)!)`.
pub fn j_series(n: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = (1..=n).fold(1.0, |acc, i| acc * half / i as f64);
    let mut sum = term;
    for k in 1..200 {
        term *= -half * half / (k as f64 * (n + k) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// 20-point Gauss-Legendre nodes and weights on [-1, 1].
fn gauss_legendre() -> Vec<(f64, f64)> {
    let n = 20;
    let mut rule = Vec::with_capacity(n);
    for i in 1..=n {
        let mut x = (PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        rule.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    rule
}

fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let rule = gauss_legendre();
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|p| {
            let mid = a + (p as f64 + 0.5) * h;
            rule.iter()
                .map(|(t, w)| w * f(mid + 0.5 * h * t))
                .sum::<f64>()
                * 0.5
                * h
        })
        .sum()
}

/// `Y_n(x) = (1/π) ∫_0^π sin(x sin τ - nτ) dτ
///          - (1/π) ∫_0^∞ (e^{nt} + (-1)^n e^{-nt}) e^{-x sinh t} dt`.
pub fn y_integral(n: usize, x: f64) -> f64 {
    let nf = n as f64;
    let first = integrate(|t| (x * t.sin() - nf * t).sin(), 0.0, PI, 64);
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    // cut where the integrand is e^{-40} below its peak
    let exponent = |t: f64| nf * t - x * t.sinh();
    let peak_at = (nf / x).max(1.0).acosh();
    let mut upper: f64 = peak_at + 1.0;
    while exponent(upper) > exponent(peak_at) - 40.0 {
        upper += 0.25;
    }
    let second = integrate(
        |t| exponent(t).exp() + sign * (-nf * t - x * t.sinh()).exp(),
        0.0,
        upper,
        400,
    );
    (first - second) / PI
}
