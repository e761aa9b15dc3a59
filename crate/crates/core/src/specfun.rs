//! Integer-order cylinder functions: `J_n`, `Y_n`, `H_n^(1)` and their
//! first derivatives.
//!
//! `J_n` is computed by Miller's backward recurrence normalized with
//! `J_0 + 2 (J_2 + J_4 + ...) = 1`, which is stable for every order. `Y_0`
//! and `Y_1` come from Neumann's expansions in the same `J` sequence and
//! higher orders from the (stable) upward recurrence.
//!
//! Supported envelope: orders `0..=200`, arguments `0 <= x <= 1000`.
//! Anything outside is rejected with [`Error::Domain`].

use std::f64::consts::{FRAC_2_PI, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 200;
pub const MAX_ARGUMENT: f64 = 1000.0;

pub(crate) const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Decimal digits the Miller start index is chosen for.
const MILLER_DIGITS: f64 = 18.0;
const RESCALE_ABOVE: f64 = 1e250;
const RESCALE_BY: f64 = 1e-250;

/// Values of `J_n`, `Y_n` and their derivatives at one `(n, x)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CylinderEval {
    pub order: usize,
    pub argument: f64,
    pub j: f64,
    pub y: f64,
    pub jprime: f64,
    pub yprime: f64,
}

impl CylinderEval {
    /// `J_n Y_n' - J_n' Y_n`, which equals `2 / (pi x)`.
    pub fn wronskian(&self) -> f64 {
        self.j * self.yprime - self.jprime * self.y
    }

    pub fn hankel1(&self) -> Complex64 {
        Complex64::new(self.j, self.y)
    }

    pub fn hankel1_prime(&self) -> Complex64 {
        Complex64::new(self.jprime, self.yprime)
    }
}

fn check_order(n: usize) -> Result<()> {
    if n > MAX_ORDER {
        return Err(Error::Domain(format!(
            "order {n} exceeds the supported maximum {MAX_ORDER}"
        )));
    }
    Ok(())
}

fn check_argument(x: f64, allow_zero: bool) -> Result<()> {
    if !x.is_finite() || x < 0.0 || (!allow_zero && x == 0.0) {
        let bound = if allow_zero { ">= 0" } else { "> 0" };
        return Err(Error::Domain(format!(
            "argument {x} must be finite and {bound}"
        )));
    }
    if x > MAX_ARGUMENT {
        return Err(Error::Domain(format!(
            "argument {x} exceeds the supported maximum {MAX_ARGUMENT}"
        )));
    }
    Ok(())
}

/// Approximate `-log10 |J_m(x)|` for `m` beyond the turning point.
fn envelope_digits(m: f64, x: f64) -> f64 {
    0.5 * (2.0 * PI * m).log10() - m * (0.5 * std::f64::consts::E * x / m).log10()
}

/// Start index for the backward recurrence so that `J_0..=J_nmax` are
/// accurate to about [`MILLER_DIGITS`] digits.
fn miller_start(nmax: usize, x: f64) -> usize {
    let n = nmax.max(1) as f64;
    let at_n = envelope_digits(n, x);
    let (target, mut m) = if at_n <= 0.5 * MILLER_DIGITS {
        (MILLER_DIGITS, (1.1 * x).floor() + 1.0)
    } else {
        (0.5 * MILLER_DIGITS + at_n, n)
    };
    m = m.max(n).max(0.5 * std::f64::consts::E * x);
    while envelope_digits(m, x) < target {
        m += 1.0;
    }
    (m as usize + 10).max(nmax + 2)
}

/// Normalized `J_0(x) ..= J_start(x)` for `x > 0`. Entries near the top end
/// carry reduced relative accuracy but are negligible in absolute terms.
fn miller_sequence(nmax: usize, x: f64) -> Vec<f64> {
    let start = miller_start(nmax, x);
    let mut seq = vec![0.0; start + 1];
    let mut above = 0.0;
    let mut current = 1e-300;
    seq[start] = current;
    for k in (1..=start).rev() {
        let below = 2.0 * k as f64 / x * current - above;
        above = current;
        current = below;
        seq[k - 1] = current;
        if current.abs() > RESCALE_ABOVE {
            for v in &mut seq[k - 1..] {
                *v *= RESCALE_BY;
            }
            above *= RESCALE_BY;
            current *= RESCALE_BY;
        }
    }
    let norm = seq[0] + 2.0 * seq.iter().skip(2).step_by(2).sum::<f64>();
    for v in &mut seq {
        *v /= norm;
    }
    seq
}

/// `J_0(x) ..= J_nmax(x)` with `x >= 0` (no envelope checks).
pub(crate) fn j_sequence(nmax: usize, x: f64) -> Vec<f64> {
    if x == 0.0 {
        let mut seq = vec![0.0; nmax + 1];
        seq[0] = 1.0;
        return seq;
    }
    let mut seq = miller_sequence(nmax, x);
    seq.truncate(nmax + 1);
    seq
}

/// Neumann-series parts of `Y_0` and `Y_1` that stay smooth at the origin,
/// given the full Miller sequence `js` at `x`.
///
/// Returns `(s0, s1)` with `Y_0 = (2/pi) ln(x/2) J_0 + s0` and
/// `Y_1 = (2/pi) ln(x/2) J_1 - 2/(pi x) J_0 + s1`.
fn neumann_series(js: &[f64]) -> (f64, f64) {
    let mut even = 0.0;
    let mut odd = 0.0;
    let mut sign = -1.0;
    let mut k = 1usize;
    while 2 * k + 1 < js.len() {
        let kf = k as f64;
        even += sign * js[2 * k] / kf;
        odd += sign * (2.0 * kf + 1.0) * js[2 * k + 1] / (kf * (kf + 1.0));
        sign = -sign;
        k += 1;
    }
    if 2 * k < js.len() {
        even += sign * js[2 * k] / k as f64;
    }
    let s0 = FRAC_2_PI * EULER_GAMMA * js[0] - 2.0 * FRAC_2_PI * even;
    let s1 = FRAC_2_PI * (EULER_GAMMA - 1.0) * js[1] - FRAC_2_PI * odd;
    (s0, s1)
}

/// `Y_0(x) ..= Y_nmax(x)` for `x > 0`; may overflow to infinity for large
/// orders at small arguments.
pub(crate) fn y_sequence(nmax: usize, x: f64) -> Vec<f64> {
    let js = miller_sequence(nmax.max(1), x);
    let (s0, s1) = neumann_series(&js);
    let log_term = FRAC_2_PI * (0.5 * x).ln();
    let mut ys = Vec::with_capacity(nmax + 1);
    let y0 = log_term * js[0] + s0;
    let y1 = log_term * js[1] - FRAC_2_PI / x * js[0] + s1;
    ys.push(y0);
    if nmax >= 1 {
        ys.push(y1);
    }
    for k in 1..nmax {
        let next = 2.0 * k as f64 / x * ys[k] - ys[k - 1];
        ys.push(next);
    }
    ys
}

/// Bessel function of the first kind `J_n(x)`.
pub fn bessel_j(n: usize, x: f64) -> Result<f64> {
    check_order(n)?;
    check_argument(x, true)?;
    Ok(j_sequence(n, x)[n])
}

/// `J_0(x) ..= J_nmax(x)` in one recurrence pass.
pub fn bessel_j_seq(nmax: usize, x: f64) -> Result<Vec<f64>> {
    check_order(nmax)?;
    check_argument(x, true)?;
    Ok(j_sequence(nmax, x))
}

/// Bessel function of the second kind `Y_n(x)`, `x > 0`.
pub fn bessel_y(n: usize, x: f64) -> Result<f64> {
    Ok(bessel_y_seq(n, x)?[n])
}

/// `Y_0(x) ..= Y_nmax(x)`; errors if any requested value overflows.
pub fn bessel_y_seq(nmax: usize, x: f64) -> Result<Vec<f64>> {
    check_order(nmax)?;
    check_argument(x, false)?;
    let ys = y_sequence(nmax, x);
    if let Some(n) = ys.iter().position(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("Y_{n}({x}) overflows f64")));
    }
    Ok(ys)
}

/// `Y_0(x) - (2/pi) ln(x/2) J_0(x)`: the part of `Y_0` that is smooth at the
/// origin, where it equals `2 gamma / pi`.
pub fn y0_regular(x: f64) -> Result<f64> {
    check_argument(x, true)?;
    if x == 0.0 {
        return Ok(FRAC_2_PI * EULER_GAMMA);
    }
    Ok(neumann_series(&miller_sequence(1, x)).0)
}

/// `H_n^(1)(x) = J_n(x) + i Y_n(x)`.
pub fn hankel1(n: usize, x: f64) -> Result<Complex64> {
    let e = cyl_derivatives(n, x)?;
    Ok(e.hankel1())
}

/// Evaluate `J_n`, `Y_n`, `J_n'` and `Y_n'` at `x > 0`.
pub fn cyl_derivatives(n: usize, x: f64) -> Result<CylinderEval> {
    check_order(n)?;
    check_argument(x, false)?;
    let js = j_sequence(n + 1, x);
    let ys = y_sequence(n + 1, x);
    if !ys[n].is_finite() || !ys[n + 1].is_finite() {
        return Err(Error::Domain(format!("Y_{}({x}) overflows f64", n + 1)));
    }
    let (jprime, yprime) = derivative_pair(n, &js, &ys);
    Ok(CylinderEval {
        order: n,
        argument: x,
        j: js[n],
        y: ys[n],
        jprime,
        yprime,
    })
}

/// `(J_n', Y_n')` from sequences that extend to order `n + 1`.
pub(crate) fn derivative_pair(n: usize, js: &[f64], ys: &[f64]) -> (f64, f64) {
    if n == 0 {
        (-js[1], -ys[1])
    } else {
        (0.5 * (js[n - 1] - js[n + 1]), 0.5 * (ys[n - 1] - ys[n + 1]))
    }
}
