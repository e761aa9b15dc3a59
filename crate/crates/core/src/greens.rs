//! Neumann function of the Helmholtz operator on the disk `|x| < R`.
//!
//! `N(x, z; k)` solves `(Δ + k²) N = -δ_z` with `∂N/∂ν = 0` on `|x| = R`.
//! Writing it as the free-space part `(i/4) H0(k|x - z|)` plus the
//! Fourier-Bessel correction with coefficients
//! `c_n = -(i/4) J_n(k|z|) H_n'(kR) / J_n'(kR)` and collapsing the
//! imaginary parts with Graf's addition theorem gives the real form
//!
//! ```text
//! N(x, z) = -Y0(k|x - z|) / 4
//!           + 1/4 Σ_{n>=0} ε_n J_n(k|x|) J_n(k|z|) Y_n'(kR) / J_n'(kR) cos(n(φx - φz))
//! ```
//!
//! with `ε_0 = 1`, `ε_n = 2`. On the circle `|x| = R` the Wronskian
//! collapses it further to `Σ_m β_m(|z|) e^{im(φx - φz)}` with
//! `β_m = J_m(k|z|) / (2π kR J_m'(kR))`.
//!
//! Past the turning point `n > kR` the factors `J_n(kR)` and `Y_n(kR)` run
//! off to opposite ends of the floating-point range, so the coefficients are
//! stored rescaled by `J_n(kR)`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::specfun::{self, MAX_ARGUMENT, MAX_ORDER};

/// Below this a rescaling factor `J_n(kR)` is too close to underflow to be
/// trusted, and the series is cut there.
const SCALE_FLOOR: f64 = 1e-280;

/// Truncation controls for the Fourier-Bessel series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesParams {
    pub max_order: usize,
    /// Stop once a term (past the turning point) bounds the remaining tail
    /// below this fraction of the partial sum.
    pub tail_tolerance: f64,
    /// Minimum `|J_n'(kR)|` accepted for orders `n <= kR`.
    pub eigenvalue_guard: f64,
}

impl SeriesParams {
    pub const DEFAULT_MAX_ORDER: usize = MAX_ORDER;
    pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-14;
    pub const DEFAULT_EIGENVALUE_GUARD: f64 = 1e-8;
    /// Orders that must be available past `ceil(kR)`.
    pub const MIN_ORDER_MARGIN: usize = 10;

    pub fn new(max_order: usize, tail_tolerance: f64, eigenvalue_guard: f64) -> Result<Self> {
        if max_order > MAX_ORDER {
            return Err(Error::Invalid(format!(
                "series order {max_order} exceeds the supported maximum {MAX_ORDER}"
            )));
        }
        if !(tail_tolerance > 0.0 && tail_tolerance <= 1e-6) {
            return Err(Error::Invalid(format!(
                "tail tolerance must lie in (0, 1e-6], got {tail_tolerance}"
            )));
        }
        if !(eigenvalue_guard.is_finite() && eigenvalue_guard >= 0.0) {
            return Err(Error::Invalid(format!(
                "eigenvalue guard must be finite and >= 0, got {eigenvalue_guard}"
            )));
        }
        Ok(SeriesParams {
            max_order,
            tail_tolerance,
            eigenvalue_guard,
        })
    }

    /// Defaults, checked against the given wavenumber and radius.
    pub fn for_problem(k: f64, radius: f64) -> Result<Self> {
        let params = Self::default();
        params.check(k, radius)?;
        Ok(params)
    }

    /// Fails unless `max_order >= ceil(kR) + 10`.
    pub fn check(&self, k: f64, radius: f64) -> Result<()> {
        let needed = minimum_order(k, radius)?;
        if self.max_order < needed {
            return Err(Error::Invalid(format!(
                "series order {} is below ceil(kR) + {} = {needed} for kR = {}",
                self.max_order,
                Self::MIN_ORDER_MARGIN,
                k * radius
            )));
        }
        Ok(())
    }
}

impl Default for SeriesParams {
    fn default() -> Self {
        SeriesParams {
            max_order: Self::DEFAULT_MAX_ORDER,
            tail_tolerance: Self::DEFAULT_TAIL_TOLERANCE,
            eigenvalue_guard: Self::DEFAULT_EIGENVALUE_GUARD,
        }
    }
}

fn minimum_order(k: f64, radius: f64) -> Result<usize> {
    check_problem(k, radius)?;
    Ok((k * radius).ceil() as usize + SeriesParams::MIN_ORDER_MARGIN)
}

fn check_problem(k: f64, radius: f64) -> Result<()> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::Invalid(format!(
            "wavenumber must be finite and > 0, got {k}"
        )));
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::Invalid(format!(
            "radius must be finite and > 0, got {radius}"
        )));
    }
    if k * radius > MAX_ARGUMENT {
        return Err(Error::Domain(format!(
            "kR = {} exceeds the supported maximum {MAX_ARGUMENT}",
            k * radius
        )));
    }
    Ok(())
}

/// Precomputed `kR`-dependent coefficients for one wavenumber and radius.
#[derive(Clone, Debug)]
pub struct NeumannKernel {
    k: f64,
    radius: f64,
    params: SeriesParams,
    /// `J_n(kR)` past the turning point, 1 before it.
    scale: Vec<f64>,
    /// `scale_n² Y_n'(kR) / J_n'(kR)`.
    interior: Vec<f64>,
    /// `scale_n / (2π kR J_n'(kR))`.
    boundary: Vec<f64>,
}

impl NeumannKernel {
    pub fn new(k: f64, radius: f64, params: SeriesParams) -> Result<Self> {
        params.check(k, radius)?;
        let kr = k * radius;
        let top = params.max_order + 1;
        let js = specfun::j_sequence(top, kr);
        let ys = specfun::y_sequence(top, kr);
        let mut scale = Vec::with_capacity(top);
        let mut interior = Vec::with_capacity(top);
        let mut boundary = Vec::with_capacity(top);
        for n in 0..=params.max_order {
            let (jp, yp) = specfun::derivative_pair(n, &js, &ys);
            let beyond = n as f64 > kr;
            if !beyond && jp.abs() < params.eigenvalue_guard {
                return Err(Error::NearEigenvalue {
                    wavenumber: k,
                    order: n,
                    value: jp.abs(),
                });
            }
            let s = if beyond { js[n] } else { 1.0 };
            let g = s * (s / jp) * yp;
            let h = (s / jp) / (TAU * kr);
            if !(s > SCALE_FLOOR && g.is_finite() && h.is_finite()) {
                break;
            }
            scale.push(s);
            interior.push(g);
            boundary.push(h);
        }
        if interior.len() <= minimum_order(k, radius)? {
            return Err(Error::Domain(format!(
                "kR = {kr}: the series coefficients leave the floating-point range \
                 after order {}",
                interior.len().saturating_sub(1)
            )));
        }
        Ok(NeumannKernel {
            k,
            radius,
            params,
            scale,
            interior,
            boundary,
        })
    }

    pub fn wavenumber(&self) -> f64 {
        self.k
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn params(&self) -> &SeriesParams {
        &self.params
    }

    /// Highest order actually summed (at most `max_order`).
    pub fn order(&self) -> usize {
        self.interior.len() - 1
    }

    fn check_points(&self, x: Point, z: Point) -> Result<()> {
        let limit = self.radius * (1.0 + 1e-12);
        for p in [x, z] {
            if !p.is_finite() {
                return Err(Error::Invalid(format!("point {p} is not finite")));
            }
            if p.norm() > limit {
                return Err(Error::Invalid(format!(
                    "point {p} lies outside the disk of radius {}",
                    self.radius
                )));
            }
        }
        if x.norm() * z.norm() >= self.radius * self.radius * (1.0 - 1e-12) {
            return Err(Error::Invalid(format!(
                "points {x} and {z} both lie on the boundary"
            )));
        }
        Ok(())
    }

    /// `N(x, z; k)`; the disk's Neumann function is real.
    pub fn value(&self, x: Point, z: Point) -> Result<f64> {
        self.check_points(x, z)?;
        let r = x.distance(z);
        if r < 1e-12 * self.radius {
            return Err(Error::Coincident { distance: r });
        }
        let y0 = specfun::y_sequence(0, self.k * r)[0];
        Ok(-0.25 * y0 + self.series(x, z))
    }

    /// `N(x, z; k) + ln|x - z| / (2π)`, including the diagonal `x = z`.
    pub fn regular_value(&self, x: Point, z: Point) -> Result<f64> {
        self.check_points(x, z)?;
        Ok(self.smooth_free_space(x.distance(z))? + self.series(x, z))
    }

    /// `-Y0(kr)/4 + ln(r)/(2π)` written without the cancelling logarithms.
    fn smooth_free_space(&self, r: f64) -> Result<f64> {
        let kr = self.k * r;
        let j0 = specfun::j_sequence(0, kr)[0];
        let log_part = if r > 0.0 { r.ln() * (1.0 - j0) } else { 0.0 };
        Ok((log_part - (0.5 * self.k).ln() * j0) / TAU - 0.25 * specfun::y0_regular(kr)?)
    }

    fn series(&self, x: Point, z: Point) -> f64 {
        let order = self.order();
        let kr = self.k * self.radius;
        let ja = specfun::j_sequence(order, self.k * x.norm());
        let jb = specfun::j_sequence(order, self.k * z.norm());
        let dphi = x.angle() - z.angle();
        let q = x.norm() * z.norm() / (self.radius * self.radius);
        let mut sum = 0.0;
        for n in 0..=order {
            let weight = if n == 0 { 1.0 } else { 2.0 };
            let s = self.scale[n];
            let magnitude = weight * (ja[n] / s) * (jb[n] / s) * self.interior[n];
            sum += magnitude * (n as f64 * dphi).cos();
            if n as f64 > kr
                && magnitude.abs() <= self.params.tail_tolerance * sum.abs() * (1.0 - q)
            {
                break;
            }
        }
        0.25 * sum
    }

    /// `β_0 ..= β_order` for a source at distance `rho` from the center, so
    /// that `N(x, z) = Σ_{m ∈ Z} β_|m| e^{im(φx - φz)}` for `|x| = R`.
    pub fn boundary_coefficients(&self, rho: f64) -> Vec<f64> {
        let order = self.order();
        let jb = specfun::j_sequence(order, self.k * rho);
        (0..=order)
            .map(|m| jb[m] / self.scale[m] * self.boundary[m])
            .collect()
    }
}

/// `N(x, z; k)` on the disk of radius `R`, returned as a complex number
/// whose imaginary part is zero.
pub fn neumann_function(
    x: Point,
    z: Point,
    k: f64,
    radius: f64,
    params: &SeriesParams,
) -> Result<Complex64> {
    let kernel = NeumannKernel::new(k, radius, *params)?;
    Ok(Complex64::new(kernel.value(x, z)?, 0.0))
}

/// `ℛ(x, z; k) = N(x, z; k) + ln|x - z| / (2π)`, smooth across `x = z`.
pub fn regular_part(
    x: Point,
    z: Point,
    k: f64,
    radius: f64,
    params: &SeriesParams,
) -> Result<Complex64> {
    let kernel = NeumannKernel::new(k, radius, *params)?;
    Ok(Complex64::new(kernel.regular_value(x, z)?, 0.0))
}

/// Value of `ln|x - z| / (2π)`, the singular part removed by [`regular_part`].
pub fn log_singularity(x: Point, z: Point) -> f64 {
    x.distance(z).ln() / (2.0 * PI)
}
