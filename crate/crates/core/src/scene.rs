//! Physical configuration: medium, cracks, incident directions, boundary
//! sampling and the imaging raster, plus validation of the standing
//! assumptions (short cracks, separation, standoff from the boundary).

use std::f64::consts::{PI, TAU};
use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::Point;

/// Vacuum permittivity (F/m).
pub const VACUUM_PERMITTIVITY: f64 = 8.854e-12;
/// Vacuum permeability (H/m).
pub const VACUUM_PERMEABILITY: f64 = 4.0e-7 * PI;

/// Crack-to-boundary standoff as a fraction of the domain radius.
pub const STANDOFF_FRACTION: f64 = 0.1;
/// `k |x_m - x_m'|` below this is an error.
pub const SEPARATION_ERROR_BELOW: f64 = 0.25;
/// `k |x_m - x_m'|` below this (but above the error bound) is a warning.
pub const SEPARATION_WARN_BELOW: f64 = 5.0;

/// Permittivity, permeability and operating frequency of a lossless medium.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalMedium {
    permittivity: f64,
    permeability: f64,
    frequency: f64,
}

impl PhysicalMedium {
    pub fn new(permittivity: f64, permeability: f64, frequency: f64) -> Result<Self> {
        for (name, v) in [
            ("permittivity", permittivity),
            ("permeability", permeability),
            ("frequency", frequency),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Invalid(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        Ok(PhysicalMedium {
            permittivity,
            permeability,
            frequency,
        })
    }

    /// Free space (anechoic chamber) at the given frequency.
    pub fn vacuum(frequency: f64) -> Result<Self> {
        Self::new(VACUUM_PERMITTIVITY, VACUUM_PERMEABILITY, frequency)
    }

    /// The same medium with permittivity and permeability multiplied by the
    /// given ratios, e.g. the assumed medium `eps_a = ratio * eps_b`.
    pub fn scaled(&self, epsilon_ratio: f64, mu_ratio: f64) -> Result<Self> {
        Self::new(
            self.permittivity * epsilon_ratio,
            self.permeability * mu_ratio,
            self.frequency,
        )
    }

    pub fn permittivity(&self) -> f64 {
        self.permittivity
    }

    pub fn permeability(&self) -> f64 {
        self.permeability
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    /// `k = 2 pi f sqrt(eps mu)` in rad/m.
    pub fn wavenumber(&self) -> f64 {
        wavenumber(self)
    }

    pub fn wavelength(&self) -> f64 {
        TAU / self.wavenumber()
    }
}

pub fn wavenumber(medium: &PhysicalMedium) -> f64 {
    TAU * medium.frequency * (medium.permittivity * medium.permeability).sqrt()
}

/// A linear crack of length `2 * half_length` centered at `center`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Crack {
    center: Point,
    half_length: f64,
    angle: f64,
}

impl Crack {
    /// `angle` is in radians and is reduced to `[0, pi)`; a segment and its
    /// half-turn are the same crack.
    pub fn new(center: Point, half_length: f64, angle: f64) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::Invalid(format!(
                "crack center {center} is not finite"
            )));
        }
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(Error::Invalid(format!(
                "crack half-length must be finite and > 0, got {half_length}"
            )));
        }
        if !angle.is_finite() {
            return Err(Error::Invalid(format!("crack angle {angle} is not finite")));
        }
        let mut angle = angle.rem_euclid(PI);
        if angle >= PI {
            angle = 0.0;
        }
        Ok(Crack {
            center,
            half_length,
            angle,
        })
    }

    pub fn from_degrees(center: Point, half_length: f64, angle_deg: f64) -> Result<Self> {
        Self::new(center, half_length, angle_deg.to_radians())
    }

    pub fn center(&self) -> Point {
        self.center
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn endpoints(&self) -> (Point, Point) {
        let d = Point::from_polar(self.half_length, self.angle);
        (self.center - d, self.center + d)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scene {
    pub domain_radius: f64,
    pub cracks: Vec<Crack>,
    pub true_medium: PhysicalMedium,
}

impl Scene {
    pub fn new(
        domain_radius: f64,
        cracks: Vec<Crack>,
        true_medium: PhysicalMedium,
    ) -> Result<Self> {
        if !(domain_radius.is_finite() && domain_radius > 0.0) {
            return Err(Error::Invalid(format!(
                "domain radius must be finite and > 0, got {domain_radius}"
            )));
        }
        if cracks.is_empty() {
            return Err(Error::Invalid("a scene needs at least one crack".into()));
        }
        Ok(Scene {
            domain_radius,
            cracks,
            true_medium,
        })
    }

    pub fn wavenumber(&self) -> f64 {
        self.true_medium.wavenumber()
    }

    /// Fails with [`Error::Scene`] if validation reports any error.
    pub fn ensure_valid(&self) -> Result<()> {
        let errors: Vec<String> = validate_scene(self)
            .into_iter()
            .filter(|d| d.severity == Severity::Error)
            .map(|d| d.message)
            .collect();
        if errors.is_empty() {
            Ok(())
        } else {
            Err(Error::Scene(errors.join("; ")))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DiagnosticKind {
    /// Half-length not below half a wavelength.
    Length,
    /// `ln(l / 2) >= 0`, so the asymptotic amplitude `2 pi / ln(l / 2)` is
    /// meaningless.
    Amplitude,
    /// Crack endpoint closer to the boundary than the standoff.
    Standoff,
    /// Two crack centers too close in units of the wavelength.
    Separation,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub kind: DiagnosticKind,
    /// Crack indices involved (one, or two for separation).
    pub cracks: Vec<usize>,
    /// The checked quantity divided by its bound (length and standoff), or
    /// `k |x_m - x_m'|` for separation.
    pub ratio: f64,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{tag}: {}", self.message)
    }
}

/// Check the short-crack, separation and standoff assumptions.
///
/// Returns one diagnostic per violated condition; an empty list means the
/// scene satisfies all of them. The length bound is applied to the
/// half-length `l_m < lambda / 2`.
pub fn validate_scene(scene: &Scene) -> Vec<Diagnostic> {
    let k = scene.wavenumber();
    let lambda = TAU / k;
    let radius = scene.domain_radius;
    let standoff = STANDOFF_FRACTION * radius;
    let mut out = Vec::new();

    for (m, crack) in scene.cracks.iter().enumerate() {
        let ratio = crack.half_length / (0.5 * lambda);
        if ratio >= 1.0 {
            out.push(Diagnostic {
                severity: Severity::Error,
                kind: DiagnosticKind::Length,
                cracks: vec![m],
                ratio,
                message: format!(
                    "crack {m}: half-length {} m is not below lambda/2 = {} m (ratio {ratio:.3})",
                    crack.half_length,
                    0.5 * lambda
                ),
            });
        }
        if crack.half_length >= 2.0 {
            out.push(Diagnostic {
                severity: Severity::Error,
                kind: DiagnosticKind::Amplitude,
                cracks: vec![m],
                ratio: crack.half_length / 2.0,
                message: format!(
                    "crack {m}: half-length {} m gives ln(l/2) >= 0",
                    crack.half_length
                ),
            });
        }
        let (a, b) = crack.endpoints();
        let clearance = radius - a.norm().max(b.norm());
        if clearance < standoff {
            out.push(Diagnostic {
                severity: Severity::Error,
                kind: DiagnosticKind::Standoff,
                cracks: vec![m],
                ratio: clearance / standoff,
                message: format!(
                    "crack {m}: endpoint clearance {clearance:.4} m to the boundary is below the standoff {standoff} m"
                ),
            });
        }
    }

    for m in 0..scene.cracks.len() {
        for n in m + 1..scene.cracks.len() {
            let kd = k * scene.cracks[m].center.distance(scene.cracks[n].center);
            let severity = if kd <= SEPARATION_ERROR_BELOW {
                Severity::Error
            } else if kd < SEPARATION_WARN_BELOW {
                Severity::Warning
            } else {
                continue;
            };
            out.push(Diagnostic {
                severity,
                kind: DiagnosticKind::Separation,
                cracks: vec![m, n],
                ratio: kd,
                message: format!("cracks {m} and {n}: k|x_m - x_m'| = {kd:.3}"),
            });
        }
    }
    out
}

/// Incident plane-wave directions `theta_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionSet {
    directions: Vec<Point>,
}

impl DirectionSet {
    pub fn count(&self) -> usize {
        self.directions.len()
    }

    pub fn directions(&self) -> &[Point] {
        &self.directions
    }
}

/// `theta_n = (cos 2(n-1)pi/N, sin 2(n-1)pi/N)`, `n = 1..=N`.
pub fn uniform_directions(count: usize) -> Result<DirectionSet> {
    if count == 0 {
        return Err(Error::Invalid(
            "at least one incident direction is required".into(),
        ));
    }
    let directions = (0..count)
        .map(|n| Point::from_polar(1.0, TAU * n as f64 / count as f64))
        .collect();
    Ok(DirectionSet { directions })
}

/// Equispaced nodes on the circle `|x| = R` starting at angle 0, with equal
/// arc-length weights `2 pi R / P` (the periodic trapezoidal rule).
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryGrid {
    radius: f64,
    nodes: Vec<Point>,
    weights: Vec<f64>,
}

impl BoundaryGrid {
    pub const MIN_NODES: usize = 8;
    pub const DEFAULT_NODES: usize = 256;

    pub fn uniform(radius: f64, node_count: usize) -> Result<Self> {
        if node_count < Self::MIN_NODES {
            return Err(Error::Invalid(format!(
                "boundary grid needs at least {} nodes, got {node_count}",
                Self::MIN_NODES
            )));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::Invalid(format!(
                "radius must be finite and > 0, got {radius}"
            )));
        }
        let nodes = (0..node_count)
            .map(|p| Point::from_polar(radius, TAU * p as f64 / node_count as f64))
            .collect();
        let weights = vec![TAU * radius / node_count as f64; node_count];
        Ok(BoundaryGrid {
            radius,
            nodes,
            weights,
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Arc length between neighboring nodes.
    pub fn spacing(&self) -> f64 {
        TAU * self.radius / self.nodes.len() as f64
    }

    /// Polar angle of node `p`.
    pub fn node_angle(&self, p: usize) -> f64 {
        TAU * p as f64 / self.nodes.len() as f64
    }
}

/// Square raster over `[-R, R]^2` with `resolution` points per axis; points
/// outside the open disk are masked out.
///
/// Cell `(i, j)` sits at `x = -R + 2R i / (res - 1)`, `y = -R + 2R j / (res - 1)`
/// and is stored at index `j * res + i`.
#[derive(Clone, Debug, PartialEq)]
pub struct ImagingGrid {
    radius: f64,
    resolution: usize,
    mask: Vec<bool>,
}

impl ImagingGrid {
    pub const DEFAULT_RESOLUTION: usize = 201;

    pub fn new(radius: f64, resolution: usize) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::Invalid(format!(
                "imaging grid resolution must be >= 2, got {resolution}"
            )));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::Invalid(format!(
                "radius must be finite and > 0, got {radius}"
            )));
        }
        let mut grid = ImagingGrid {
            radius,
            resolution,
            mask: Vec::new(),
        };
        grid.mask = (0..resolution * resolution)
            .map(|idx| grid.point(idx).norm() < radius)
            .collect();
        Ok(grid)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.resolution * self.resolution
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.radius / (self.resolution - 1) as f64
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        -self.radius + self.spacing() * i as f64
    }

    pub fn point(&self, index: usize) -> Point {
        let (i, j) = (index % self.resolution, index / self.resolution);
        Point::new(self.coordinate(i), self.coordinate(j))
    }

    /// `true` for points strictly inside the disk.
    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn is_inside(&self, index: usize) -> bool {
        self.mask[index]
    }

    /// Index of the raster point nearest to `p` (clamped to the square).
    pub fn nearest_index(&self, p: Point) -> usize {
        let h = self.spacing();
        let last = (self.resolution - 1) as f64;
        let i = ((p.x + self.radius) / h).round().clamp(0.0, last) as usize;
        let j = ((p.y + self.radius) / h).round().clamp(0.0, last) as usize;
        j * self.resolution + i
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.len()).map(|idx| self.point(idx))
    }
}
