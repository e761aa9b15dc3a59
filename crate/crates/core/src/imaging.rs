//! Adjoint field, topological-derivative raster and its normalization.
//!
//! The adjoint field is the boundary integral
//! `v_n(z) = ∫ d_n(x) N(x, z; k_a) ds(x)` evaluated with the periodic
//! trapezoidal rule on the data's boundary grid. Because `N(·, z)` on the
//! circle is a Fourier series with coefficients `β_|m|(|z|)`, the rule is
//! evaluated exactly (aliasing included) from the FFT of each data row:
//!
//! ```text
//! v_n(z) = 2πR Σ_{|m| <= M} β_|m| e^{-imφz} D_n[m mod P],
//! D_n[j] = (1/P) Σ_p d(n, p) e^{2πi jp / P}
//! ```

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::forward::{plane_wave, BoundaryDataSet};
use crate::geometry::Point;
use crate::greens::{NeumannKernel, SeriesParams};
use crate::scene::ImagingGrid;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MapKind {
    /// `d_T E(z; k_a)`.
    RawTd,
    /// `|d_T E| / max |d_T E|`.
    Normalized,
    /// `|Φ| / max |Φ|`.
    PhiPredictor,
}

impl MapKind {
    pub fn label(self) -> &'static str {
        match self {
            MapKind::RawTd => "raw_td",
            MapKind::Normalized => "normalized",
            MapKind::PhiPredictor => "phi_predictor",
        }
    }
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Real values on an [`ImagingGrid`]; cells that are outside the disk or
/// failed to evaluate are masked and hold 0.
#[derive(Clone, Debug, PartialEq)]
pub struct ImagingMap {
    grid: ImagingGrid,
    values: Vec<f64>,
    mask: Vec<bool>,
    kind: MapKind,
    assumed_wavenumber: f64,
}

impl ImagingMap {
    /// `mask[i] == false` forces `values[i]` to 0.
    pub fn new(
        grid: ImagingGrid,
        mut values: Vec<f64>,
        mask: Vec<bool>,
        kind: MapKind,
        assumed_wavenumber: f64,
    ) -> Result<Self> {
        if values.len() != grid.len() || mask.len() != grid.len() {
            return Err(Error::Invalid(format!(
                "map has {} values and {} mask flags for a grid of {} cells",
                values.len(),
                mask.len(),
                grid.len()
            )));
        }
        for (v, &m) in values.iter_mut().zip(&mask) {
            if !m {
                *v = 0.0;
            } else if !v.is_finite() {
                return Err(Error::Invalid("map values must be finite".into()));
            }
        }
        Ok(ImagingMap {
            grid,
            values,
            mask,
            kind,
            assumed_wavenumber,
        })
    }

    pub fn grid(&self) -> &ImagingGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    pub fn assumed_wavenumber(&self) -> f64 {
        self.assumed_wavenumber
    }

    pub fn masked_count(&self) -> usize {
        self.mask.iter().filter(|m| !**m).count()
    }

    /// Value at the grid cell nearest to `p`, `None` if that cell is masked.
    pub fn value_near(&self, p: Point) -> Option<f64> {
        let idx = self.grid.nearest_index(p);
        self.mask[idx].then(|| self.values[idx])
    }

    /// Index of the largest `|value|` over unmasked cells (first in index
    /// order on ties).
    pub fn argmax_abs(&self) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, (&v, &m)) in self.values.iter().zip(&self.mask).enumerate() {
            if m && best.is_none_or(|(_, b)| v.abs() > b) {
                best = Some((i, v.abs()));
            }
        }
        best.map(|(i, _)| i)
    }

    /// `x,y,value` rows for every grid cell; masked cells are written as 0.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(["x", "y", "value"])?;
        for (i, v) in self.values.iter().enumerate() {
            let p = self.grid.point(i);
            out.write_record([
                format!("{:.12e}", p.x),
                format!("{:.12e}", p.y),
                format!("{:.16e}", v),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    /// Binary 8-bit PGM: value 0 maps to black and 1 to white (values are
    /// clamped to `[0, 1]`); the top image row is `y = +R`.
    pub fn write_pgm<W: Write>(&self, mut writer: W) -> Result<()> {
        let res = self.grid.resolution();
        write!(writer, "P5\n{res} {res}\n255\n")?;
        let mut row = vec![0u8; res];
        for j in (0..res).rev() {
            for (i, px) in row.iter_mut().enumerate() {
                let v = self.values[j * res + i];
                *px = (v.clamp(0.0, 1.0) * 255.0).round() as u8;
            }
            writer.write_all(&row)?;
        }
        writer.flush()?;
        Ok(())
    }

    /// `key=value` metadata describing the raster and how it was produced.
    pub fn write_sidecar<W: Write>(
        &self,
        mut writer: W,
        true_wavenumber: f64,
        seed: Option<u64>,
    ) -> Result<()> {
        let g = &self.grid;
        writeln!(writer, "kind={}", self.kind)?;
        writeln!(writer, "k={:.16e}", true_wavenumber)?;
        writeln!(writer, "k_a={:.16e}", self.assumed_wavenumber)?;
        writeln!(writer, "radius={:.16e}", g.radius())?;
        writeln!(writer, "resolution={}", g.resolution())?;
        writeln!(writer, "spacing={:.16e}", g.spacing())?;
        writeln!(writer, "extent=[-R,R]x[-R,R]")?;
        writeln!(writer, "masked_cells={}", self.masked_count())?;
        writeln!(writer, "masked_value=0")?;
        match seed {
            Some(s) => writeln!(writer, "seed={s}")?,
            None => writeln!(writer, "seed=none")?,
        }
        writeln!(
            writer,
            "pgm=linear 0->0 1->255, clamped to [0,1], first row y=+R, first column x=-R"
        )?;
        writer.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        self.write_csv(BufWriter::new(File::create(path)?))
    }

    pub fn save_pgm(&self, path: &Path) -> Result<()> {
        self.write_pgm(BufWriter::new(File::create(path)?))
    }
}

/// Back-propagation of one data set at an assumed wavenumber.
#[derive(Clone, Debug)]
pub struct AdjointOperator {
    kernel: NeumannKernel,
    radius: f64,
    node_count: usize,
    directions: Vec<Point>,
    /// One spectrum `D_n[0..P]` per direction.
    spectra: Vec<Vec<Complex64>>,
}

impl AdjointOperator {
    pub fn new(data: &BoundaryDataSet, k_a: f64, params: &SeriesParams) -> Result<Self> {
        let radius = data.grid().radius();
        let kernel = NeumannKernel::new(k_a, radius, *params)?;
        let p = data.cols();
        let fft = FftPlanner::new().plan_fft_inverse(p);
        let scale = 1.0 / p as f64;
        let spectra = (0..data.rows())
            .map(|n| {
                let mut row = data.row(n).to_vec();
                fft.process(&mut row);
                row.iter_mut().for_each(|v| *v *= scale);
                row
            })
            .collect();
        Ok(AdjointOperator {
            kernel,
            radius,
            node_count: p,
            directions: data.directions().directions().to_vec(),
            spectra,
        })
    }

    pub fn assumed_wavenumber(&self) -> f64 {
        self.kernel.wavenumber()
    }

    /// Minimum distance from the boundary accepted for `z`: one node spacing.
    pub fn boundary_guard(&self) -> f64 {
        std::f64::consts::TAU * self.radius / self.node_count as f64
    }

    fn check(&self, z: Point) -> Result<()> {
        let distance = self.radius - z.norm();
        let required = self.boundary_guard();
        if !z.is_finite() || distance < required {
            return Err(Error::NearBoundary {
                x: z.x,
                y: z.y,
                distance,
                required,
            });
        }
        Ok(())
    }

    /// `v_n(z)` for every direction `n`.
    pub fn field(&self, z: Point) -> Result<Vec<Complex64>> {
        self.check(z)?;
        let beta = self.kernel.boundary_coefficients(z.norm());
        let phi = z.angle();
        let p = self.node_count;
        let turns: Vec<Complex64> = (1..beta.len())
            .map(|m| Complex64::cis(-(m as f64) * phi))
            .collect();
        let factor = std::f64::consts::TAU * self.radius;
        Ok(self
            .spectra
            .iter()
            .map(|spec| {
                let mut acc = spec[0] * beta[0];
                for (m, (b, t)) in (1..).zip(beta[1..].iter().zip(&turns)) {
                    let plus = spec[m % p] * t;
                    let minus = spec[(p - m % p) % p] * t.conj();
                    acc += (plus + minus) * *b;
                }
                acc * factor
            })
            .collect())
    }

    /// `Re Σ_n v_n(z) conj(exp(i k_a θ_n·z))`.
    pub fn td_value(&self, z: Point) -> Result<f64> {
        let k_a = self.kernel.wavenumber();
        let v = self.field(z)?;
        Ok(v.iter()
            .zip(&self.directions)
            .map(|(vn, theta)| (vn * plane_wave(z, k_a, *theta).conj()).re)
            .sum())
    }
}

/// Component `n` is `Σ_p w_p d(n, p) N(x_p, z; k_a)`.
pub fn adjoint_field(
    data: &BoundaryDataSet,
    z: Point,
    k_a: f64,
    params: &SeriesParams,
) -> Result<Vec<Complex64>> {
    AdjointOperator::new(data, k_a, params)?.field(z)
}

/// Raw topological derivative on every cell of `grid`. Cells where the
/// adjoint cannot be evaluated (too close to the boundary) are masked.
pub fn td_map(
    data: &BoundaryDataSet,
    grid: &ImagingGrid,
    k_a: f64,
    params: &SeriesParams,
) -> Result<ImagingMap> {
    if (grid.radius() - data.grid().radius()).abs() > 1e-12 * grid.radius() {
        return Err(Error::Invalid(format!(
            "imaging grid radius {} differs from the data radius {}",
            grid.radius(),
            data.grid().radius()
        )));
    }
    let op = AdjointOperator::new(data, k_a, params)?;
    let cells: Vec<Option<f64>> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            if grid.is_inside(i) {
                op.td_value(grid.point(i)).ok()
            } else {
                None
            }
        })
        .collect();
    let mask = cells.iter().map(Option::is_some).collect();
    let values = cells.iter().map(|c| c.unwrap_or(0.0)).collect();
    ImagingMap::new(grid.clone(), values, mask, MapKind::RawTd, k_a)
}

/// `|raw| / max |raw|` over unmasked cells.
pub fn normalize(map: &ImagingMap) -> Result<ImagingMap> {
    if map.kind != MapKind::RawTd {
        return Err(Error::Invalid(format!(
            "cannot normalize a {} map",
            map.kind
        )));
    }
    let mut out = normalized_magnitude(map)?;
    out.kind = MapKind::Normalized;
    Ok(out)
}

pub(crate) fn normalized_magnitude(map: &ImagingMap) -> Result<ImagingMap> {
    let peak = map
        .values
        .iter()
        .zip(&map.mask)
        .filter(|(_, m)| **m)
        .map(|(v, _)| v.abs())
        .fold(0.0, f64::max);
    if peak == 0.0 {
        return Err(Error::Invalid("cannot normalize an all-zero map".into()));
    }
    let mut out = map.clone();
    for v in &mut out.values {
        *v = v.abs() / peak;
    }
    Ok(out)
}
