//! Boundary data synthesis and noise injection.
//!
//! Data are generated from the small-crack expansion
//! `u(x) - w(x) ≈ Σ_m 2π / ln(ℓ_m / 2) · w(x_m) · N(x, x_m; k)` for `x` on
//! the boundary; the `O(1 / ln² ℓ)` remainder is not modelled. Noise is
//! added to this difference, not to the total field.

use std::f64::consts::TAU;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::greens::{NeumannKernel, SeriesParams};
use crate::scene::{uniform_directions, BoundaryGrid, DirectionSet, Scene};

/// `exp(i k θ·x)`.
pub fn plane_wave(x: Point, k: f64, direction: Point) -> Complex64 {
    Complex64::cis(k * direction.dot(x))
}

/// Measured field differences, one row per incident direction and one
/// column per boundary node.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryDataSet {
    values: Vec<Complex64>,
    grid: BoundaryGrid,
    directions: DirectionSet,
    true_wavenumber: f64,
}

impl BoundaryDataSet {
    /// `values` is row-major: entry `(n, p)` at `n * P + p`.
    pub fn new(
        values: Vec<Complex64>,
        grid: BoundaryGrid,
        directions: DirectionSet,
        true_wavenumber: f64,
    ) -> Result<Self> {
        let expected = directions.count() * grid.node_count();
        if values.len() != expected {
            return Err(Error::Invalid(format!(
                "data has {} entries, expected {} x {} = {expected}",
                values.len(),
                directions.count(),
                grid.node_count()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Invalid(format!("data entry {i} is not finite")));
        }
        if !(true_wavenumber.is_finite() && true_wavenumber > 0.0) {
            return Err(Error::Invalid(format!(
                "wavenumber must be finite and > 0, got {true_wavenumber}"
            )));
        }
        Ok(BoundaryDataSet {
            values,
            grid,
            directions,
            true_wavenumber,
        })
    }

    pub fn rows(&self) -> usize {
        self.directions.count()
    }

    pub fn cols(&self) -> usize {
        self.grid.node_count()
    }

    pub fn get(&self, n: usize, p: usize) -> Complex64 {
        self.values[n * self.cols() + p]
    }

    pub fn row(&self, n: usize) -> &[Complex64] {
        let p = self.cols();
        &self.values[n * p..(n + 1) * p]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn grid(&self) -> &BoundaryGrid {
        &self.grid
    }

    pub fn directions(&self) -> &DirectionSet {
        &self.directions
    }

    pub fn true_wavenumber(&self) -> f64 {
        self.true_wavenumber
    }

    /// Mean of `|d(n, p)|²`.
    pub fn mean_power(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.values.len() as f64
    }

    /// Every entry multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= factor;
        }
        out
    }

    /// Entry-wise sum of two data sets on the same grid and directions.
    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid || self.directions != other.directions {
            return Err(Error::Invalid("data sets are sampled differently".into()));
        }
        let mut out = self.clone();
        for (a, b) in out.values.iter_mut().zip(&other.values) {
            *a += b;
        }
        Ok(out)
    }

    /// CSV with a metadata line `N=..,P=..,k=..,R=..`, a header line and one
    /// row `n,p,node_x,node_y,re,im` per entry (0-based indices, 17
    /// significant digits).
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new().flexible(true).from_writer(writer);
        out.write_record([
            format!("N={}", self.rows()),
            format!("P={}", self.cols()),
            format!("k={:.16e}", self.true_wavenumber),
            format!("R={:.16e}", self.grid.radius()),
        ])?;
        out.write_record(["n", "p", "node_x", "node_y", "re", "im"])?;
        for n in 0..self.rows() {
            for (p, node) in self.grid.nodes().iter().enumerate() {
                let v = self.get(n, p);
                out.write_record([
                    n.to_string(),
                    p.to_string(),
                    format!("{:.16e}", node.x),
                    format!("{:.16e}", node.y),
                    format!("{:.16e}", v.re),
                    format!("{:.16e}", v.im),
                ])?;
            }
        }
        out.flush()?;
        Ok(())
    }

    /// Inverse of [`write_csv`](Self::write_csv). Directions are taken to be
    /// the uniform set of size `N`; node coordinates must match the uniform
    /// grid of `P` nodes on the circle of radius `R`.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut records = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(reader)
            .into_records();

        let meta = records
            .next()
            .ok_or_else(|| Error::parse(1, "missing metadata line"))??;
        let (rows, cols, k, radius) = parse_metadata(&meta)?;

        let header = records
            .next()
            .ok_or_else(|| Error::parse(2, "missing column header"))??;
        let expected_header = ["n", "p", "node_x", "node_y", "re", "im"];
        if header.len() != expected_header.len()
            || header
                .iter()
                .zip(expected_header)
                .any(|(a, b)| a.trim() != b)
        {
            return Err(Error::parse(2, "expected header n,p,node_x,node_y,re,im"));
        }

        let total = rows
            .checked_mul(cols)
            .ok_or_else(|| Error::parse(1, "N x P overflows"))?;
        let mut entries = Vec::new();
        for (i, record) in records.enumerate() {
            let line = i + 3;
            let record = record?;
            if record.len() != 6 {
                return Err(Error::parse(
                    line,
                    format!("expected 6 fields, got {}", record.len()),
                ));
            }
            if entries.len() == total {
                return Err(Error::parse(
                    line,
                    format!("more than N x P = {total} data rows"),
                ));
            }
            let n: usize = parse_field(&record[0], line, "n")?;
            let p: usize = parse_field(&record[1], line, "p")?;
            let node_x: f64 = parse_field(&record[2], line, "node_x")?;
            let node_y: f64 = parse_field(&record[3], line, "node_y")?;
            let re: f64 = parse_field(&record[4], line, "re")?;
            let im: f64 = parse_field(&record[5], line, "im")?;
            entries.push((
                line,
                n,
                p,
                Point::new(node_x, node_y),
                Complex64::new(re, im),
            ));
        }
        if entries.len() != total {
            return Err(Error::parse(
                entries.len() + 3,
                format!(
                    "expected N x P = {total} data rows, found {}",
                    entries.len()
                ),
            ));
        }

        let grid =
            BoundaryGrid::uniform(radius, cols).map_err(|e| Error::parse(1, e.to_string()))?;
        let directions = uniform_directions(rows).map_err(|e| Error::parse(1, e.to_string()))?;
        let mut values = vec![Complex64::new(0.0, 0.0); total];
        let mut seen = vec![false; total];
        for (line, n, p, node, v) in entries {
            if n >= rows || p >= cols {
                return Err(Error::parse(line, format!("index ({n}, {p}) out of range")));
            }
            let slot = n * cols + p;
            if seen[slot] {
                return Err(Error::parse(line, format!("duplicate entry ({n}, {p})")));
            }
            if node.distance(grid.nodes()[p]) > 1e-9 * radius {
                return Err(Error::parse(
                    line,
                    format!("node {node} does not match boundary node {p}"),
                ));
            }
            if !v.is_finite() {
                return Err(Error::parse(line, "non-finite value"));
            }
            seen[slot] = true;
            values[slot] = v;
        }
        BoundaryDataSet::new(values, grid, directions, k)
            .map_err(|e| Error::parse(1, e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.write_csv(BufWriter::new(File::create(path)?))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_csv(BufReader::new(File::open(path)?))
    }
}

fn parse_field<T: std::str::FromStr>(text: &str, line: usize, name: &str) -> Result<T> {
    text.trim()
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid {name} `{text}`")))
}

fn parse_metadata(record: &csv::StringRecord) -> Result<(usize, usize, f64, f64)> {
    let mut rows = None;
    let mut cols = None;
    let mut k = None;
    let mut radius = None;
    for field in record {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| Error::parse(1, format!("expected key=value, got `{field}`")))?;
        match key.trim() {
            "N" => rows = Some(parse_field::<usize>(value, 1, "N")?),
            "P" => cols = Some(parse_field::<usize>(value, 1, "P")?),
            "k" => k = Some(parse_field::<f64>(value, 1, "k")?),
            "R" => radius = Some(parse_field::<f64>(value, 1, "R")?),
            other => return Err(Error::parse(1, format!("unknown metadata key `{other}`"))),
        }
    }
    match (rows, cols, k, radius) {
        (Some(n), Some(p), Some(k), Some(r)) => Ok((n, p, k, r)),
        _ => Err(Error::parse(1, "metadata needs N, P, k and R")),
    }
}

/// Scattering amplitude `2π / ln(ℓ / 2)` of a crack with half-length `ℓ`.
pub fn crack_amplitude(half_length: f64) -> f64 {
    TAU / (0.5 * half_length).ln()
}

/// Entry `(n, p)` is `Σ_m 2π / ln(ℓ_m / 2) · exp(ik θ_n·x_m) · N(x_p, x_m; k)`
/// at the true wavenumber of the scene.
pub fn synthesize_data(
    scene: &Scene,
    directions: &DirectionSet,
    grid: &BoundaryGrid,
    params: &SeriesParams,
) -> Result<BoundaryDataSet> {
    scene.ensure_valid()?;
    if (grid.radius() - scene.domain_radius).abs() > 1e-12 * scene.domain_radius {
        return Err(Error::Invalid(format!(
            "boundary grid radius {} differs from the domain radius {}",
            grid.radius(),
            scene.domain_radius
        )));
    }
    let k = scene.wavenumber();
    let kernel = NeumannKernel::new(k, scene.domain_radius, *params)?;

    // N(x_p, x_m) for every crack and node
    let mut green = Vec::with_capacity(scene.cracks.len());
    for crack in &scene.cracks {
        let column = grid
            .nodes()
            .iter()
            .map(|&x| kernel.value(x, crack.center()))
            .collect::<Result<Vec<f64>>>()?;
        green.push(column);
    }

    let cols = grid.node_count();
    let mut values = vec![Complex64::new(0.0, 0.0); directions.count() * cols];
    for (n, theta) in directions.directions().iter().enumerate() {
        let row = &mut values[n * cols..(n + 1) * cols];
        for (crack, column) in scene.cracks.iter().zip(&green) {
            let weight =
                crack_amplitude(crack.half_length()) * plane_wave(crack.center(), k, *theta);
            for (v, g) in row.iter_mut().zip(column) {
                *v += weight * *g;
            }
        }
    }
    BoundaryDataSet::new(values, grid.clone(), directions.clone(), k)
}

/// Add circular complex Gaussian noise at the given signal-to-noise ratio.
///
/// The per-entry noise variance is `σ² = mean|d|² · 10^(-snr_db / 10)`,
/// split evenly between real and imaginary parts. Samples come from
/// `ChaCha20Rng::seed_from_u64(seed)`, drawn in row-major entry order, real
/// part before imaginary part. `snr_db = +∞` returns the data unchanged.
pub fn add_noise(data: &BoundaryDataSet, snr_db: f64, seed: u64) -> Result<BoundaryDataSet> {
    if snr_db == f64::INFINITY {
        return Ok(data.clone());
    }
    if !snr_db.is_finite() {
        return Err(Error::Invalid(format!(
            "SNR must be finite or +inf, got {snr_db}"
        )));
    }
    let power = data.mean_power();
    if power == 0.0 {
        return Err(Error::Invalid("SNR is undefined for all-zero data".into()));
    }
    let sigma = (0.5 * power * 10f64.powf(-snr_db / 10.0)).sqrt();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut out = data.clone();
    for v in &mut out.values {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        *v += Complex64::new(sigma * re, sigma * im);
    }
    Ok(out)
}

/// `10 log10(Σ|clean|² / Σ|noisy - clean|²)`.
pub fn measured_snr_db(clean: &BoundaryDataSet, noisy: &BoundaryDataSet) -> Result<f64> {
    if clean.values.len() != noisy.values.len() {
        return Err(Error::Invalid("data sets differ in size".into()));
    }
    let signal: f64 = clean.values.iter().map(|v| v.norm_sqr()).sum();
    let noise: f64 = clean
        .values
        .iter()
        .zip(&noisy.values)
        .map(|(a, b)| (b - a).norm_sqr())
        .sum();
    Ok(10.0 * (signal / noise).log10())
}
