//! Experiment configuration: a flat `key = value` text format with one
//! `[crack]` block per crack.
//!
//! ```text
//! # free-space disk probed at 875 MHz
//! frequency = 875e6
//! radius = 1
//! directions = 32
//! boundary_nodes = 256
//! grid_resolution = 201
//! epsilon_ratios = 0.6, 1, 2
//! mu_ratio = 1
//! snr_db = 20
//! seed = 1
//! outputs = csv, pgm, peaks
//!
//! [crack]
//! center_x = 0
//! center_y = 0
//! half_length = 0.03
//! angle_deg = 0
//! ```
//!
//! Lengths are in meters, the frequency in Hz and angles in degrees.
//! `snr_db = none` disables noise.

use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use tdcrack::scene::{Crack, PhysicalMedium, Scene, VACUUM_PERMEABILITY, VACUUM_PERMITTIVITY};
use tdcrack::Point;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

fn syntax(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError::Syntax {
        line,
        message: message.into(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrackSpec {
    pub center_x: f64,
    pub center_y: f64,
    pub half_length: f64,
    pub angle_deg: f64,
}

impl CrackSpec {
    pub fn new(center_x: f64, center_y: f64, half_length: f64, angle_deg: f64) -> Self {
        CrackSpec {
            center_x,
            center_y,
            half_length,
            angle_deg,
        }
    }

    pub fn to_crack(&self) -> tdcrack::Result<Crack> {
        Crack::from_degrees(
            Point::new(self.center_x, self.center_y),
            self.half_length,
            self.angle_deg,
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OutputKind {
    Csv,
    Pgm,
    Peaks,
}

impl OutputKind {
    pub const ALL: [OutputKind; 3] = [OutputKind::Csv, OutputKind::Pgm, OutputKind::Peaks];

    fn name(self) -> &'static str {
        match self {
            OutputKind::Csv => "csv",
            OutputKind::Pgm => "pgm",
            OutputKind::Peaks => "peaks",
        }
    }
}

impl FromStr for OutputKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(OutputKind::Csv),
            "pgm" => Ok(OutputKind::Pgm),
            "peaks" => Ok(OutputKind::Peaks),
            other => Err(format!(
                "unknown output `{other}` (expected csv, pgm or peaks)"
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub radius: f64,
    pub frequency: f64,
    pub permittivity: f64,
    pub permeability: f64,
    pub cracks: Vec<CrackSpec>,
    pub directions: usize,
    pub boundary_nodes: usize,
    pub grid_resolution: usize,
    /// `ε_a / ε_b` values to image with; one set of outputs per entry.
    pub epsilon_ratios: Vec<f64>,
    /// `μ_a / μ_b`.
    pub mu_ratio: f64,
    /// `None` disables noise.
    pub snr_db: Option<f64>,
    pub seed: u64,
    pub outputs: Vec<OutputKind>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            radius: 1.0,
            frequency: 875e6,
            permittivity: VACUUM_PERMITTIVITY,
            permeability: VACUUM_PERMEABILITY,
            cracks: Vec::new(),
            directions: 32,
            boundary_nodes: 256,
            grid_resolution: 201,
            epsilon_ratios: vec![1.0],
            mu_ratio: 1.0,
            snr_db: Some(20.0),
            seed: 1,
            outputs: OutputKind::ALL.to_vec(),
        }
    }
}

pub const MIN_RESOLUTION: usize = 33;

impl ExperimentConfig {
    /// Parse without range validation; see [`validate`](Self::validate).
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut config = ExperimentConfig::default();
        let mut seen: Vec<&'static str> = Vec::new();
        let mut cracks: Vec<(usize, PartialCrack)> = Vec::new();

        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if content.starts_with('[') {
                if content != "[crack]" {
                    return Err(syntax(line, format!("unknown section `{content}`")));
                }
                cracks.push((line, PartialCrack::default()));
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| syntax(line, format!("expected `key = value`, got `{content}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if value.is_empty() {
                return Err(syntax(line, format!("`{key}` has no value")));
            }
            if let Some((_, crack)) = cracks.last_mut() {
                crack.set(key, value, line)?;
                continue;
            }
            let canonical = config.set(key, value, line)?;
            if seen.contains(&canonical) {
                return Err(syntax(line, format!("`{key}` given twice")));
            }
            seen.push(canonical);
        }

        config.cracks = cracks
            .into_iter()
            .map(|(line, c)| c.finish(line))
            .collect::<Result<_, _>>()?;
        Ok(config)
    }

    fn set(&mut self, key: &str, value: &str, line: usize) -> Result<&'static str, ConfigError> {
        let canonical = match key {
            "radius" => {
                self.radius = number(value, line)?;
                "radius"
            }
            "frequency" => {
                self.frequency = number(value, line)?;
                "frequency"
            }
            "permittivity" => {
                self.permittivity = number(value, line)?;
                "permittivity"
            }
            "permeability" => {
                self.permeability = number(value, line)?;
                "permeability"
            }
            "directions" => {
                self.directions = integer(value, line)?;
                "directions"
            }
            "boundary_nodes" => {
                self.boundary_nodes = integer(value, line)?;
                "boundary_nodes"
            }
            "grid_resolution" => {
                self.grid_resolution = integer(value, line)?;
                "grid_resolution"
            }
            "epsilon_ratios" | "epsilon_ratio" => {
                self.epsilon_ratios = list(value, line)?;
                "epsilon_ratios"
            }
            "mu_ratio" => {
                self.mu_ratio = number(value, line)?;
                "mu_ratio"
            }
            "snr_db" => {
                self.snr_db = match value {
                    "none" | "inf" => None,
                    v => Some(number(v, line)?),
                };
                "snr_db"
            }
            "seed" => {
                self.seed = integer(value, line)?;
                "seed"
            }
            "outputs" => {
                self.outputs = if value == "none" {
                    Vec::new()
                } else {
                    let mut outputs = Vec::new();
                    for item in value.split(',') {
                        let kind: OutputKind =
                            item.trim().parse().map_err(|e: String| syntax(line, e))?;
                        if !outputs.contains(&kind) {
                            outputs.push(kind);
                        }
                    }
                    outputs
                };
                "outputs"
            }
            other => return Err(syntax(line, format!("unknown key `{other}`"))),
        };
        Ok(canonical)
    }

    /// Range checks on every field, then the scene's own validation.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = [
            ("radius", self.radius),
            ("frequency", self.frequency),
            ("permittivity", self.permittivity),
            ("permeability", self.permeability),
            ("mu_ratio", self.mu_ratio),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(ConfigError::Invalid(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        if self.epsilon_ratios.is_empty() {
            return Err(ConfigError::Invalid("epsilon_ratios is empty".into()));
        }
        if let Some(r) = self
            .epsilon_ratios
            .iter()
            .find(|r| !(r.is_finite() && **r > 0.0))
        {
            return Err(ConfigError::Invalid(format!(
                "epsilon ratio must be finite and > 0, got {r}"
            )));
        }
        if self.directions < 1 {
            return Err(ConfigError::Invalid("directions must be >= 1".into()));
        }
        if self.boundary_nodes < 8 {
            return Err(ConfigError::Invalid(format!(
                "boundary_nodes must be >= 8, got {}",
                self.boundary_nodes
            )));
        }
        if self.grid_resolution < MIN_RESOLUTION {
            return Err(ConfigError::Invalid(format!(
                "grid_resolution must be >= {MIN_RESOLUTION}, got {}",
                self.grid_resolution
            )));
        }
        if let Some(snr) = self.snr_db {
            if !snr.is_finite() {
                return Err(ConfigError::Invalid(format!(
                    "snr_db must be finite or none, got {snr}"
                )));
            }
        }
        if self.cracks.is_empty() {
            return Err(ConfigError::Invalid(
                "at least one [crack] block is required".into(),
            ));
        }
        self.scene()?
            .ensure_valid()
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn medium(&self) -> Result<PhysicalMedium, ConfigError> {
        PhysicalMedium::new(self.permittivity, self.permeability, self.frequency)
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn scene(&self) -> Result<Scene, ConfigError> {
        let cracks = self
            .cracks
            .iter()
            .map(CrackSpec::to_crack)
            .collect::<tdcrack::Result<Vec<_>>>()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Scene::new(self.radius, cracks, self.medium()?)
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let config = Self::parse(&text)?;
        config.validate()?;
        Ok(config)
    }
}

/// Emits text that [`ExperimentConfig::parse`] reads back unchanged.
impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |values: &[f64]| {
            values
                .iter()
                .map(|v| format!("{v:?}"))
                .collect::<Vec<_>>()
                .join(", ")
        };
        let mut out = String::new();
        writeln!(out, "radius = {:?}", self.radius)?;
        writeln!(out, "frequency = {:?}", self.frequency)?;
        writeln!(out, "permittivity = {:?}", self.permittivity)?;
        writeln!(out, "permeability = {:?}", self.permeability)?;
        writeln!(out, "directions = {}", self.directions)?;
        writeln!(out, "boundary_nodes = {}", self.boundary_nodes)?;
        writeln!(out, "grid_resolution = {}", self.grid_resolution)?;
        writeln!(out, "epsilon_ratios = {}", join(&self.epsilon_ratios))?;
        writeln!(out, "mu_ratio = {:?}", self.mu_ratio)?;
        match self.snr_db {
            Some(snr) => writeln!(out, "snr_db = {snr:?}")?,
            None => writeln!(out, "snr_db = none")?,
        }
        writeln!(out, "seed = {}", self.seed)?;
        if self.outputs.is_empty() {
            writeln!(out, "outputs = none")?;
        } else {
            let names: Vec<&str> = self.outputs.iter().map(|o| o.name()).collect();
            writeln!(out, "outputs = {}", names.join(", "))?;
        }
        for c in &self.cracks {
            writeln!(out)?;
            writeln!(out, "[crack]")?;
            writeln!(out, "center_x = {:?}", c.center_x)?;
            writeln!(out, "center_y = {:?}", c.center_y)?;
            writeln!(out, "half_length = {:?}", c.half_length)?;
            writeln!(out, "angle_deg = {:?}", c.angle_deg)?;
        }
        f.write_str(&out)
    }
}

#[derive(Default)]
struct PartialCrack {
    center_x: Option<f64>,
    center_y: Option<f64>,
    half_length: Option<f64>,
    angle_deg: Option<f64>,
}

impl PartialCrack {
    fn set(&mut self, key: &str, value: &str, line: usize) -> Result<(), ConfigError> {
        let slot = match key {
            "center_x" => &mut self.center_x,
            "center_y" => &mut self.center_y,
            "half_length" => &mut self.half_length,
            "angle_deg" => &mut self.angle_deg,
            other => return Err(syntax(line, format!("unknown crack key `{other}`"))),
        };
        if slot.is_some() {
            return Err(syntax(
                line,
                format!("`{key}` given twice in one [crack] block"),
            ));
        }
        *slot = Some(number(value, line)?);
        Ok(())
    }

    fn finish(self, line: usize) -> Result<CrackSpec, ConfigError> {
        let missing = |name: &str| syntax(line, format!("[crack] block is missing `{name}`"));
        Ok(CrackSpec {
            center_x: self.center_x.ok_or_else(|| missing("center_x"))?,
            center_y: self.center_y.ok_or_else(|| missing("center_y"))?,
            half_length: self.half_length.ok_or_else(|| missing("half_length"))?,
            angle_deg: self.angle_deg.unwrap_or(0.0),
        })
    }
}

fn number(value: &str, line: usize) -> Result<f64, ConfigError> {
    let v: f64 = value
        .parse()
        .map_err(|_| syntax(line, format!("`{value}` is not a number")))?;
    if !v.is_finite() {
        return Err(syntax(line, format!("`{value}` is not finite")));
    }
    Ok(v)
}

fn integer<T: FromStr>(value: &str, line: usize) -> Result<T, ConfigError> {
    value
        .parse()
        .map_err(|_| syntax(line, format!("`{value}` is not a non-negative integer")))
}

fn list(value: &str, line: usize) -> Result<Vec<f64>, ConfigError> {
    value.split(',').map(|v| number(v.trim(), line)).collect()
}
