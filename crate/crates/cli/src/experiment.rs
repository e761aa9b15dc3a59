//! Presets and the end-to-end experiment: synthesize data, image it at each
//! assumed permittivity ratio, compare against the predictor and write the
//! artifacts.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use tdcrack::forward::{add_noise, synthesize_data, BoundaryDataSet};
use tdcrack::greens::SeriesParams;
use tdcrack::imaging::{normalize, td_map, ImagingMap};
use tdcrack::scene::{uniform_directions, BoundaryGrid, ImagingGrid, Scene};
use tdcrack::theory::{
    compare_maps_within, default_suppression_radius, extract_peaks, match_peaks, phi_map,
    predicted_locations, Assignment, PeakReport, DEFAULT_CORRELATION_FRACTION, DEFAULT_THRESHOLD,
};

use crate::config::{ConfigError, CrackSpec, ExperimentConfig, OutputKind};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Compute(#[from] tdcrack::Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

pub const PRESET_NAMES: [&str; 4] = ["ex1", "ex2", "ex3", "ex4"];

const SWEEP: [f64; 6] = [1.0, 0.6, 0.8, 1.2, 1.5, 2.0];

/// The four example geometries with the 875 MHz free-space protocol.
pub fn preset(name: &str) -> Result<ExperimentConfig, ConfigError> {
    let (cracks, ratios) = match name {
        "ex1" => (
            vec![CrackSpec::new(0.0, 0.0, 0.03, 0.0)],
            vec![1.0, 0.6, 2.0],
        ),
        "ex2" => (
            vec![
                CrackSpec::new(0.6, 0.0, 0.03, 45.0),
                CrackSpec::new(0.0, 0.5, 0.03, 0.0),
            ],
            SWEEP.to_vec(),
        ),
        "ex3" => (three_cracks([0.03, 0.03, 0.03]), SWEEP.to_vec()),
        "ex4" => (three_cracks([0.02, 0.06, 0.01]), SWEEP.to_vec()),
        other => {
            return Err(ConfigError::Invalid(format!(
                "unknown preset `{other}` (expected one of {})",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    Ok(ExperimentConfig {
        cracks,
        epsilon_ratios: ratios,
        ..ExperimentConfig::default()
    })
}

fn three_cracks(half_lengths: [f64; 3]) -> Vec<CrackSpec> {
    vec![
        CrackSpec::new(-0.6, -0.1, half_lengths[0], 0.0),
        CrackSpec::new(0.3, 0.5, half_lengths[1], 45.0),
        CrackSpec::new(0.2, -0.6, half_lengths[2], 210.0),
    ]
}

/// Everything computed for one assumed permittivity ratio.
#[derive(Clone, Debug)]
pub struct RatioResult {
    pub epsilon_ratio: f64,
    pub assumed_wavenumber: f64,
    pub imaging: ImagingMap,
    pub predictor: ImagingMap,
    pub peaks: PeakReport,
    pub assignment: Assignment,
    /// Pearson correlation of the two maps over `|z| <= 0.7 R`; `None` when
    /// undefined.
    pub correlation: Option<f64>,
    pub shift_errors: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct Experiment {
    pub scene: Scene,
    pub data: BoundaryDataSet,
    pub results: Vec<RatioResult>,
}

/// Run the numerics of an experiment without touching the filesystem.
pub fn compute(config: &ExperimentConfig) -> Result<Experiment, RunError> {
    config.validate()?;
    let scene = config.scene()?;
    let params = SeriesParams::default();
    let directions = uniform_directions(config.directions)?;
    let boundary = BoundaryGrid::uniform(config.radius, config.boundary_nodes)?;
    let clean = synthesize_data(&scene, &directions, &boundary, &params)?;
    let data = match config.snr_db {
        Some(snr) => add_noise(&clean, snr, config.seed)?,
        None => clean,
    };
    let grid = ImagingGrid::new(config.radius, config.grid_resolution)?;
    let k = scene.wavenumber();

    let mut results = Vec::with_capacity(config.epsilon_ratios.len());
    for &ratio in &config.epsilon_ratios {
        let k_a = scene
            .true_medium
            .scaled(ratio, config.mu_ratio)?
            .wavenumber();
        let imaging = normalize(&td_map(&data, &grid, k_a, &params)?)?;
        let predictor = phi_map(&scene, &grid, k, k_a)?;
        let peaks = extract_peaks(&imaging, DEFAULT_THRESHOLD, default_suppression_radius(k_a))?;
        let assignment = match_peaks(&peaks, &predicted_locations(&scene, k, k_a));
        let correlation = compare_maps_within(
            &imaging,
            &predictor,
            DEFAULT_CORRELATION_FRACTION * config.radius,
        )
        .ok();
        let shift_errors = assignment.errors(&peaks);
        results.push(RatioResult {
            epsilon_ratio: ratio,
            assumed_wavenumber: k_a,
            imaging,
            predictor,
            peaks,
            assignment,
            correlation,
            shift_errors,
        });
    }
    Ok(Experiment {
        scene,
        data,
        results,
    })
}

/// Compute the experiment, then write its artifacts into `out_dir`.
///
/// Nothing is created unless the configuration is valid and every ratio
/// computes successfully.
pub fn run_experiment(config: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    let experiment = compute(config)?;
    write_artifacts(config, &experiment, out_dir)
}

pub fn ratio_label(ratio: f64) -> String {
    format!("{ratio:?}")
}

fn create(path: &Path) -> Result<BufWriter<File>, RunError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| io_error(path, source))
}

fn io_error(path: &Path, source: std::io::Error) -> RunError {
    RunError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Lift I/O failures reported through the core error type to [`RunError::Io`]
/// with the offending path.
fn with_path(path: &Path, result: tdcrack::Result<()>) -> Result<(), RunError> {
    match result {
        Err(tdcrack::Error::Io(source)) => Err(io_error(path, source)),
        other => other.map_err(RunError::from),
    }
}

pub fn write_artifacts(
    config: &ExperimentConfig,
    experiment: &Experiment,
    out_dir: &Path,
) -> Result<Vec<PathBuf>, RunError> {
    fs::create_dir_all(out_dir).map_err(|e| io_error(out_dir, e))?;
    let mut written = Vec::new();
    let k = experiment.scene.wavenumber();
    let wants = |kind| config.outputs.contains(&kind);

    if wants(OutputKind::Csv) {
        let path = out_dir.join("boundary_data.csv");
        with_path(&path, experiment.data.write_csv(create(&path)?))?;
        written.push(path);
    }

    for r in &experiment.results {
        let label = ratio_label(r.epsilon_ratio);
        for (prefix, map) in [("map_F", &r.imaging), ("map_Phi", &r.predictor)] {
            let stem = format!("{prefix}_{label}");
            if wants(OutputKind::Csv) {
                let path = out_dir.join(format!("{stem}.csv"));
                with_path(&path, map.write_csv(create(&path)?))?;
                written.push(path);
            }
            if wants(OutputKind::Pgm) {
                let path = out_dir.join(format!("{stem}.pgm"));
                with_path(&path, map.write_pgm(create(&path)?))?;
                written.push(path);
            }
            if wants(OutputKind::Csv) || wants(OutputKind::Pgm) {
                let path = out_dir.join(format!("{stem}.meta"));
                let seed = config.snr_db.map(|_| config.seed);
                with_path(&path, map.write_sidecar(create(&path)?, k, seed))?;
                written.push(path);
            }
        }
        if wants(OutputKind::Peaks) {
            let path = out_dir.join(format!("peaks_{label}.csv"));
            with_path(
                &path,
                r.peaks.write_csv(create(&path)?, Some(&r.assignment)),
            )?;
            written.push(path);
        }
    }

    let path = out_dir.join("summary.csv");
    let mut out = create(&path)?;
    write_summary(&mut out, config, experiment).map_err(|e| io_error(&path, e))?;
    written.push(path);
    Ok(written)
}

fn fixed(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.9}")
    } else {
        "inf".to_string()
    }
}

/// One line per ratio:
/// `epsilon_ratio,mu_ratio,k,k_a,correlation,peaks,shift_errors_m` with the
/// per-crack shift errors separated by `;`.
pub fn write_summary<W: Write>(
    mut out: W,
    config: &ExperimentConfig,
    experiment: &Experiment,
) -> std::io::Result<()> {
    writeln!(
        out,
        "epsilon_ratio,mu_ratio,k,k_a,correlation,peaks,shift_errors_m"
    )?;
    let k = experiment.scene.wavenumber();
    for r in &experiment.results {
        let correlation = r.correlation.map_or_else(|| "nan".to_string(), fixed);
        let errors: Vec<String> = r.shift_errors.iter().map(|e| fixed(*e)).collect();
        writeln!(
            out,
            "{},{},{:.9},{:.9},{},{},{}",
            ratio_label(r.epsilon_ratio),
            ratio_label(config.mu_ratio),
            k,
            r.assumed_wavenumber,
            correlation,
            r.peaks.peaks.len(),
            errors.join(";")
        )?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_match_the_example_geometries() {
        let ex1 = preset("ex1").unwrap();
        assert_eq!(ex1.cracks, vec![CrackSpec::new(0.0, 0.0, 0.03, 0.0)]);
        let ex2 = preset("ex2").unwrap();
        assert_eq!(ex2.cracks[0].angle_deg, 45.0);
        assert_eq!((ex2.cracks[0].center_x, ex2.cracks[0].center_y), (0.6, 0.0));
        let ex4 = preset("ex4").unwrap();
        let lengths: Vec<f64> = ex4.cracks.iter().map(|c| c.half_length).collect();
        assert_eq!(lengths, vec![0.02, 0.06, 0.01]);
        let ex3 = preset("ex3").unwrap();
        assert_eq!(ex3.epsilon_ratios.len(), 6);
        for name in PRESET_NAMES {
            let c = preset(name).unwrap();
            c.validate().unwrap();
            assert_eq!(
                (c.directions, c.boundary_nodes, c.grid_resolution),
                (32, 256, 201)
            );
            assert_eq!(c.frequency, 875e6);
            assert_eq!(c.snr_db, Some(20.0));
        }
        assert!(preset("ex5").is_err());
    }

    #[test]
    fn ratio_labels() {
        assert_eq!(ratio_label(1.0), "1.0");
        assert_eq!(ratio_label(0.6), "0.6");
        assert_eq!(ratio_label(2.0), "2.0");
    }
}
