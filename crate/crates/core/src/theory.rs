//! Closed-form predictor `Φ(z) = Σ_m J0(|k x_m - k_a z|) / ln(ℓ_m / 2)`, the
//! shift law `z = (k / k_a) x_m`, peak extraction and map comparison.

use std::f64::consts::PI;
use std::io::Write;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::imaging::{normalized_magnitude, ImagingMap, MapKind};
use crate::scene::{ImagingGrid, Scene};
use crate::specfun;

pub const DEFAULT_THRESHOLD: f64 = 0.5;
/// Correlations are taken over `|z| <= 0.7 R` by default.
pub const DEFAULT_CORRELATION_FRACTION: f64 = 0.7;

/// `λ_a / 4 = π / (2 k_a)`, the half-width of the `J0` main lobe.
pub fn default_suppression_radius(k_a: f64) -> f64 {
    PI / (2.0 * k_a)
}

/// `|Φ(z)| / max |Φ|` over the unmasked cells of `grid`.
pub fn phi_map(scene: &Scene, grid: &ImagingGrid, k: f64, k_a: f64) -> Result<ImagingMap> {
    scene.ensure_valid()?;
    for (name, v) in [("k", k), ("k_a", k_a)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Invalid(format!(
                "{name} must be finite and > 0, got {v}"
            )));
        }
    }
    let weights: Vec<(Point, f64)> = scene
        .cracks
        .iter()
        .map(|c| (k * c.center(), 1.0 / (0.5 * c.half_length()).ln()))
        .collect();
    let mut values = vec![0.0; grid.len()];
    for (i, v) in values.iter_mut().enumerate() {
        if !grid.is_inside(i) {
            continue;
        }
        let kz = k_a * grid.point(i);
        *v = weights
            .iter()
            .map(|(kx, w)| w * specfun::bessel_j(0, kx.distance(kz)).unwrap_or(0.0))
            .sum();
    }
    let raw = ImagingMap::new(
        grid.clone(),
        values,
        grid.mask().to_vec(),
        MapKind::PhiPredictor,
        k_a,
    )?;
    normalized_magnitude(&raw)
}

/// Where a crack centered at `x_m` shows up when imaging with `k_a`:
/// `(k / k_a) x_m`.
pub fn predicted_location(x_m: Point, k: f64, k_a: f64) -> Point {
    (k / k_a) * x_m
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Peak {
    pub location: Point,
    pub value: f64,
    /// Grid cell index.
    pub cell: usize,
}

/// Peaks sorted by descending value, pairwise farther apart than the
/// suppression radius.
#[derive(Clone, Debug, PartialEq)]
pub struct PeakReport {
    pub peaks: Vec<Peak>,
    pub suppression_radius: f64,
    pub threshold: f64,
}

/// Greedy non-maximum suppression: repeatedly take the largest remaining
/// unmasked cell with value at least `threshold` and drop every cell within
/// `suppression_radius` of it. Equal values are visited in cell order.
pub fn extract_peaks(
    map: &ImagingMap,
    threshold: f64,
    suppression_radius: f64,
) -> Result<PeakReport> {
    if map.kind() == MapKind::RawTd {
        return Err(Error::Invalid(
            "peaks are extracted from normalized maps".into(),
        ));
    }
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::Invalid(format!(
            "threshold must lie in (0, 1), got {threshold}"
        )));
    }
    let spacing = map.grid().spacing();
    if !(suppression_radius.is_finite() && suppression_radius > spacing) {
        return Err(Error::Invalid(format!(
            "suppression radius {suppression_radius} must exceed the grid spacing {spacing}"
        )));
    }
    let values = map.values();
    let mut candidates: Vec<usize> = (0..values.len())
        .filter(|&i| map.mask()[i] && values[i] >= threshold)
        .collect();
    candidates.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));

    let mut peaks: Vec<Peak> = Vec::new();
    for cell in candidates {
        let location = map.grid().point(cell);
        if peaks
            .iter()
            .all(|p| p.location.distance(location) > suppression_radius)
        {
            peaks.push(Peak {
                location,
                value: values[cell],
                cell,
            });
        }
    }
    Ok(PeakReport {
        peaks,
        suppression_radius,
        threshold,
    })
}

/// Pearson correlation over cells unmasked in both maps.
pub fn compare_maps(a: &ImagingMap, b: &ImagingMap) -> Result<f64> {
    compare_maps_within(a, b, f64::INFINITY)
}

/// Pearson correlation over cells unmasked in both maps with `|z| <= radius`.
pub fn compare_maps_within(a: &ImagingMap, b: &ImagingMap, radius: f64) -> Result<f64> {
    let (ga, gb) = (a.grid(), b.grid());
    if ga.resolution() != gb.resolution() || ga.radius() != gb.radius() {
        return Err(Error::Invalid("maps are on different grids".into()));
    }
    let cells: Vec<usize> = (0..ga.len())
        .filter(|&i| a.mask()[i] && b.mask()[i] && ga.point(i).norm() <= radius)
        .collect();
    if cells.len() < 2 {
        return Err(Error::Invalid(
            "fewer than two common cells to correlate".into(),
        ));
    }
    let count = cells.len() as f64;
    let mean_a = cells.iter().map(|&i| a.values()[i]).sum::<f64>() / count;
    let mean_b = cells.iter().map(|&i| b.values()[i]).sum::<f64>() / count;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for &i in &cells {
        let da = a.values()[i] - mean_a;
        let db = b.values()[i] - mean_b;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::Invalid("cannot correlate a constant map".into()));
    }
    Ok((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

/// One-to-one pairing of cracks with peaks.
#[derive(Clone, Debug, PartialEq)]
pub struct Assignment {
    pub predicted: Vec<Point>,
    /// Index into the report's peaks for each crack.
    pub peak_of_crack: Vec<Option<usize>>,
}

impl Assignment {
    pub fn crack_of_peak(&self, peak: usize) -> Option<usize> {
        self.peak_of_crack.iter().position(|p| *p == Some(peak))
    }

    /// Distance from each crack's predicted location to its peak, `+∞` for
    /// unmatched cracks.
    pub fn errors(&self, report: &PeakReport) -> Vec<f64> {
        self.peak_of_crack
            .iter()
            .zip(&self.predicted)
            .map(|(p, z)| match p {
                Some(i) => report.peaks[*i].location.distance(*z),
                None => f64::INFINITY,
            })
            .collect()
    }
}

/// Greedy nearest-first matching: all (crack, peak) pairs are visited by
/// ascending distance (ties by crack index, then peak rank) and a pair is
/// kept when neither side is taken yet.
pub fn match_peaks(report: &PeakReport, predicted: &[Point]) -> Assignment {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (c, z) in predicted.iter().enumerate() {
        for (p, peak) in report.peaks.iter().enumerate() {
            pairs.push((peak.location.distance(*z), c, p));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut peak_of_crack = vec![None; predicted.len()];
    let mut used = vec![false; report.peaks.len()];
    for (_, c, p) in pairs {
        if peak_of_crack[c].is_none() && !used[p] {
            peak_of_crack[c] = Some(p);
            used[p] = true;
        }
    }
    Assignment {
        predicted: predicted.to_vec(),
        peak_of_crack,
    }
}

/// Predicted locations of every crack of the scene.
pub fn predicted_locations(scene: &Scene, k: f64, k_a: f64) -> Vec<Point> {
    scene
        .cracks
        .iter()
        .map(|c| predicted_location(c.center(), k, k_a))
        .collect()
}

/// Per crack, the distance from its predicted location to the matched
/// peak, `+∞` when there are fewer peaks than cracks.
pub fn shift_error(report: &PeakReport, scene: &Scene, k: f64, k_a: f64) -> Result<Vec<f64>> {
    if report.peaks.is_empty() {
        return Err(Error::Invalid("peak report is empty".into()));
    }
    Ok(match_peaks(report, &predicted_locations(scene, k, k_a)).errors(report))
}

impl PeakReport {
    /// `rank,x,y,value,matched_crack,shift_error_m`, rank from 1, crack
    /// indices from 0; unmatched peaks leave the last two fields empty.
    pub fn write_csv<W: Write>(&self, writer: W, assignment: Option<&Assignment>) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(["rank", "x", "y", "value", "matched_crack", "shift_error_m"])?;
        for (i, peak) in self.peaks.iter().enumerate() {
            let crack = assignment.and_then(|a| a.crack_of_peak(i).map(|c| (c, a.predicted[c])));
            let (matched, error) = match crack {
                Some((c, z)) => (c.to_string(), format!("{:.9}", peak.location.distance(z))),
                None => (String::new(), String::new()),
            };
            out.write_record([
                (i + 1).to_string(),
                format!("{:.9}", peak.location.x),
                format!("{:.9}", peak.location.y),
                format!("{:.9}", peak.value),
                matched,
                error,
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{Crack, PhysicalMedium};
    use proptest::prelude::*;

    const K: f64 = 18.338449438707563;

    fn scene(cracks: &[(f64, f64, f64)]) -> Scene {
        let cracks = cracks
            .iter()
            .map(|&(x, y, l)| Crack::new(Point::new(x, y), l, 0.0).unwrap())
            .collect();
        Scene::new(1.0, cracks, PhysicalMedium::vacuum(875e6).unwrap()).unwrap()
    }

    fn grid() -> ImagingGrid {
        ImagingGrid::new(1.0, 201).unwrap()
    }

    fn argmax_point(map: &ImagingMap) -> Point {
        map.grid().point(map.argmax_abs().unwrap())
    }

    #[test]
    fn predicted_location_examples() {
        let x = Point::new(0.6, 0.0);
        assert_eq!(predicted_location(x, K, K), x);
        let p = predicted_location(x, K, K * 2f64.sqrt());
        assert!((p.x - 0.6 / 2f64.sqrt()).abs() < 1e-15 && p.y == 0.0);
        assert!((p.x - 0.4243).abs() < 1e-4);
        assert_eq!(predicted_location(Point::ORIGIN, K, 3.0 * K), Point::ORIGIN);
    }

    #[test]
    fn centered_crack_is_not_shifted() {
        let s = scene(&[(0.0, 0.0, 0.03)]);
        for ratio in [0.5, 0.8, 1.0, 1.3, 2.0] {
            let map = phi_map(&s, &grid(), K, ratio * K).unwrap();
            assert!(argmax_point(&map).norm() < 1e-12);
        }
    }

    #[test]
    fn longer_crack_dominates() {
        assert!((1.0 / 0.005f64.ln().abs() - 0.189).abs() < 1e-3);
        assert!((1.0 / 0.03f64.ln().abs() - 0.285).abs() < 1e-3);
        let s = scene(&[(-0.4, 0.0, 0.01), (0.4, 0.0, 0.06)]);
        let map = phi_map(&s, &grid(), K, K).unwrap();
        let near = |c: Point| {
            (0..map.grid().len())
                .filter(|&i| map.grid().point(i).distance(c) < 0.05)
                .map(|i| map.values()[i])
                .fold(0.0, f64::max)
        };
        let short = near(Point::new(-0.4, 0.0));
        let long = near(Point::new(0.4, 0.0));
        assert_eq!(long, 1.0);
        // 0.189 / 0.285 plus interference from the other lobe
        assert!(short < 0.8, "{short}");
    }

    #[test]
    fn three_crack_peaks_follow_the_shift_law() {
        // the other lobes' J0 tails pull each peak about 2 cells off (k/k_a) x_m
        let s = scene(&[(-0.6, -0.1, 0.03), (0.3, 0.5, 0.03), (0.2, -0.6, 0.03)]);
        let k_a = K * 0.6f64.sqrt();
        let g = grid();
        let map = phi_map(&s, &g, K, k_a).unwrap();
        let report =
            extract_peaks(&map, DEFAULT_THRESHOLD, default_suppression_radius(k_a)).unwrap();
        let predicted = predicted_locations(&s, K, k_a);
        let assignment = match_peaks(&report, &predicted);
        for (c, z) in predicted.iter().enumerate() {
            let peak = report.peaks[assignment.peak_of_crack[c].unwrap()];
            let cells = peak.location.distance(*z) / g.spacing();
            assert!(cells <= 3.0, "crack {c}: {cells} cells");
            assert!(peak.location.norm() > s.cracks[c].center().norm());
        }
    }

    #[test]
    fn delta_map_has_one_peak() {
        let g = ImagingGrid::new(1.0, 21).unwrap();
        let mut values = vec![0.0; g.len()];
        let cell = g.nearest_index(Point::new(0.3, -0.2));
        values[cell] = 1.0;
        let map =
            ImagingMap::new(g.clone(), values, g.mask().to_vec(), MapKind::Normalized, K).unwrap();
        let report = extract_peaks(&map, 0.5, 0.2).unwrap();
        assert_eq!(report.peaks.len(), 1);
        assert_eq!(report.peaks[0].cell, cell);
        assert!(extract_peaks(&map, 1.0, 0.2).is_err());
        assert!(extract_peaks(&map, 0.5, 0.05).is_err());
    }

    #[test]
    fn correlation_identities() {
        let s = scene(&[(0.3, 0.2, 0.03)]);
        let g = ImagingGrid::new(1.0, 51).unwrap();
        let m = phi_map(&s, &g, K, K).unwrap();
        assert_eq!(compare_maps(&m, &m).unwrap(), 1.0);
        let flipped: Vec<f64> = m.values().iter().map(|v| 1.0 - v).collect();
        let inv = ImagingMap::new(
            g.clone(),
            flipped,
            m.mask().to_vec(),
            MapKind::Normalized,
            K,
        )
        .unwrap();
        assert!((compare_maps(&m, &inv).unwrap() + 1.0).abs() < 1e-12);
        let flat = ImagingMap::new(
            g.clone(),
            vec![0.5; g.len()],
            g.mask().to_vec(),
            MapKind::Normalized,
            K,
        )
        .unwrap();
        assert!(compare_maps(&m, &flat).is_err());
        let other = ImagingMap::new(
            ImagingGrid::new(1.0, 41).unwrap(),
            vec![0.0; 41 * 41],
            vec![true; 41 * 41],
            MapKind::Normalized,
            K,
        )
        .unwrap();
        assert!(compare_maps(&m, &other).is_err());
    }

    #[test]
    fn exact_peaks_give_zero_error() {
        let s = scene(&[(-0.6, -0.1, 0.03), (0.3, 0.5, 0.03)]);
        let k_a = 1.2 * K;
        let predicted = predicted_locations(&s, K, k_a);
        let report = PeakReport {
            peaks: predicted
                .iter()
                .rev()
                .map(|&location| Peak {
                    location,
                    value: 1.0,
                    cell: 0,
                })
                .collect(),
            suppression_radius: 0.1,
            threshold: 0.5,
        };
        assert_eq!(shift_error(&report, &s, K, k_a).unwrap(), vec![0.0, 0.0]);
        let single = PeakReport {
            peaks: report.peaks[..1].to_vec(),
            ..report.clone()
        };
        let errors = shift_error(&single, &s, K, k_a).unwrap();
        assert_eq!(errors[1], 0.0);
        assert_eq!(errors[0], f64::INFINITY);
        let empty = PeakReport {
            peaks: vec![],
            ..report
        };
        assert!(shift_error(&empty, &s, K, k_a).is_err());
    }

    #[test]
    fn peak_csv_format() {
        let report = PeakReport {
            peaks: vec![
                Peak {
                    location: Point::new(0.25, -0.5),
                    value: 1.0,
                    cell: 0,
                },
                Peak {
                    location: Point::new(-0.75, 0.0),
                    value: 0.625,
                    cell: 1,
                },
            ],
            suppression_radius: 0.1,
            threshold: 0.5,
        };
        let assignment = match_peaks(&report, &[Point::new(0.25, -0.45)]);
        let mut buf = Vec::new();
        report.write_csv(&mut buf, Some(&assignment)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "rank,x,y,value,matched_crack,shift_error_m");
        assert_eq!(
            lines[1],
            "1,0.250000000,-0.500000000,1.000000000,0,0.050000000"
        );
        assert_eq!(lines[2], "2,-0.750000000,0.000000000,0.625000000,,");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn phi_argmax_follows_shift_law(
            r in 0.0..0.45f64,
            t in 0.0..std::f64::consts::TAU,
            ratio in 0.5..2.0f64,
        ) {
            let center = Point::from_polar(r, t);
            let s = scene(&[(center.x, center.y, 0.03)]);
            let g = ImagingGrid::new(1.0, 101).unwrap();
            let k_a = ratio * K;
            let predicted = predicted_location(center, K, k_a);
            prop_assume!(predicted.norm() < 0.95);
            let map = phi_map(&s, &g, K, k_a).unwrap();
            let cells = argmax_point(&map).distance(predicted) / g.spacing();
            prop_assert!(cells <= 2f64.sqrt() / 2.0 + 1e-9, "{} cells", cells);
        }

        #[test]
        fn predictor_is_radial(x in -0.9..0.9f64, y in -0.9..0.9f64, ratio in 0.3..3.0f64) {
            let m = Point::new(x, y);
            let p = predicted_location(m, K, ratio * K);
            prop_assert!(m.cross(p).abs() <= 4.0 * f64::EPSILON * m.norm() * p.norm());
            prop_assert!(m.dot(p) >= 0.0);
        }
    }
}
