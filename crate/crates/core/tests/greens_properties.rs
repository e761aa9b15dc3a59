use std::f64::consts::TAU;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tdcrack::greens::{log_singularity, NeumannKernel, SeriesParams};
use tdcrack::Point;

const K: f64 = 18.338449438707563;

fn kernel() -> NeumannKernel {
    NeumannKernel::new(K, 1.0, SeriesParams::default()).unwrap()
}

fn random_point(rng: &mut ChaCha8Rng, max_radius: f64) -> Point {
    // uniform in the disk
    let r = max_radius * rng.random::<f64>().sqrt();
    Point::from_polar(r, TAU * rng.random::<f64>())
}

#[test]
fn reciprocity_over_random_pairs() {
    let k = kernel();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let x = random_point(&mut rng, 0.95);
        let z = random_point(&mut rng, 0.95);
        let a = k.value(x, z).unwrap();
        let b = k.value(z, x).unwrap();
        assert!(
            (a - b).abs() <= 1e-8 * a.abs().max(1e-3),
            "{x} {z}: {a} vs {b}"
        );
    }
}

#[test]
fn normal_derivative_vanishes_on_the_boundary() {
    let k = kernel();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let h = 1e-5;
    for _ in 0..20 {
        let z = random_point(&mut rng, 0.8);
        let mut worst: f64 = 0.0;
        let mut largest: f64 = 0.0;
        for step in 0..32 {
            let phi = TAU * step as f64 / 32.0;
            let at = |r: f64| k.value(Point::from_polar(r, phi), z).unwrap();
            // second-order one-sided difference
            let d = (3.0 * at(1.0) - 4.0 * at(1.0 - h) + at(1.0 - 2.0 * h)) / (2.0 * h);
            worst = worst.max(d.abs());
            largest = largest.max(at(1.0).abs());
        }
        assert!(
            worst < 1e-6 * largest,
            "z = {z}: {worst:e} vs max|N| {largest}"
        );
    }
}

#[test]
fn helmholtz_residual_away_from_the_source() {
    let k = kernel();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let h = 1e-3;
    for _ in 0..10 {
        let z = random_point(&mut rng, 0.8);
        let mut samples = Vec::new();
        while samples.len() < 20 {
            let x = random_point(&mut rng, 0.9);
            if x.distance(z) > 0.1 {
                samples.push(x);
            }
        }
        let n = |p: Point| k.value(p, z).unwrap();
        let scale = samples.iter().map(|&x| n(x).abs()).fold(0.0, f64::max);
        for &x in &samples {
            let lap = (n(x + Point::new(h, 0.0))
                + n(x - Point::new(h, 0.0))
                + n(x + Point::new(0.0, h))
                + n(x - Point::new(0.0, h))
                - 4.0 * n(x))
                / (h * h);
            let residual = (lap + K * K * n(x)).abs();
            assert!(
                residual < 1e-3 * K * K * scale,
                "x = {x}, z = {z}: {residual:e}"
            );
        }
    }
}

#[test]
fn doubling_the_order_is_converged() {
    let low = NeumannKernel::new(K, 1.0, SeriesParams::new(100, 1e-14, 1e-8).unwrap()).unwrap();
    let high = NeumannKernel::new(K, 1.0, SeriesParams::new(200, 1e-14, 1e-8).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..100 {
        let x = random_point(&mut rng, 0.9);
        let z = random_point(&mut rng, 0.9);
        let a = low.value(x, z).unwrap();
        let b = high.value(x, z).unwrap();
        assert!((a - b).abs() <= 1e-8 * b.abs().max(1e-3));
    }
}

#[test]
fn logarithmic_singularity() {
    let k = kernel();
    for z in [Point::ORIGIN, Point::new(0.3, -0.4), Point::new(-0.7, 0.1)] {
        let offsets = [1e-4, 1e-5, 1e-6];
        let values: Vec<f64> = offsets
            .iter()
            .map(|&d| {
                let x = z + Point::new(d * 0.6, d * 0.8);
                k.value(x, z).unwrap() + log_singularity(x, z)
            })
            .collect();
        for v in &values[1..] {
            assert!((v - values[0]).abs() < 0.1 * values[0].abs());
        }
    }
}

#[test]
fn regular_part_is_bounded_on_boundary_by_interior() {
    let k = kernel();
    let mut worst: f64 = 0.0;
    for i in 0..64 {
        let x = Point::from_polar(1.0, TAU * i as f64 / 64.0);
        for j in 0..64 {
            // 8 rings by 8 angles inside the standoff region
            let z = Point::from_polar(0.1 * (j / 8) as f64, TAU * ((j % 8) as f64 + 0.5) / 8.0);
            let r = k.regular_value(x, z).unwrap();
            assert!(r.is_finite());
            worst = worst.max(r.abs());
        }
    }
    assert!(worst < 10.0, "max |R| = {worst}");
}

#[test]
fn regular_part_second_difference_stays_bounded() {
    let k = kernel();
    let z = Point::new(0.2, -0.3);
    let r = |x: Point| k.regular_value(x, z).unwrap();
    let mut previous: Option<f64> = None;
    for h in [1e-2, 1e-3, 1e-4] {
        let x = z + Point::new(0.5 * h, 0.0);
        let second = (r(x + Point::new(h, 0.0)) - 2.0 * r(x) + r(x - Point::new(h, 0.0))) / (h * h);
        // ℛ behaves like r² ln r near the diagonal: the second difference
        // may grow like |ln h| but not like 1/h
        let bound = 2.0 * K * K * (1.0 + h.ln().abs());
        assert!(second.abs() < bound, "h = {h}: {second}");
        if let Some(p) = previous {
            assert!(second.abs() < 3.0 * p.abs() + K * K);
        }
        previous = Some(second);
    }
}

#[test]
fn regular_and_singular_parts_recombine() {
    let k = kernel();
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..50 {
        let x = random_point(&mut rng, 0.95);
        let z = random_point(&mut rng, 0.95);
        let n = k.value(x, z).unwrap();
        let r = k.regular_value(x, z).unwrap();
        assert!((r - log_singularity(x, z) - n).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rotation_invariance(
        r1 in 0.0..0.9f64, r2 in 0.0..0.9f64,
        t1 in 0.0..TAU, t2 in 0.0..TAU, shift in 0.0..TAU,
    ) {
        let x = Point::from_polar(r1, t1);
        let z = Point::from_polar(r2, t2);
        prop_assume!(x.distance(z) > 1e-6);
        let k = kernel();
        let a = k.value(x, z).unwrap();
        let b = k.value(Point::from_polar(r1, t1 + shift), Point::from_polar(r2, t2 + shift)).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1e-2));
    }
}
