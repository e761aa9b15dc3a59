use std::f64::consts::PI;

use proptest::prelude::*;
use tdcrack::specfun::{bessel_j, bessel_j_seq, bessel_y, cyl_derivatives};

#[path = "support/oracles.rs"]
mod oracles;

use oracles::{j_integral, j_series, y_integral};

fn close(a: f64, b: f64, rel: f64, floor: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(floor)
}

const ARGUMENTS: [f64; 14] = [
    0.1,
    0.5,
    1.0,
    2.404825557695773,
    3.7,
    5.0,
    7.5,
    10.0,
    14.2,
    18.34,
    25.0,
    33.3,
    41.0,
    50.0,
];

#[test]
fn j_matches_trapezoid_integral() {
    for n in 0..=20 {
        for x in ARGUMENTS {
            let got = bessel_j(n, x).unwrap();
            let want = j_integral(n, x);
            assert!(
                close(got, want, 1e-10, 1e-5),
                "J_{n}({x}) = {got}, oracle {want}"
            );
        }
    }
}

#[test]
fn j_matches_ascending_series_at_small_arguments() {
    for n in 0..=20 {
        for x in [0.01, 0.1, 0.5, 1.0, 2.0, 3.5, 5.0] {
            let got = bessel_j(n, x).unwrap();
            let want = j_series(n, x);
            assert!(
                close(got, want, 1e-10, 1e-300),
                "J_{n}({x}) = {got}, series {want}"
            );
        }
    }
}

#[test]
fn y_matches_integral_representation() {
    for n in 0..=20 {
        for x in ARGUMENTS {
            let got = bessel_y(n, x).unwrap();
            let want = y_integral(n, x);
            assert!(
                close(got, want, 1e-10, 1e-6),
                "Y_{n}({x}) = {got}, oracle {want}"
            );
        }
    }
}

#[test]
fn y0_at_one() {
    let got = bessel_y(0, 1.0).unwrap();
    assert!((got - y_integral(0, 1.0)).abs() < 1e-10);
    assert!((got - 0.088_256_964_215_676_96).abs() < 1e-14);
}

#[test]
fn wronskian_sweep() {
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let x = 0.1 + (100.0 - 0.1) * i as f64 / 999.0;
        let n = (i * 7) % 61;
        let e = cyl_derivatives(n, x).unwrap();
        let expected = 2.0 / (PI * x);
        worst = worst.max(((e.wronskian() - expected) / expected).abs());
    }
    assert!(worst < 1e-10, "worst relative Wronskian error {worst:e}");
}

#[test]
fn derivative_matches_finite_difference() {
    let h = 1e-6;
    let fd = (bessel_j(2, 5.0 + h).unwrap() - bessel_j(2, 5.0 - h).unwrap()) / (2.0 * h);
    assert!((cyl_derivatives(2, 5.0).unwrap().jprime - fd).abs() < 1e-6);
    assert_eq!(
        cyl_derivatives(0, 2.0).unwrap().jprime,
        -bessel_j(1, 2.0).unwrap()
    );
}

#[test]
fn envelope_errors() {
    assert!(bessel_j(0, -1.0).is_err());
    assert!(bessel_j(201, 1.0).is_err());
    assert!(bessel_j(0, 1000.5).is_err());
    assert!(bessel_y(0, 0.0).is_err());
    assert!(bessel_y(0, -2.0).is_err());
    assert!(cyl_derivatives(3, f64::NAN).is_err());
}

proptest! {
    #[test]
    fn recurrence_and_wronskian(n in 1usize..60, x in 0.1f64..100.0) {
        let js = bessel_j_seq(n + 1, x).unwrap();
        let lhs = js[n - 1] + js[n + 1];
        let rhs = 2.0 * n as f64 / x * js[n];
        let scale = js[n - 1].abs().max(js[n + 1].abs()).max(rhs.abs());
        prop_assert!((lhs - rhs).abs() <= 1e-10 * scale);

        let e = cyl_derivatives(n, x).unwrap();
        let expected = 2.0 / (PI * x);
        prop_assert!(((e.wronskian() - expected) / expected).abs() < 1e-10);
    }

    #[test]
    fn large_argument_values_stay_bounded(n in 0usize..=200, x in 100.0f64..1000.0) {
        let j = bessel_j(n, x).unwrap();
        prop_assert!(j.abs() <= 1.0);
        let y = bessel_y(n, x).unwrap();
        prop_assert!(y.is_finite());
    }
}
