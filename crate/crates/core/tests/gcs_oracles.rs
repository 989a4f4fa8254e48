mod common;

use std::f64::consts::PI;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twomode::gcs::{
    cat_coefficients, cat_size, detect_rational_phase, rational_kerr, CatDecomposition, RationalPhase,
};
use twomode::state::{poisson_cutoff, HARD_CAP};
use twomode::C64;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

#[test]
fn cat_size_matches_brute_period_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    let mut n = 0;
    while n < 1000 {
        let s: u64 = rng.gen_range(1..=40);
        let r: i64 = rng.gen_range(-80..=80);
        if gcd(r.unsigned_abs(), s) != 1 {
            continue;
        }
        let rp = RationalPhase::new(r, s).unwrap();
        assert_eq!(cat_size(&rp), brute_period(r, s), "r={r} s={s}");
        n += 1;
    }
}

#[test]
fn rational_detection_matches_exhaustive_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..2000 {
        let x: f64 = rng.gen_range(-3.0..3.0);
        let tol = 10f64.powf(rng.gen_range(-9.0..-2.0));
        let max_den = rng.gen_range(1..=64);
        let ours = rational_kerr(PI * x, tol, max_den).map(|rp| (rp.r, rp.s));
        let oracle = exhaustive_rational(x, tol, max_den);
        // the two may pick different numerators only at exact window edges
        match (ours, oracle) {
            (Some((r, s)), Some((ro, so))) => {
                assert_eq!(s, so, "x={x} tol={tol}");
                assert!((r as f64 / s as f64 - x).abs() <= tol + 1e-15);
                assert!((ro - r).abs() <= 1);
            }
            (a, b) => assert_eq!(a, b, "x={x} tol={tol} max_den={max_den}"),
        }
    }
}

#[test]
fn exact_rationals_are_recovered() {
    for s in 1..=64u64 {
        for r in -(2 * s as i64)..=(2 * s as i64) {
            if gcd(r.unsigned_abs(), s) != 1 {
                continue;
            }
            let got = detect_rational_phase(1.0, PI * r as f64 / s as f64, 1e-9, 64).unwrap();
            assert_eq!((got.r, got.s), (r, s));
        }
    }
}

#[test]
fn coefficients_reproduce_kerr_phases() {
    // Σ_m a_m e^{−2πi mn/l} = e^{−iπ(r/s)n²} for every n
    for (r, s) in [(2, 3), (2, 5), (1, 8), (2, 9), (1, 1), (3, 7), (-5, 12), (0, 1)] {
        let rp = RationalPhase::new(r, s).unwrap();
        let a = cat_coefficients(&rp);
        let l = a.len();
        for n in 0..3 * l {
            let sum: C64 = a
                .iter()
                .enumerate()
                .map(|(m, am)| am * C64::from_polar(1.0, -2.0 * PI * (m * n) as f64 / l as f64))
                .sum();
            let expect = C64::from_polar(1.0, -PI * (r as f64 / s as f64) * (n * n) as f64);
            assert!((sum - expect).norm() < 1e-12, "r/s={r}/{s} n={n}");
        }
        // Parseval: Σ|a_m|² = 1
        let p: f64 = a.iter().map(|z| z.norm_sqr()).sum();
        assert!((p - 1.0).abs() < 1e-12);
    }
}

#[test]
fn figure_one_sizes() {
    let beta = C64::new(3.0, 4.0);
    for ((r, s), l) in [((2, 3), 3), ((2, 5), 5), ((1, 8), 8), ((2, 9), 9)] {
        let dec = CatDecomposition::from_phase(&RationalPhase::new(r, s).unwrap(), beta);
        assert_eq!(dec.l, l);
        // equal weights for these phases
        for a in &dec.coeffs {
            assert!((a.norm() - 1.0 / (l as f64).sqrt()).abs() < 1e-12);
        }
    }
}

#[test]
fn poisson_cutoff_matches_brute_force() {
    for mean in [0.01, 0.5, 1.0, 4.0, 12.5, 25.0, 50.0, 100.0, 200.0] {
        for tol in [1e-4, 1e-8, 1e-12] {
            let (n, tail) = poisson_cutoff(mean, tol, HARD_CAP).unwrap();
            assert_eq!(n, brute_poisson_cutoff(mean, tol), "mean={mean} tol={tol}");
            assert!(tail < tol);
        }
    }
}
