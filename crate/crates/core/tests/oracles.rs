//! Independent reference computations checked against the library.

use std::collections::HashSet;

use lexirank::agreement::CoincidenceMatrix;
use lexirank::stats::student_t_sf;
use lexirank::symbols::is_symbol_other;
use lexirank::{AnnotationPair, SentimentLabel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Γ(ν/2) for integer ν via Γ(1) = 1, Γ(1/2) = √π and Γ(x+1) = xΓ(x).
fn gamma_half(nu: u64) -> f64 {
    let (mut x, mut g) = if nu.is_multiple_of(2) { (1.0, 1.0) } else { (0.5, std::f64::consts::PI.sqrt()) };
    while x < nu as f64 / 2.0 {
        g *= x;
        x += 1.0;
    }
    g
}

fn t_density(x: f64, nu: u64) -> f64 {
    let n = nu as f64;
    let c = gamma_half(nu + 1) / ((n * std::f64::consts::PI).sqrt() * gamma_half(nu));
    c * (1.0 + x * x / n).powf(-(n + 1.0) / 2.0)
}

/// P(T > t) = 1/2 − ∫₀ᵗ f, by composite Simpson's rule.
fn t_tail_by_quadrature(t: f64, nu: u64) -> f64 {
    let steps = 20_000;
    let h = t / steps as f64;
    let mut acc = t_density(0.0, nu) + t_density(t, nu);
    for i in 1..steps {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * t_density(i as f64 * h, nu);
    }
    0.5 - acc * h / 3.0
}

#[test]
fn t_tail_matches_quadrature() {
    // frozen from the quadrature oracle
    assert!((t_tail_by_quadrature(2.0, 10) - 0.03669).abs() < 1e-5);
    assert!((student_t_sf(2.0, 10).unwrap() - 0.03669).abs() < 1e-4);

    for &nu in &[1u64, 2, 3, 5, 10, 30, 99, 150] {
        for &t in &[0.1, 0.5, 1.0, 1.96, 2.5, 4.0, 8.0] {
            let oracle = t_tail_by_quadrature(t, nu);
            let got = student_t_sf(t, nu).unwrap();
            assert!((got - oracle).abs() < 1e-7, "t={t} nu={nu}: {got} vs {oracle}");
        }
    }
}

#[test]
fn so_table_agrees_with_range_file_everywhere() {
    let mut expected = HashSet::new();
    for line in include_str!("../data/unicode-8.0-so.txt").lines() {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let (lo, hi) = line.split_once("..").unwrap();
        let lo = u32::from_str_radix(&lo[2..], 16).unwrap();
        let hi = u32::from_str_radix(&hi[2..], 16).unwrap();
        expected.extend(lo..=hi);
    }
    let mut hits = 0;
    for cp in 0..=0x10FFFFu32 {
        if let Some(c) = char::from_u32(cp) {
            assert_eq!(is_symbol_other(c), expected.contains(&cp), "U+{cp:04X}");
            hits += is_symbol_other(c) as usize;
        }
    }
    assert_eq!(hits, 5677);
}

/// Alpha from the raw list of pairable values, without a coincidence matrix.
fn alpha_by_enumeration(pairs: &[(i64, i64)]) -> f64 {
    let values: Vec<i64> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
    let n = values.len() as f64;
    let d2 = |a: i64, b: i64| ((a - b) * (a - b)) as f64;
    let observed = pairs.iter().map(|&(a, b)| 2.0 * d2(a, b)).sum::<f64>() / n;
    let mut expected = 0.0;
    for (i, &a) in values.iter().enumerate() {
        for (j, &b) in values.iter().enumerate() {
            if i != j {
                expected += d2(a, b);
            }
        }
    }
    expected /= n * (n - 1.0);
    1.0 - observed / expected
}

#[test]
fn alpha_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let k = rng.random_range(2..60);
        let raw: Vec<(i64, i64)> = (0..k).map(|_| (rng.random_range(-1..=1), rng.random_range(-1..=1))).collect();
        let pairs: Vec<AnnotationPair> = raw
            .iter()
            .map(|&(a, b)| {
                let l = |v: i64| SentimentLabel::from_value(v).unwrap();
                AnnotationPair::new("t", l(a), l(b), false)
            })
            .collect();
        let m = CoincidenceMatrix::from_pairs(&pairs);
        match m.alpha_interval() {
            Ok(alpha) => assert!((alpha - alpha_by_enumeration(&raw)).abs() < 1e-12),
            Err(_) => assert!(raw.iter().all(|&(a, b)| a == raw[0].0 && b == raw[0].0)),
        }
    }
}
