//! Power curves: derivatives against finite differences, concavity, monotonicity.

mod common;

use common::rng;
use proptest::prelude::*;
use pweight_core::roc::*;
use rand::Rng;

/// A random interior point with `mu` in [-5, -0.1], `q` in [1e-8, 0.1] and
/// level `q w` log-uniform in [1e-12, 0.5].
fn random_point(rng: &mut impl Rng) -> (f64, f64, f64) {
    let mu = rng.random_range(-5.0..-0.1);
    let q = 10f64.powf(rng.random_range(-8.0..-1.0));
    let level = 10f64.powf(rng.random_range(-12.0..0.5f64.log10()));
    (level / q, mu, q)
}

#[test]
fn gradient_and_curvature_match_finite_differences() {
    let mut rng = rng(301);
    for case in 0..200 {
        let (w, mu, q) = random_point(&mut rng);
        let f = |x: f64| roc_value(x, mu, q).unwrap();
        let h = 1e-4 * w;
        let fd = (f(w + h) - f(w - h)) / (2.0 * h);
        let g = roc_grad(w, mu, q).unwrap();
        assert!(((fd - g) / g).abs() <= 1e-5, "case {case} ({w}, {mu}, {q}): {g} vs {fd}");
        let h = 1e-2 * w;
        let fd2 = (f(w + h) - 2.0 * f(w) + f(w - h)) / (h * h);
        let hs = roc_hess(w, mu, q).unwrap();
        assert!(((fd2 - hs) / hs).abs() <= 1e-3, "case {case} ({w}, {mu}, {q}): {hs} vs {fd2}");
    }
}

#[test]
fn curvature_is_negative_for_negative_effects() {
    let mut rng = rng(302);
    for _ in 0..1000 {
        let (w, mu, q) = random_point(&mut rng);
        assert!(roc_hess(w, mu, q).unwrap() < 0.0);
    }
}

#[test]
fn power_increases_with_weight() {
    for &(mu, q) in &[(-0.3, 1e-7), (-2.0, 0.05), (-4.0, 1e-3)] {
        let grid: Vec<f64> = (0..=400).map(|k| k as f64 / 400.0 / q).collect();
        let f: Vec<f64> = grid.iter().map(|&w| roc_value(w, mu, q).unwrap()).collect();
        assert_eq!((f[0], f[400]), (0.0, 1.0));
        assert!(f.windows(2).all(|p| p[1] > p[0]), "mu {mu}, q {q}");
    }
}

/// Second differences at 100 grid points strictly inside `(lo, hi)`; no
/// evaluation touches an endpoint.
fn second_differences(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Vec<f64> {
    let h = (hi - lo) / 103.0;
    (2..=101).map(|k| lo + k as f64 * h).map(|x| f(x + h) - 2.0 * f(x) + f(x - h)).collect()
}

#[test]
fn two_sided_power_is_concave_in_the_weight() {
    for &(mu, q) in &[(0.5, 0.05), (-1.0, 0.05), (2.0, 1e-3), (-3.0, 1e-6), (0.1, 0.2)] {
        let cap = two_sided_cap(q);
        let d = second_differences(|w| two_sided_power(w, mu, q).unwrap(), 0.0, cap * (1.0 - 1e-6));
        let worst = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!(worst <= 1e-9, "mu {mu}, q {q}: {worst}");
    }
}

#[test]
fn mlr_families_give_concave_roc_curves() {
    let families: [&dyn MlrFamily; 3] =
        [&GaussianLocation::default(), &LaplaceLocation::default(), &LogisticLocation::default()];
    for fam in families {
        for &(t1, t0) in &[(-1.0, 0.0), (-3.0, 0.5), (0.2, 0.4)] {
            let d = second_differences(|x| general_roc(fam, t1, t0, x).unwrap(), 0.0, 1.0);
            let worst = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            assert!(worst <= 1e-9, "{} ({t1}, {t0}): {worst}", fam.name());
            // A better alternative never has less power than the level.
            assert!(general_roc(fam, t1, t0, 0.3).unwrap() >= 0.3);
        }
    }
}

#[test]
fn family_quantiles_invert_their_cdfs() {
    let families: [&dyn MlrFamily; 3] =
        [&GaussianLocation::default(), &LaplaceLocation::default(), &LogisticLocation::default()];
    for fam in families {
        for k in 1..100 {
            let p = k as f64 / 100.0;
            for theta in [-2.0, 0.0, 1.5] {
                assert!((fam.cdf(theta, fam.quantile(theta, p)) - p).abs() <= 1e-9, "{}", fam.name());
            }
        }
    }
}

proptest! {
    #[test]
    fn two_sided_power_is_even_in_effect(w in 0.0f64..10.0, mu in 0.01f64..6.0) {
        let q = 0.05;
        prop_assert_eq!(two_sided_power(w, mu, q).unwrap(), two_sided_power(w, -mu, q).unwrap());
    }

    #[test]
    fn null_effect_gives_level(w in 0.0f64..100.0, lq in -8.0f64..-2.0) {
        let q = 10f64.powf(lq);
        prop_assert!((roc_value(w, 0.0, q).unwrap() - q * w).abs() <= 1e-15 * (1.0 + q * w));
    }
}
