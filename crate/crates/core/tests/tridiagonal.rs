//! Tridiagonal and path-form solvers against dense elimination.

mod common;

use common::*;
use proptest::prelude::*;
use pweight_core::numkit::{solve_tridiagonal, PathLaplacian, TridiagonalMatrix};
use rand::Rng;

#[test]
fn random_spd_systems_match_dense_elimination() {
    let mut rng = rng(31);
    for case in 0..100 {
        let n = rng.random_range(1..=50);
        let (diag, off) = random_spd_bands(&mut rng, n);
        let b: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
        let m = TridiagonalMatrix::symmetric(diag.clone(), off.clone()).unwrap();
        let x = solve_tridiagonal(&m, &b).unwrap();
        let want = dense_solve(dense_from_bands(&diag, &off), b.clone());
        let err = max_abs_diff(&x, &want);
        assert!(err <= 1e-10 * inf_norm(&want).max(1.0), "case {case}: n {n}, error {err:e}");
    }
}

#[test]
fn path_form_matches_dense_elimination() {
    let mut rng = rng(32);
    for case in 0..100 {
        let n = rng.random_range(1..=40);
        // Mix soft and very stiff edges, as near-active monotone constraints produce.
        let edge: Vec<f64> = (0..=n).map(|_| 10f64.powf(rng.random_range(-2.0..8.0))).collect();
        let extra: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..5.0)).collect();
        let p = PathLaplacian::new(edge, extra).unwrap();
        let b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (x, d) = p.factor().unwrap().solve_with_differences(&b);
        let t = p.to_tridiagonal();
        let dense: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                t.mul_vec(&e)
            })
            .collect();
        let want = dense_solve(dense, b.clone());
        let scale = inf_norm(&want).max(1e-300);
        assert!(max_abs_diff(&x, &want) <= 1e-6 * scale, "case {case}");
        let back = p.mul_with_differences(&x, &d);
        assert!(max_abs_diff(&back, &b) <= 1e-9 * inf_norm(&b).max(1.0), "case {case}: {back:?} vs {b:?}");
    }
}

proptest! {
    #[test]
    fn quadratic_form_is_positive(n in 1usize..30, seed in any::<u64>()) {
        let mut r = rng(seed);
        let (diag, off) = random_spd_bands(&mut r, n);
        let m = TridiagonalMatrix::symmetric(diag, off).unwrap();
        let x: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
        prop_assume!(inf_norm(&x) > 0.0);
        prop_assert!(m.quadratic_form(&x) > 0.0);
        prop_assert!(m.factor().unwrap().pivots().iter().all(|p| *p > 0.0));
    }
}
