//! Barrier solver: derivatives, Newton steps, line search, outer loop and subsampling.

mod common;

use common::*;
use proptest::prelude::*;
use pweight_core::barrier::*;
use pweight_core::numkit::{std_normal_cdf, std_normal_quantile, TridiagonalMatrix};
use pweight_core::weights::{monotone_regime_one_sided, spjotvoll_one_sided, EffectSizeVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// A random small instance and a strictly feasible point well inside it.
fn random_point(rng: &mut ChaCha8Rng) -> (MonotoneProblem, Vec<f64>, f64) {
    let j = rng.random_range(2..10);
    let q = 10f64.powf(rng.random_range(-4.0..-1.5));
    let l = if rng.random_bool(0.5) { 0.0 } else { rng.random_range(0.1..0.8) };
    let u = if rng.random_bool(0.5) { f64::INFINITY } else { rng.random_range(1.5..5.0) };
    let mut mu = half_normal(rng, j, 0.05);
    mu.sort_by(|a, b| b.total_cmp(a));
    let prob = MonotoneProblem::new(mu, q, l, u).unwrap();
    let mut v: Vec<f64> = (0..j).map(|_| rng.random_range(-1.0..1.0)).collect();
    v.sort_by(f64::total_cmp);
    let mean = v.iter().sum::<f64>() / j as f64;
    v.iter_mut().for_each(|x| *x -= mean);
    let room = ((1.0 - l) / -v[0]).min((prob.cap() - 1.0) / v[j - 1]);
    let delta = room * rng.random_range(0.2..0.8);
    let w: Vec<f64> = v.iter().map(|x| 1.0 + delta * x).collect();
    let t = 10f64.powf(rng.random_range(0.0..3.0));
    (prob, w, t)
}

fn min_gap(w: &[f64], prob: &MonotoneProblem) -> f64 {
    let mut g = vec![w[0] - prob.l(), prob.cap() - w[w.len() - 1]];
    g.extend(w.windows(2).map(|p| p[1] - p[0]));
    g.into_iter().fold(f64::INFINITY, f64::min)
}

fn objective(w: &[f64], t: f64, prob: &MonotoneProblem) -> f64 {
    centering_derivatives(w, t, prob).unwrap().objective
}

fn shifted(w: &[f64], moves: &[(usize, f64)]) -> Vec<f64> {
    let mut v = w.to_vec();
    for &(i, h) in moves {
        v[i] += h;
    }
    v
}

#[test]
fn gradient_matches_central_differences() {
    let mut rng = rng(101);
    for case in 0..50 {
        let (prob, w, t) = random_point(&mut rng);
        let d = centering_derivatives(&w, t, &prob).unwrap();
        let h = 1e-4 * min_gap(&w, &prob);
        for i in 0..w.len() {
            let fd = (objective(&shifted(&w, &[(i, h)]), t, &prob)
                - objective(&shifted(&w, &[(i, -h)]), t, &prob))
                / (2.0 * h);
            let g = d.grad[i];
            assert!((fd - g).abs() <= 1e-5 * g.abs().max(1.0), "case {case}, entry {i}: {g} vs {fd}");
        }
    }
}

#[test]
fn hessian_matches_second_differences() {
    let mut rng = rng(102);
    for case in 0..50 {
        let (prob, w, t) = random_point(&mut rng);
        let d = centering_derivatives(&w, t, &prob).unwrap();
        let h = 1e-2 * min_gap(&w, &prob);
        let f0 = objective(&w, t, &prob);
        let n = w.len();
        let dense = |i: usize, k: usize| -> f64 {
            if i == k {
                d.hess.diag()[i]
            } else if k == i + 1 {
                d.hess.sup()[i]
            } else if i == k + 1 {
                d.hess.sub()[k]
            } else {
                0.0
            }
        };
        let scale = d.hess.norm_inf();
        for i in 0..n {
            let fd = (objective(&shifted(&w, &[(i, h)]), t, &prob) - 2.0 * f0
                + objective(&shifted(&w, &[(i, -h)]), t, &prob))
                / (h * h);
            let want = dense(i, i);
            assert!((fd - want).abs() <= 1e-3 * want.abs(), "case {case} diag {i}: {want} vs {fd}");
            for k in i + 1..n.min(i + 3) {
                let fd = (objective(&shifted(&w, &[(i, h), (k, h)]), t, &prob)
                    - objective(&shifted(&w, &[(i, h), (k, -h)]), t, &prob)
                    - objective(&shifted(&w, &[(i, -h), (k, h)]), t, &prob)
                    + objective(&shifted(&w, &[(i, -h), (k, -h)]), t, &prob))
                    / (4.0 * h * h);
                let want = dense(i, k);
                assert!((fd - want).abs() <= 1e-3 * want.abs().max(1e-3 * scale), "case {case} ({i},{k}): {want} vs {fd}");
            }
        }
    }
}

#[test]
fn hessian_pivots_positive_at_random_points() {
    let mut rng = rng(103);
    for _ in 0..100 {
        let (prob, w, t) = random_point(&mut rng);
        let d = centering_derivatives(&w, t, &prob).unwrap();
        assert!(d.hess.factor().unwrap().pivots().iter().all(|p| *p > 0.0));
        // The curvature of the power term adds a positive diagonal.
        let ns = NewtonState::at(w.clone(), t, &prob).unwrap();
        for i in 0..w.len() {
            let left = if i > 0 { -ns.hess_offdiag[i - 1] } else { 0.0 };
            let right = if i + 1 < w.len() { -ns.hess_offdiag[i] } else { 0.0 };
            assert!(ns.hess_diag[i] > left + right);
        }
    }
}

#[test]
fn kkt_step_matches_dense_saddle_point_solve() {
    let mut rng = rng(104);
    for _ in 0..20 {
        let n = 6;
        let (diag, off) = random_spd_bands(&mut rng, n);
        let grad: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let h = TridiagonalMatrix::symmetric(diag.clone(), off.clone()).unwrap();
        let step = kkt_newton_step(&grad, &h).unwrap();
        let mut k = dense_from_bands(&diag, &off);
        for row in k.iter_mut() {
            row.push(1.0);
        }
        let mut last = vec![1.0; n];
        last.push(0.0);
        k.push(last);
        let mut rhs: Vec<f64> = grad.iter().map(|g| -g).collect();
        rhs.push(0.0);
        let want = dense_solve(k, rhs);
        let scale = inf_norm(&want).max(1.0);
        assert!(max_abs_diff(&step.delta_w, &want[..n]) <= 1e-9 * scale);
        assert!((step.nu - want[n]).abs() <= 1e-9 * scale);
        assert!(step.residual <= 1e-12);
        assert!(step.delta_w.iter().sum::<f64>().abs() <= 1e-12 * scale);
    }
}

#[test]
fn decrement_matches_dense_quadratic_form() {
    let mut rng = rng(105);
    for _ in 0..20 {
        let (diag, off) = random_spd_bands(&mut rng, 5);
        let x: Vec<f64> = (0..5).map(|_| rng.random_range(-2.0..2.0)).collect();
        let a = dense_from_bands(&diag, &off);
        let quad: f64 = (0..5).map(|i| (0..5).map(|k| x[i] * a[i][k] * x[k]).sum::<f64>()).sum();
        let h = TridiagonalMatrix::symmetric(diag, off).unwrap();
        let lam = newton_decrement(&x, &h);
        assert!((lam - quad.sqrt()).abs() <= 1e-12 * quad.sqrt());
    }
}

#[test]
fn newton_step_from_near_center_takes_full_step() {
    let prob = MonotoneProblem::new(vec![-0.5, -1.0, -2.0, -3.0], 0.01, 0.0, f64::INFINITY).unwrap();
    let cfg = BarrierConfig::default();
    let t = 50.0;
    let start = feasible_start(4, 0.0, f64::INFINITY, 0.01).unwrap();
    let center = solve_centering(&start, t, &prob, &cfg).unwrap().w;
    let near: Vec<f64> = center.iter().zip([1e-4, -2e-4, 3e-4, -2e-4]).map(|(w, d)| w + d).collect();
    let ns = NewtonState::at(near.clone(), t, &prob).unwrap();
    let s = backtracking_search(&near, &ns.delta_w, t, &prob, cfg.ls_alpha, cfg.ls_beta).unwrap();
    assert_eq!(s, 1.0);
}

#[test]
fn search_stops_short_of_the_boundary_and_satisfies_armijo() {
    let prob = MonotoneProblem::new(vec![-1.0, -2.0], 0.05, 0.5, 3.0).unwrap();
    let w = [0.9, 1.1];
    let t = 5.0;
    let d = centering_derivatives(&w, t, &prob).unwrap();
    let mut dir = vec![0.6, -0.6];
    if d.grad[0] * dir[0] + d.grad[1] * dir[1] > 0.0 {
        dir = vec![-0.6, 0.6];
    }
    let slope = d.grad[0] * dir[0] + d.grad[1] * dir[1];
    let s = backtracking_search(&w, &dir, t, &prob, 0.01, 0.5).unwrap();
    // At s = 1 the step crosses a constraint; the first crossing is at the
    // smallest positive root among the gaps.
    let gaps = [w[0] - 0.5, w[1] - w[0], 3.0 - w[1]];
    let dgaps = [dir[0], dir[1] - dir[0], -dir[1]];
    let crossing = gaps.iter().zip(dgaps).filter(|(_, d)| *d < 0.0).map(|(g, d)| -g / d).fold(f64::INFINITY, f64::min);
    assert!(crossing < 1.0);
    assert!(s < crossing && s > 0.0);
    let moved: Vec<f64> = w.iter().zip(&dir).map(|(a, b)| a + s * b).collect();
    let f1 = objective(&moved, t, &prob);
    assert!(f1 <= d.objective + 0.01 * s * slope + 1e-12 * d.objective.abs());
}

#[test]
fn search_rejects_ascent_direction() {
    let prob = MonotoneProblem::new(vec![-1.0, -2.0], 0.05, 0.5, 3.0).unwrap();
    let w = [0.9, 1.1];
    let d = centering_derivatives(&w, 5.0, &prob).unwrap();
    let sign = if d.grad[0] > d.grad[1] { 1.0 } else { -1.0 };
    assert!(backtracking_search(&w, &[0.01 * sign, -0.01 * sign], 5.0, &prob, 0.01, 0.5).is_err());
}

#[test]
fn symmetric_instance_recenters_immediately() {
    let prob = MonotoneProblem::new(vec![-2.0; 5], 1e-3, 0.0, f64::INFINITY).unwrap();
    let cfg = BarrierConfig::default();
    let start = feasible_start(5, 0.0, f64::INFINITY, 1e-3).unwrap();
    let t = 1e4;
    let center = solve_centering(&start, t, &prob, &cfg).unwrap();
    let again = solve_centering(&center.w, t, &prob, &cfg).unwrap();
    assert!(again.newton_steps <= 3);
    assert!(0.5 * again.decrement.powi(2) < cfg.newton_tol);
    let sol = solve_monotone(&prob, &cfg).unwrap();
    assert!(sol.weights.as_slice().iter().all(|w| (w - 1.0).abs() <= 1e-6));
}

#[test]
fn centering_reaches_kkt_point() {
    let mut rng = rng(106);
    let mut mu = half_normal(&mut rng, 50, 0.01);
    mu.sort_by(|a, b| b.total_cmp(a));
    let prob = MonotoneProblem::new(mu, 1e-3, 0.0, f64::INFINITY).unwrap();
    let cfg = BarrierConfig::default();
    let start = feasible_start(50, 0.0, f64::INFINITY, 1e-3).unwrap();
    let out = solve_centering(&start, 10.0, &prob, &cfg).unwrap();
    assert!(0.5 * out.decrement.powi(2) < cfg.newton_tol);
    let d = centering_derivatives(&out.w, 10.0, &prob).unwrap();
    let nu = -d.grad.iter().sum::<f64>() / 50.0;
    let res = d.grad.iter().map(|g| (g + nu).abs()).fold(0.0, f64::max);
    // Each gradient entry nets barrier terms 1/gap of both neighbours.
    let mut gaps = vec![out.w[0]];
    gaps.extend(out.w.windows(2).map(|p| p[1] - p[0]));
    gaps.push(prob.cap() - out.w[49]);
    let scale = gaps.windows(2).map(|g| 1.0 / g[0] + 1.0 / g[1]).fold(0.0, f64::max);
    assert!(res <= 1e-6 * scale, "stationarity residual {res:e} at scale {scale:e}");
    assert!((out.w.iter().sum::<f64>() - 50.0).abs() <= 1e-9);
}

#[test]
fn objective_never_increases_within_a_centering() {
    let mut rng = rng(107);
    let mut mu = half_normal(&mut rng, 200, 0.01);
    mu.sort_by(|a, b| b.total_cmp(a));
    let prob = MonotoneProblem::new(mu, 1e-5, 0.2, 10.0).unwrap();
    let mut last: Option<(f64, f64)> = None;
    let mut violations = Vec::new();
    solve_monotone_observed(&prob, &BarrierConfig::default(), &mut |r| {
        if let Some((t, f)) = last {
            if t == r.t && r.objective > f + 1e-12 * f.abs() {
                violations.push((t, f, r.objective));
            }
        }
        last = Some((r.t, r.objective));
    })
    .unwrap();
    assert!(violations.is_empty(), "{violations:?}");
}

#[test]
fn logged_solve_keeps_kkt_residual_and_sum() {
    let mut rng = rng(108);
    let mu = half_normal(&mut rng, 1000, 1e-6);
    let (prob, _) = MonotoneProblem::from_effects(&EffectSizeVector::one_sided(mu).unwrap(), 1e-7, 0.0, f64::INFINITY).unwrap();
    let mut records = Vec::new();
    solve_monotone_observed(&prob, &BarrierConfig::default(), &mut |r| records.push(*r)).unwrap();
    assert!(!records.is_empty());
    for r in &records {
        assert!(r.kkt_residual <= 1e-9, "{r:?}");
        assert!(r.step_sum.abs() <= 1e-9 * 1000.0, "{r:?}");
        assert!(r.sum_error.abs() <= 1e-9 * 1000.0, "{r:?}");
    }
}

#[test]
fn equal_effects_give_uniform_weights() {
    for &(j, l, u) in &[(2usize, 0.0, f64::INFINITY), (7, 0.5, 2.0), (40, 0.9, 1.1)] {
        let prob = MonotoneProblem::new(vec![-1.3; j], 1e-4, l, u).unwrap();
        let sol = solve_monotone(&prob, &BarrierConfig::default()).unwrap();
        assert!(sol.weights.as_slice().iter().all(|w| (w - 1.0).abs() <= 1e-6));
    }
}

#[test]
fn matches_spjotvoll_in_monotone_regime() {
    let mut rng = rng(2);
    let mu = half_normal(&mut rng, 1000, 1e-6);
    let e = EffectSizeVector::one_sided(mu).unwrap();
    assert!(monotone_regime_one_sided(&e, 1e-7).unwrap().monotone);
    let sp = spjotvoll_one_sided(&e, 1e-7).unwrap();
    let (mo, _) = monotone_weights(&e, 1e-7, 0.0, f64::INFINITY, &BarrierConfig::default()).unwrap();
    let err = max_abs_diff(sp.weights.as_slice(), mo.as_slice());
    assert!(err <= 1e-3, "max difference {err:e}");
}

fn power(w: f64, mu: f64, q: f64) -> f64 {
    std_normal_cdf(std_normal_quantile(q * w).unwrap() - mu)
}

#[test]
fn two_effects_match_constrained_grid() {
    let (mu, q) = ([-1.0, -3.0], 0.05);
    let prob = MonotoneProblem::new(mu.to_vec(), q, 0.5, 1.5).unwrap();
    let sol = solve_monotone(&prob, &BarrierConfig::default()).unwrap();
    let n = 1_000_000;
    let (mut best, mut arg) = (f64::NEG_INFINITY, 0.0);
    for k in 0..=n {
        let w1 = 0.5 + 0.5 * k as f64 / n as f64;
        let v = power(w1, mu[0], q) + power(2.0 - w1, mu[1], q);
        if v > best {
            (best, arg) = (v, w1);
        }
    }
    let w = sol.weights.as_slice();
    assert!((w[0] - arg).abs() <= 1e-3 && (w[1] - (2.0 - arg)).abs() <= 1e-3, "{w:?} vs {arg}");
}

#[test]
fn objective_certificate_against_three_effect_grid() {
    let (mu, q, l, u) = ([-0.5, -1.5, -2.5], 0.01, 0.2, 2.5);
    let cfg = BarrierConfig::default();
    let prob = MonotoneProblem::new(mu.to_vec(), q, l, u).unwrap();
    let sol = solve_monotone(&prob, &cfg).unwrap();
    let got = power_of_slice(sol.weights.as_slice(), &mu, q).unwrap();
    let n = 1500;
    let mut best = f64::NEG_INFINITY;
    for a in 0..=n {
        let w1 = l + (1.0 - l) * a as f64 / n as f64;
        for b in 0..=n {
            let w2 = w1 + (u - w1) * b as f64 / n as f64;
            let w3 = 3.0 - w1 - w2;
            if w3 < w2 || w3 > u {
                continue;
            }
            best = best.max(power(w1, mu[0], q) + power(w2, mu[1], q) + power(w3, mu[2], q));
        }
    }
    // The grid optimum is a lower bound on the true optimum.
    assert!(got >= best - cfg.eps, "solver {got} vs grid {best}");
}

#[test]
fn larger_t0_reaches_same_optimum() {
    let mut rng = rng(109);
    let mu = half_normal(&mut rng, 300, 1e-3);
    let (prob, _) = MonotoneProblem::from_effects(&EffectSizeVector::one_sided(mu).unwrap(), 1e-4, 0.1, 5.0).unwrap();
    let base = BarrierConfig::default();
    let a = solve_monotone(&prob, &base).unwrap();
    let b = solve_monotone(&prob, &BarrierConfig { t0: 10.0 * base.t0, ..base.clone() }).unwrap();
    let pa = power_of_slice(a.weights.as_slice(), prob.mu(), prob.q()).unwrap();
    let pb = power_of_slice(b.weights.as_slice(), prob.mu(), prob.q()).unwrap();
    assert!((pa - pb).abs() <= 2.0 * base.eps, "{pa} vs {pb}");
    assert!(max_abs_diff(a.weights.as_slice(), b.weights.as_slice()) <= 1e-4);
}

#[test]
fn lower_bound_produces_flat_prefix() {
    let mut rng = rng(110);
    let mu = half_normal(&mut rng, 1000, 1e-6);
    let (prob, _) = MonotoneProblem::from_effects(&EffectSizeVector::one_sided(mu).unwrap(), 1e-7, 0.5, f64::INFINITY).unwrap();
    let sol = solve_monotone(&prob, &BarrierConfig::default()).unwrap();
    let w = sol.weights.as_slice();
    assert!(w.windows(2).all(|p| p[1] >= p[0] - 1e-12));
    let flat = w.iter().take_while(|x| (*x - 0.5).abs() <= 1e-6).count();
    assert!(flat >= 1, "first weights {:?}", &w[..5]);
    assert!(w[w.len() - 1] > 1.0);
}

#[test]
fn small_problems_bypass_subsampling() {
    let mut rng = rng(111);
    let mu = half_normal(&mut rng, 120, 1e-3);
    let (prob, _) = MonotoneProblem::from_effects(&EffectSizeVector::one_sided(mu).unwrap(), 1e-3, 0.0, f64::INFINITY).unwrap();
    let cfg = BarrierConfig::default();
    let a = subsample_solve(&prob, &cfg).unwrap();
    let b = solve_monotone(&prob, &cfg).unwrap();
    assert_eq!(a, b);
}

#[test]
fn clustered_effects_collapse_to_uniform() {
    let mu: Vec<f64> = (0..50).map(|k| -1.0 - k as f64 * 1e-8).collect();
    let prob = MonotoneProblem::new(mu, 1e-3, 0.0, f64::INFINITY).unwrap();
    let cfg = BarrierConfig { subsample_l: 10, ..BarrierConfig::default() };
    let sol = subsample_solve(&prob, &cfg).unwrap();
    assert_eq!(sol.diagnostics.solved_size, 1);
    assert!(sol.weights.as_slice().iter().all(|w| *w == 1.0));
}

#[test]
fn subsampled_weights_track_full_solve() {
    let mut rng = rng(1);
    let mu = half_normal(&mut rng, 20_000, 1e-12);
    let e = EffectSizeVector::one_sided(mu).unwrap();
    let cfg = BarrierConfig::default();
    let (sub, d) = monotone_weights(&e, 5e-3, 0.0, f64::INFINITY, &cfg).unwrap();
    assert!(d.solved_size <= 10_000 && d.solved_size > 9_000);
    let full_cfg = BarrierConfig { subsample_l: 20_000, ..cfg };
    let (full, _) = monotone_weights(&e, 5e-3, 0.0, f64::INFINITY, &full_cfg).unwrap();
    let err = max_abs_diff(sub.as_slice(), full.as_slice());
    assert!(err <= 1e-2, "max difference {err:e}");
}

#[test]
fn power_ordering_between_references() {
    let mut rng = rng(112);
    for &(j, q, l, u) in &[(500usize, 1e-6, 0.5, f64::INFINITY), (500, 1e-4, 0.1, 2.0), (200, 1e-3, 0.0, 10.0)] {
        let mu = half_normal(&mut rng, j, 1e-3);
        let e = EffectSizeVector::one_sided(mu.clone()).unwrap();
        let (w, _) = monotone_weights(&e, q, l, u, &BarrierConfig::default()).unwrap();
        let sp = spjotvoll_one_sided(&e, q).unwrap();
        let p_un = power_of_slice(&vec![1.0; j], &mu, q).unwrap();
        let p_mo = power_of_weights(&w, &e, q).unwrap();
        let p_sp = power_of_weights(&sp.weights, &e, q).unwrap();
        assert!(p_un <= p_mo + 1e-9 && p_mo <= p_sp + 1e-9, "{p_un} {p_mo} {p_sp}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn output_is_feasible_and_monotone(
        mu in prop::collection::vec(-4.0f64..-0.01, 2..40),
        lq in -7.0f64..-1.5,
        l in 0.0f64..0.9,
        u_gap in 0.1f64..20.0,
    ) {
        let q = 10f64.powf(lq);
        let u = (1.0 + u_gap).min(1.0 / q);
        prop_assume!(u > 1.0);
        let e = EffectSizeVector::one_sided(mu.clone()).unwrap();
        let (w, _) = monotone_weights(&e, q, l, u, &BarrierConfig::default()).unwrap();
        let w = w.as_slice();
        let sum: f64 = w.iter().sum();
        prop_assert!((sum - mu.len() as f64).abs() <= 1e-8 * mu.len() as f64);
        prop_assert!(w.iter().all(|x| *x >= l - 1e-8 && *x <= u + 1e-8));
        for a in 0..mu.len() {
            for b in 0..mu.len() {
                if mu[a].abs() < mu[b].abs() {
                    prop_assert!(w[a] <= w[b] + 1e-8);
                }
            }
        }
    }
}
