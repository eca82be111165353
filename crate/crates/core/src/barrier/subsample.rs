//! Solve on an evenly spaced, deduplicated subset and interpolate in `mu`.

use super::{solve_monotone, BarrierConfig, MonotoneProblem, MonotoneSolution};
use crate::error::{Error, Result};
use crate::weights::{Sidedness, WeightVector};

/// `count` indices evenly spaced over `0..j`, always including both ends.
pub fn even_indices(j: usize, count: usize) -> Vec<usize> {
    if count >= j {
        return (0..j).collect();
    }
    if count <= 1 {
        return vec![0];
    }
    let span = (j - 1) as f64 / (count - 1) as f64;
    let mut idx: Vec<usize> = (0..count).map(|k| (k as f64 * span).round() as usize).collect();
    idx.dedup();
    idx
}

/// Walks the selected (nonincreasing) effects, keeping one only once it drops
/// below the last kept value minus `c0`.
pub fn dedup_anchored(mu: &[f64], selected: &[usize], c0: f64) -> Vec<usize> {
    let mut kept: Vec<usize> = Vec::with_capacity(selected.len());
    for &i in selected {
        match kept.last() {
            Some(&a) if mu[i] >= mu[a] - c0 => {}
            _ => kept.push(i),
        }
    }
    kept
}

/// Piecewise-linear interpolation on knots sorted by decreasing `mu`,
/// constant beyond the end knots.
pub fn interpolate_in_mu(knot_mu: &[f64], knot_w: &[f64], mu: &[f64]) -> Vec<f64> {
    let k = knot_mu.len();
    mu.iter()
        .map(|&x| {
            if x >= knot_mu[0] {
                return knot_w[0];
            }
            if x <= knot_mu[k - 1] {
                return knot_w[k - 1];
            }
            // First knot strictly below x; its predecessor is at or above x.
            let hi = knot_mu.partition_point(|&m| m >= x);
            let lo = hi - 1;
            let frac = (knot_mu[lo] - x) / (knot_mu[lo] - knot_mu[hi]);
            knot_w[lo] + frac * (knot_w[hi] - knot_w[lo])
        })
        .collect()
}

/// Rescales to `sum w = J` while keeping every entry in `[l, cap]`.
///
/// Clipped entries are frozen and the rest rescaled again, until the sum settles.
fn normalize_into_box(w: &mut [f64], l: f64, cap: f64) {
    let j = w.len() as f64;
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x *= j / total);
    for _ in 0..100 {
        w.iter_mut().for_each(|x| *x = x.clamp(l, cap));
        let sum: f64 = w.iter().sum();
        if (sum - j).abs() <= 1e-13 * j {
            return;
        }
        let pinned: f64 = w.iter().filter(|&&x| x <= l || x >= cap).sum();
        let free: f64 = sum - pinned;
        if free <= 0.0 {
            return;
        }
        let scale = (j - pinned) / free;
        w.iter_mut().filter(|x| **x > l && **x < cap).for_each(|x| *x *= scale);
    }
}

/// Solves directly when `J <= L`; otherwise solves on at most `L`
/// representative effects and interpolates the rest.
pub fn subsample_solve(prob: &MonotoneProblem, cfg: &BarrierConfig) -> Result<MonotoneSolution> {
    cfg.validate()?;
    let j = prob.len();
    if j <= cfg.subsample_l {
        return solve_monotone(prob, cfg);
    }
    let mu = prob.mu();
    let picked = dedup_anchored(mu, &even_indices(j, cfg.subsample_l), cfg.dedup_c0);
    let knot_mu: Vec<f64> = picked.iter().map(|&i| mu[i]).collect();
    let reduced = solve_monotone(&prob.with_mu(knot_mu.clone()), cfg)?;
    let mut w = interpolate_in_mu(&knot_mu, reduced.weights.as_slice(), mu);
    normalize_into_box(&mut w, prob.l(), prob.cap());
    let weights = WeightVector::new(w, Some(prob.q()), Sidedness::OneSided)
        .map_err(|e| Error::Infeasible(format!("interpolated weights could not be normalized: {e}")))?;
    Ok(MonotoneSolution { weights, diagnostics: reduced.diagnostics })
}
