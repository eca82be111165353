//! Feasibility-first backtracking line search.
//!
//! Late in a solve the objective is large in magnitude while the decrease
//! demanded by the Armijo test is tiny, so the change in objective is summed
//! term by term instead of differencing two totals. Barrier terms use
//! `ln_1p`; power terms use a fourth-order expansion for small moves and a
//! direct difference otherwise.

use super::kkt::PathStep;
use super::{evaluate, Iterate, Local, MonotoneProblem};
use crate::error::{domain, Error, Result};
use crate::numkit::PathLaplacian;
use crate::roc::roc_value_unchecked;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_741_78;
const MIN_STEP: f64 = 1e-16;
/// Expansion is used while `|dz| (1 + |z| + |mu|)` stays below this.
const SERIES_RADIUS: f64 = 1e-3;

/// `f(w + d) - f(w)` for one coordinate, plus its rounding allowance.
fn power_change(mu: f64, q: f64, w: f64, z: f64, f: f64, fp: f64, d: f64) -> (f64, f64) {
    let log_r = q.ln() + 0.5 * z * z + LN_SQRT_2PI;
    if log_r < 700.0 {
        // x = dz/dw * d, with dz/dw = q / pdf(z).
        let x = log_r.exp() * d;
        if x.abs() * (1.0 + z.abs() + mu.abs()) <= SERIES_RADIUS {
            let zm = z + mu;
            let poly = 1.0
                + x * (mu / 2.0
                    + x * (mu * zm / 6.0 + x * mu * (zm * (2.0 * z + mu) + 1.0) / 24.0));
            return (fp * d * poly, 0.0);
        }
    }
    let f_new = roc_value_unchecked(w + d, mu, q);
    (f_new - f, 2.0 * f64::EPSILON * f_new.max(f))
}

/// Change in the centering objective along `s * step`, with a rounding bound.
fn objective_change(prob: &MonotoneProblem, t: f64, it: &Iterate, local: &Local, step: &PathStep, s: f64) -> (f64, f64) {
    let q = prob.q();
    let (mut df, mut df_abs, mut df_noise) = (0.0, 0.0, 0.0);
    for (i, &dw) in step.delta_w.iter().enumerate() {
        let d = s * dw;
        if d == 0.0 {
            continue;
        }
        let (c, noise) = power_change(prob.mu()[i], q, it.w[i], local.z[i], local.f[i], local.fp[i], d);
        df += c;
        df_abs += c.abs();
        df_noise += noise;
    }
    let (mut db, mut db_abs) = (0.0, 0.0);
    for (g, dg) in it.gaps.iter().zip(&step.delta_gaps) {
        let c = (s * dg / g).ln_1p();
        db += c;
        db_abs += c.abs();
    }
    let change = -t * df - db;
    let noise = 8.0 * f64::EPSILON * (t * df_abs + db_abs) + t * df_noise;
    (change, noise)
}

/// Returns the accepted step and the new iterate.
#[allow(clippy::too_many_arguments)]
pub(super) fn search(
    prob: &MonotoneProblem,
    t: f64,
    it: &Iterate,
    local: &Local,
    step: &PathStep,
    slope: f64,
    alpha: f64,
    beta: f64,
) -> Result<(f64, Iterate)> {
    // Largest step keeping every gap positive.
    let s_max = it
        .gaps
        .iter()
        .zip(&step.delta_gaps)
        .filter(|(_, d)| **d < 0.0)
        .map(|(g, d)| -g / d)
        .fold(f64::INFINITY, f64::min);
    let mut s = 1.0;
    while s >= s_max {
        s *= beta;
    }
    loop {
        if s < MIN_STEP {
            return Err(Error::LineSearch { min_step: MIN_STEP });
        }
        if let Some(next) = it.advanced(s, &step.delta_w, &step.delta_gaps, prob.q()) {
            let (change, noise) = objective_change(prob, t, it, local, step, s);
            // Within rounding of the bound counts as sufficient decrease.
            if change <= alpha * s * slope + noise {
                return Ok((s, next));
            }
        }
        s *= beta;
    }
}

/// Backtracking from `s = 1`: first shrink until `w + s dw` is strictly
/// feasible, then until the Armijo condition
/// `g(w + s dw) <= g(w) + alpha s grad^T dw` holds.
pub fn backtracking_search(
    w: &[f64],
    delta_w: &[f64],
    t: f64,
    prob: &MonotoneProblem,
    alpha: f64,
    beta: f64,
) -> Result<f64> {
    if delta_w.len() != w.len() {
        return domain(format!("step has length {} but iterate has {}", delta_w.len(), w.len()));
    }
    let it = Iterate::from_weights(w, prob)?;
    let e = evaluate(&it, t, prob)?;
    let slope: f64 = e.grad.iter().zip(delta_w).map(|(g, s)| g * s).sum();
    if !(slope < 0.0) {
        return domain(format!("not a descent direction: grad^T dw = {slope}"));
    }
    let step = PathStep {
        delta_w: delta_w.to_vec(),
        delta_gaps: PathLaplacian::differences(delta_w),
        nu: 0.0,
        residual: 0.0,
    };
    search(prob, t, &it, &e.local, &step, slope, alpha, beta).map(|(s, _)| s)
}
