//! Log-barrier interior-point solver for bounded monotone one-sided weights.
//!
//! Maximizes `sum_i f(w_i)` with `f` the Gaussian power curve, subject to
//! `sum_i w_i = J` and `l <= w_1 <= ... <= w_J <= min(u, 1/q)`, where the
//! effects are sorted so that `|mu|` increases with the index. Each centering
//! problem minimizes
//!
//! ```text
//! g(w) = -t sum_i f(w_i) - sum_{i=0}^{J} log(w_{i+1} - w_i),   w_0 = l, w_{J+1} = cap
//! ```
//!
//! whose Hessian is tridiagonal, so every Newton step costs O(J).
//!
//! The barrier parameter is reported in the natural units of `g`, but the
//! schedule is set relative to `q`: centering starts at `t = t0 / q` and the
//! outer loop stops once `(J + 1) / t <= eps * q`. The power curve has slope
//! of order `q`, so this keeps the barrier and the objective balanced for any
//! per-test level.

mod kkt;
mod search;
mod subsample;

pub use kkt::{kkt_newton_step, kkt_residual, newton_decrement, KktStep};
use kkt::{kkt_path_step, PathStep};
pub use search::backtracking_search;
pub use subsample::{dedup_anchored, even_indices, interpolate_in_mu, subsample_solve};

use crate::error::{domain, Error, Result};
use crate::numkit::{quantile_unchecked, std_normal_cdf, PathLaplacian, TridiagonalMatrix};
use crate::roc::{grad_at, hess_at, roc_value};
use crate::weights::{EffectSizeVector, Sidedness, WeightVector};

/// A bounded monotone weighting instance with effects sorted by increasing `|mu|`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneProblem {
    mu: Vec<f64>,
    q: f64,
    l: f64,
    u: f64,
}

impl MonotoneProblem {
    /// `mu` must satisfy `0 > mu_1 >= mu_2 >= ... >= mu_J`; bounds must allow
    /// the uniform vector: `0 <= l < 1 < u <= 1/q` (`u = inf` means `1/q`).
    pub fn new(mu: Vec<f64>, q: f64, l: f64, u: f64) -> Result<Self> {
        if mu.is_empty() {
            return domain("monotone problem needs at least one effect");
        }
        if !(q > 0.0 && q < 1.0) {
            return domain(format!("per-test level q must lie in (0, 1), got {q}"));
        }
        if let Some((i, m)) = mu.iter().enumerate().find(|(_, m)| !(**m < 0.0 && m.is_finite())) {
            return domain(format!("effect {i} is {m}; monotone weights need finite negative effects"));
        }
        if let Some(i) = mu.windows(2).position(|p| p[1] > p[0]) {
            return domain(format!(
                "effects must be sorted by increasing |mu|; entries {i} and {} are out of order",
                i + 1
            ));
        }
        let cap = 1.0 / q;
        if !(0.0..1.0).contains(&l) || !(u > 1.0) || (u.is_finite() && u > cap) {
            return Err(Error::Infeasible(format!(
                "bounds need 0 <= l < 1 < u <= 1/q = {cap}, got l = {l}, u = {u}"
            )));
        }
        Ok(Self { mu, q, l, u })
    }

    /// Sorts unsorted effects; also returns `order`, where sorted entry `k` is input entry `order[k]`.
    pub fn from_effects(mu: &EffectSizeVector, q: f64, l: f64, u: f64) -> Result<(Self, Vec<usize>)> {
        let order = mu.order().to_vec();
        let sorted = order.iter().map(|&i| mu.values()[i]).collect();
        Ok((Self::new(sorted, q, l, u)?, order))
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    /// Effective upper bound `min(u, 1/q)`.
    pub fn cap(&self) -> f64 {
        self.u.min(1.0 / self.q)
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    /// Same bounds and level, different (already sorted) effects.
    pub(crate) fn with_mu(&self, mu: Vec<f64>) -> Self {
        Self { mu, ..*self }
    }
}

/// Tuning for the barrier method.
#[derive(Debug, Clone, PartialEq)]
pub struct BarrierConfig {
    /// Initial barrier parameter, in units of `1/q`.
    pub t0: f64,
    /// Multiplier applied to `t` after each centering.
    pub kappa: f64,
    /// Duality-gap target, in units of `q`.
    pub eps: f64,
    pub ls_alpha: f64,
    pub ls_beta: f64,
    /// Centering stops once `lambda^2 / 2` drops below this.
    pub newton_tol: f64,
    pub max_newton: usize,
    /// Largest problem solved directly; bigger inputs are subsampled.
    pub subsample_l: usize,
    /// Minimum spacing between retained effects when subsampling.
    pub dedup_c0: f64,
}

impl Default for BarrierConfig {
    fn default() -> Self {
        Self {
            t0: 1.0,
            kappa: 10.0,
            eps: 1e-6,
            ls_alpha: 0.01,
            ls_beta: 0.5,
            newton_tol: 1e-9,
            max_newton: 200,
            subsample_l: 10_000,
            dedup_c0: 1e-6,
        }
    }
}

impl BarrierConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.t0 > 0.0
            && self.kappa > 1.0
            && self.eps > 0.0
            && self.ls_alpha > 0.0
            && self.ls_alpha < 0.5
            && self.ls_beta > 0.0
            && self.ls_beta < 1.0
            && self.newton_tol > 0.0
            && self.max_newton > 0
            && self.subsample_l >= 2
            && self.dedup_c0 > 0.0;
        if !ok {
            return domain(format!("invalid barrier configuration: {self:?}"));
        }
        Ok(())
    }
}

/// Everything known about one Newton iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonState {
    pub w: Vec<f64>,
    pub grad: Vec<f64>,
    /// Off-diagonal Hessian entries `-1/(w_{i+1} - w_i)^2`.
    pub hess_offdiag: Vec<f64>,
    pub hess_diag: Vec<f64>,
    pub delta_w: Vec<f64>,
    pub nu: f64,
    pub decrement: f64,
}

impl NewtonState {
    /// Assembles the derivatives and Newton step at `w`.
    pub fn at(w: Vec<f64>, t: f64, prob: &MonotoneProblem) -> Result<Self> {
        let e = evaluate(&Iterate::from_weights(&w, prob)?, t, prob)?;
        let step = kkt_path_step(&e.grad, &e.hess)?;
        let decrement = e.hess.quadratic_form_with_differences(&step.delta_w, &step.delta_gaps).sqrt();
        let tri = e.hess.to_tridiagonal();
        Ok(Self {
            w,
            grad: e.grad,
            hess_offdiag: tri.sup().to_vec(),
            hess_diag: tri.diag().to_vec(),
            delta_w: step.delta_w,
            nu: step.nu,
            decrement,
        })
    }
}

/// Uniform weights tilted along the centered index vector, strictly inside the feasible set.
///
/// `w = e + delta v` with `v_i = i - (J + 1)/2` and
/// `delta = 0.9 min((1 - l), (cap - 1)) / ((J - 1)/2)`.
pub fn feasible_start(j: usize, l: f64, u: f64, q: f64) -> Result<Vec<f64>> {
    if j == 0 {
        return domain("feasible start needs J >= 1");
    }
    if !(q > 0.0 && q < 1.0) {
        return domain(format!("per-test level q must lie in (0, 1), got {q}"));
    }
    let cap = u.min(1.0 / q);
    if !(0.0..1.0).contains(&l) || !(u > 1.0) || (u.is_finite() && u > 1.0 / q) {
        return Err(Error::Infeasible(format!(
            "bounds need 0 <= l < 1 < u <= 1/q = {}, got l = {l}, u = {u}",
            1.0 / q
        )));
    }
    if j == 1 {
        return Ok(vec![1.0]);
    }
    let half = (j as f64 - 1.0) / 2.0;
    let delta = 0.9 * ((1.0 - l) / half).min((cap - 1.0) / half);
    let center = (j as f64 + 1.0) / 2.0;
    Ok((1..=j).map(|i| 1.0 + delta * (i as f64 - center)).collect())
}

/// Objective, gradient and Hessian of one centering problem.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteringDerivatives {
    pub objective: f64,
    pub grad: Vec<f64>,
    pub hess: TridiagonalMatrix,
}

/// Iterate stored both as weights and as the `J + 1` gaps
/// `w_1 - l, w_2 - w_1, ..., cap - w_J`. Gaps are updated directly so that
/// nearly active constraints keep full relative precision.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Iterate {
    pub w: Vec<f64>,
    pub gaps: Vec<f64>,
}

impl Iterate {
    pub fn from_weights(w: &[f64], prob: &MonotoneProblem) -> Result<Self> {
        Ok(Self { w: w.to_vec(), gaps: gaps(w, prob)? })
    }

    /// `self + s * step`, or `None` unless strictly feasible.
    pub fn advanced(&self, s: f64, dw: &[f64], dgaps: &[f64], q: f64) -> Option<Self> {
        let gaps: Vec<f64> = self.gaps.iter().zip(dgaps).map(|(g, d)| g + s * d).collect();
        if gaps.iter().any(|g| !(*g > 0.0)) {
            return None;
        }
        let w: Vec<f64> = self.w.iter().zip(dw).map(|(a, d)| a + s * d).collect();
        if !(q * w[w.len() - 1] < 1.0) {
            return None;
        }
        Some(Self { w, gaps })
    }
}

/// Per-coordinate quantities at an iterate, reused by the line search.
#[derive(Debug, Clone)]
pub(crate) struct Local {
    pub z: Vec<f64>,
    pub f: Vec<f64>,
    pub fp: Vec<f64>,
}

/// Gap vector, or an infeasibility error if any gap is not strictly positive.
pub(crate) fn gaps(w: &[f64], prob: &MonotoneProblem) -> Result<Vec<f64>> {
    let n = w.len();
    if n != prob.len() {
        return domain(format!("iterate has length {n} but the problem has {} effects", prob.len()));
    }
    let mut g = Vec::with_capacity(n + 1);
    g.push(w[0] - prob.l);
    for k in 1..n {
        g.push(w[k] - w[k - 1]);
    }
    g.push(prob.cap() - w[n - 1]);
    if let Some(k) = g.iter().position(|x| !(*x > 0.0)) {
        return Err(Error::Infeasible(format!("iterate is not strictly feasible: gap {k} is {}", g[k])));
    }
    if !(prob.q * w[n - 1] < 1.0) {
        return Err(Error::Infeasible(format!("weight {} reaches the cap 1/q", w[n - 1])));
    }
    Ok(g)
}

/// Objective, gradient and path-form Hessian at an iterate.
pub(crate) struct Evaluation {
    pub objective: f64,
    pub grad: Vec<f64>,
    pub hess: PathLaplacian,
    pub local: Local,
}

pub(crate) fn evaluate(it: &Iterate, t: f64, prob: &MonotoneProblem) -> Result<Evaluation> {
    let (w, gaps) = (&it.w, &it.gaps);
    let n = w.len();
    let q = prob.q;
    let mut z = Vec::with_capacity(n);
    let mut f = Vec::with_capacity(n);
    let mut fp = Vec::with_capacity(n);
    let mut grad = Vec::with_capacity(n);
    let mut extra = Vec::with_capacity(n);
    let mut sum_f = 0.0;
    for i in 0..n {
        let mu = prob.mu[i];
        let zi = quantile_unchecked(q * w[i]);
        let fi = std_normal_cdf(zi - mu);
        let gi = grad_at(zi, mu, q);
        grad.push(-t * gi - 1.0 / gaps[i] + 1.0 / gaps[i + 1]);
        extra.push(-t * hess_at(zi, mu, q));
        sum_f += fi;
        z.push(zi);
        f.push(fi);
        fp.push(gi);
    }
    let edge: Vec<f64> = gaps.iter().map(|g| 1.0 / (g * g)).collect();
    let barrier: f64 = gaps.iter().map(|g| g.ln()).sum();
    let hess = PathLaplacian::new(edge, extra)?;
    Ok(Evaluation { objective: -t * sum_f - barrier, grad, hess, local: Local { z, f, fp } })
}

/// Objective, gradient and tridiagonal Hessian of the centering problem at `w`.
///
/// Hessian entries: `1/gap_left^2 + 1/gap_right^2 - t f''(w_i)` on the diagonal
/// and `-1/(w_{i+1} - w_i)^2` off it.
pub fn centering_derivatives(w: &[f64], t: f64, prob: &MonotoneProblem) -> Result<CenteringDerivatives> {
    if !(t > 0.0 && t.is_finite()) {
        return domain(format!("barrier parameter must be positive and finite, got {t}"));
    }
    let e = evaluate(&Iterate::from_weights(w, prob)?, t, prob)?;
    Ok(CenteringDerivatives { objective: e.objective, grad: e.grad, hess: e.hess.to_tridiagonal() })
}

/// One Newton iteration as seen by an observer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub t: f64,
    pub decrement: f64,
    pub kkt_residual: f64,
    /// `e^T dw`.
    pub step_sum: f64,
    /// `sum w - J` at the iterate the step starts from.
    pub sum_error: f64,
    pub objective: f64,
}

/// Result of one centering solve.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteringOutcome {
    pub w: Vec<f64>,
    pub newton_steps: usize,
    pub decrement: f64,
}

/// Damped Newton iterations on the centering problem at fixed `t`.
pub fn solve_centering(w0: &[f64], t: f64, prob: &MonotoneProblem, cfg: &BarrierConfig) -> Result<CenteringOutcome> {
    cfg.validate()?;
    let it = Iterate::from_weights(w0, prob)?;
    centering_observed(it, t, prob, cfg, &mut |_| {}).map(|(it, steps, decrement, _)| CenteringOutcome {
        w: it.w,
        newton_steps: steps,
        decrement,
    })
}

/// How a centering solve ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Stop {
    /// `lambda^2 / 2` fell below the tolerance.
    Tolerance,
    /// The step showed no first-order decrease once measured along the
    /// update actually applied, so it is rounding noise.
    PrecisionFloor,
}

/// First-order change of the centering objective along the step as applied:
/// weights move by `delta_w`, gaps by `delta_gaps`. Each part is summed
/// separately, so it stays accurate where `grad^T delta_w` cancels.
fn applied_slope(e: &Evaluation, it: &Iterate, t: f64, step: &PathStep) -> f64 {
    let power: f64 = e.local.fp.iter().zip(&step.delta_w).map(|(f, d)| f * d).sum();
    let barrier: f64 = step.delta_gaps.iter().zip(&it.gaps).map(|(d, g)| d / g).sum();
    -t * power - barrier
}

fn centering_observed(
    mut it: Iterate,
    t: f64,
    prob: &MonotoneProblem,
    cfg: &BarrierConfig,
    observer: &mut dyn FnMut(&StepRecord),
) -> Result<(Iterate, usize, f64, Stop)> {
    let j = prob.len() as f64;
    let mut steps = 0;
    loop {
        let e = evaluate(&it, t, prob)?;
        let step = kkt_path_step(&e.grad, &e.hess)?;
        let decrement = e.hess.quadratic_form_with_differences(&step.delta_w, &step.delta_gaps).sqrt();
        observer(&StepRecord {
            t,
            decrement,
            kkt_residual: step.residual,
            step_sum: step.delta_w.iter().sum(),
            sum_error: it.w.iter().sum::<f64>() - j,
            objective: e.objective,
        });
        let lambda2 = decrement * decrement;
        if 0.5 * lambda2 < cfg.newton_tol {
            return Ok((it, steps, decrement, Stop::Tolerance));
        }
        if steps >= cfg.max_newton {
            return Err(Error::Convergence { iterations: steps, decrement });
        }
        let slope: f64 = e.grad.iter().zip(&step.delta_w).map(|(g, s)| g * s).sum();
        let next = match search::search(prob, t, &it, &e.local, &step, slope, cfg.ls_alpha, cfg.ls_beta) {
            Ok((_, next)) => next,
            // The predicted decrease is not there even to first order: the
            // step is dominated by rounding and the iterate is as centered as
            // f64 allows.
            Err(Error::LineSearch { .. }) if applied_slope(&e, &it, t, &step) > -0.5 * lambda2 => {
                return Ok((it, steps, decrement, Stop::PrecisionFloor));
            }
            Err(err) => return Err(err),
        };
        it = next;
        steps += 1;
    }
}

/// Outer-loop statistics of a monotone solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveDiagnostics {
    pub outer_iterations: usize,
    /// Barrier parameter of the last centering, in the units of `g`.
    pub final_t: f64,
    pub newton_steps: usize,
    /// Number of effects in the optimization actually solved.
    pub solved_size: usize,
    /// Centerings that ended at the f64 rounding floor rather than at `newton_tol`.
    pub precision_floor_stops: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneSolution {
    /// Weights in the problem's (sorted) order.
    pub weights: WeightVector,
    pub diagnostics: SolveDiagnostics,
}

/// Barrier method for bounded monotone weights; requires `J <= cfg.subsample_l`.
pub fn solve_monotone(prob: &MonotoneProblem, cfg: &BarrierConfig) -> Result<MonotoneSolution> {
    solve_monotone_observed(prob, cfg, &mut |_| {})
}

/// [`solve_monotone`] reporting every Newton step to `observer`.
pub fn solve_monotone_observed(
    prob: &MonotoneProblem,
    cfg: &BarrierConfig,
    observer: &mut dyn FnMut(&StepRecord),
) -> Result<MonotoneSolution> {
    cfg.validate()?;
    let n = prob.len();
    if n > cfg.subsample_l {
        return domain(format!(
            "J = {n} exceeds the direct-solve limit {}; use the subsampling solver",
            cfg.subsample_l
        ));
    }
    let q = prob.q;
    let mut diagnostics = SolveDiagnostics {
        outer_iterations: 0,
        final_t: 0.0,
        newton_steps: 0,
        solved_size: n,
        precision_floor_stops: 0,
    };
    let mut w = feasible_start(n, prob.l, prob.u, q)?;
    if n > 1 {
        let gap_target = cfg.eps * q;
        let mut t = cfg.t0 / q;
        let mut it = Iterate::from_weights(&w, prob)?;
        loop {
            let (next, steps, _, stop) = centering_observed(it, t, prob, cfg, observer)
                .map_err(|e| Error::Solver { t, source: Box::new(e) })?;
            it = next;
            if stop == Stop::PrecisionFloor {
                diagnostics.precision_floor_stops += 1;
            }
            diagnostics.outer_iterations += 1;
            diagnostics.newton_steps += steps;
            diagnostics.final_t = t;
            if (n as f64 + 1.0) / t <= gap_target {
                break;
            }
            t *= cfg.kappa;
        }
        w = it.w;
        average_ties(prob.mu(), &mut w);
        // Weights and gaps are updated separately; keep rounding from
        // pushing an entry an ulp past a bound.
        let cap = prob.cap();
        w.iter_mut().for_each(|x| *x = x.clamp(prob.l, cap));
    }
    let weights = WeightVector::new(w, Some(q), Sidedness::OneSided)?;
    Ok(MonotoneSolution { weights, diagnostics })
}

/// Replaces weights of exactly tied effects by their group mean.
fn average_ties(mu: &[f64], w: &mut [f64]) {
    let mut start = 0;
    while start < mu.len() {
        let mut end = start + 1;
        while end < mu.len() && mu[end] == mu[start] {
            end += 1;
        }
        if end - start > 1 {
            let mean = w[start..end].iter().sum::<f64>() / (end - start) as f64;
            w[start..end].iter_mut().for_each(|x| *x = mean);
        }
        start = end;
    }
}

/// Sorts, solves (subsampling when large) and returns weights in input order.
pub fn monotone_weights(
    mu: &EffectSizeVector,
    q: f64,
    l: f64,
    u: f64,
    cfg: &BarrierConfig,
) -> Result<(WeightVector, SolveDiagnostics)> {
    let (prob, order) = MonotoneProblem::from_effects(mu, q, l, u)?;
    let sol = subsample_solve(&prob, cfg)?;
    let mut w = vec![0.0; order.len()];
    for (k, &i) in order.iter().enumerate() {
        w[i] = sol.weights.as_slice()[k];
    }
    Ok((WeightVector::new(w, Some(q), Sidedness::OneSided)?, sol.diagnostics))
}

/// Total power `sum_i f(w_i)` of weighted one-sided tests.
pub fn power_of_weights(w: &WeightVector, mu: &EffectSizeVector, q: f64) -> Result<f64> {
    power_of_slice(w.as_slice(), mu.values(), q)
}

/// [`power_of_weights`] on raw slices; accepts any weights in `[0, 1/q]`.
pub fn power_of_slice(w: &[f64], mu: &[f64], q: f64) -> Result<f64> {
    if w.len() != mu.len() {
        return domain(format!("{} weights for {} effects", w.len(), mu.len()));
    }
    w.iter().zip(mu).map(|(&wi, &m)| roc_value(wi, m, q)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn start_examples() {
        assert_eq!(feasible_start(1, 0.0, f64::INFINITY, 0.05).unwrap(), vec![1.0]);
        let w = feasible_start(3, 0.0, f64::INFINITY, 0.05).unwrap();
        for (a, b) in w.iter().zip([0.1, 1.0, 1.9]) {
            assert!((a - b).abs() < 1e-15);
        }
        let w = feasible_start(3, 0.95, 1.05, 0.05).unwrap();
        for (a, b) in w.iter().zip([0.955, 1.0, 1.045]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(matches!(feasible_start(3, 1.0, 2.0, 0.05), Err(Error::Infeasible(_))));
        assert!(matches!(feasible_start(3, 0.0, 30.0, 0.05), Err(Error::Infeasible(_))));
    }

    #[test]
    fn problem_validation() {
        assert!(MonotoneProblem::new(vec![-1.0, -2.0], 0.05, 0.0, f64::INFINITY).is_ok());
        assert!(MonotoneProblem::new(vec![-2.0, -1.0], 0.05, 0.0, f64::INFINITY).is_err());
        assert!(MonotoneProblem::new(vec![-1.0, 0.0], 0.05, 0.0, f64::INFINITY).is_err());
        assert!(MonotoneProblem::new(vec![-1.0], 0.05, 0.0, 1.0).is_err());
        let p = MonotoneProblem::new(vec![-1.0], 0.05, 0.0, f64::INFINITY).unwrap();
        assert_eq!(p.cap(), 20.0);
    }

    #[test]
    fn infeasible_iterate_rejected() {
        let p = MonotoneProblem::new(vec![-1.0, -2.0], 0.05, 0.5, 2.0).unwrap();
        assert!(centering_derivatives(&[0.4, 1.6], 1.0, &p).is_err());
        assert!(centering_derivatives(&[1.2, 0.8], 1.0, &p).is_err());
        assert!(centering_derivatives(&[0.9, 1.1], 1.0, &p).is_ok());
    }

    #[test]
    fn single_effect_is_trivial() {
        let p = MonotoneProblem::new(vec![-3.0], 1e-4, 0.0, f64::INFINITY).unwrap();
        let s = solve_monotone(&p, &BarrierConfig::default()).unwrap();
        assert_eq!(s.weights.as_slice(), &[1.0]);
    }

    #[test]
    fn ties_averaged() {
        let mut w = vec![0.5, 0.9, 1.1, 1.5];
        average_ties(&[-1.0, -2.0, -2.0, -3.0], &mut w);
        assert_eq!(w, vec![0.5, 1.0, 1.0, 1.5]);
    }

    #[test]
    fn power_edge_cases() {
        let mu = [-1e-300, -1e-300, -1e-300];
        let p = power_of_slice(&[1.0; 3], &mu, 0.01).unwrap();
        assert!((p - 0.03).abs() < 1e-12);
        assert_eq!(power_of_slice(&[0.0; 3], &[-2.0; 3], 0.01).unwrap(), 0.0);
        assert!(power_of_slice(&[1.0], &[-1.0, -2.0], 0.01).is_err());
    }
}
