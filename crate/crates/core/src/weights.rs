//! Closed-form optimal weights and simple comparator schemes.
//!
//! One-sided Gaussian weights maximize `sum_i Phi(Phi^{-1}(q w_i) - mu_i)`
//! subject to `sum_i w_i = J`; the optimum is `w_i = Phi(mu_i/2 + c/mu_i) / q`
//! for the unique `c` that makes the weights sum to `J`. Two-sided weights
//! have the analogous form `w(mu; lambda) = 2 Phi(-arccosh(lambda e^{mu^2/2} / q) / |mu|) / q`.

use crate::error::{domain, Error, Result};
use crate::numkit::{bisect_decreasing, bisect_tolerances, std_normal_cdf};
use crate::roc::two_sided_cap;

/// Relative tolerance on `sum w = J` targeted by the root finders.
const SUM_TOL: f64 = 1e-10;
/// Relative tolerance enforced on every returned weight vector.
pub const SUM_CHECK_TOL: f64 = 1e-8;

/// Standardized effect sizes together with their `|mu|`-ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectSizeVector {
    mu: Vec<f64>,
    order: Vec<usize>,
}

impl EffectSizeVector {
    /// Effects for one-sided tests: every entry strictly negative.
    pub fn one_sided(mu: Vec<f64>) -> Result<Self> {
        if let Some((i, m)) = mu.iter().enumerate().find(|(_, m)| !(**m < 0.0 && m.is_finite())) {
            return domain(format!(
                "one-sided effect sizes must be finite and negative; entry {i} is {m} \
                 (give non-negative effects zero weight before solving)"
            ));
        }
        Self::build(mu)
    }

    /// Effects for two-sided tests: every entry finite and nonzero.
    pub fn two_sided(mu: Vec<f64>) -> Result<Self> {
        if let Some((i, m)) = mu.iter().enumerate().find(|(_, m)| !(**m != 0.0 && m.is_finite())) {
            return domain(format!("two-sided effect sizes must be finite and nonzero; entry {i} is {m}"));
        }
        Self::build(mu)
    }

    /// Any finite effects (used by the heuristic schemes).
    pub fn unrestricted(mu: Vec<f64>) -> Result<Self> {
        if let Some((i, m)) = mu.iter().enumerate().find(|(_, m)| !m.is_finite()) {
            return domain(format!("effect size {i} is not finite: {m}"));
        }
        Self::build(mu)
    }

    fn build(mu: Vec<f64>) -> Result<Self> {
        if mu.is_empty() {
            return domain("effect-size vector is empty");
        }
        let mut order: Vec<usize> = (0..mu.len()).collect();
        order.sort_by(|&a, &b| mu[a].abs().total_cmp(&mu[b].abs()));
        Ok(Self { mu, order })
    }

    pub fn values(&self) -> &[f64] {
        &self.mu
    }

    /// Input indices listed by increasing `|mu|`.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    /// Distinct values with multiplicities, in `|mu|`-ascending order.
    fn grouped(&self) -> Vec<(f64, f64)> {
        let mut groups: Vec<(f64, f64)> = Vec::new();
        for &i in &self.order {
            let m = self.mu[i];
            match groups.last_mut() {
                Some((v, n)) if *v == m => *n += 1.0,
                _ => groups.push((m, 1.0)),
            }
        }
        // Equal |mu| with opposite signs are not adjacent in general, which only costs evaluations.
        groups
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sidedness {
    OneSided,
    TwoSided,
}

/// Nonnegative weights averaging one, in the caller's input order.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    w: Vec<f64>,
    q: Option<f64>,
    sided: Sidedness,
}

impl WeightVector {
    /// Wraps and validates weights: nonnegative, summing to `J`, and under
    /// the cap `1/q` (one-sided) or `1/(2q)` (two-sided) when `q` is given.
    pub fn new(w: Vec<f64>, q: Option<f64>, sided: Sidedness) -> Result<Self> {
        let v = Self { w, q, sided };
        v.validate()?;
        Ok(v)
    }

    pub(crate) fn new_unchecked(w: Vec<f64>, q: Option<f64>, sided: Sidedness) -> Self {
        Self { w, q, sided }
    }

    pub fn validate(&self) -> Result<()> {
        let j = self.w.len() as f64;
        if self.w.is_empty() {
            return domain("weight vector is empty");
        }
        let sum: f64 = self.w.iter().sum();
        if !((sum - j).abs() <= SUM_CHECK_TOL * j) {
            return domain(format!("weights sum to {sum}, expected {j}"));
        }
        let cap = self.cap();
        for (i, &x) in self.w.iter().enumerate() {
            if !(x >= 0.0) || x > cap * (1.0 + 1e-12) {
                return domain(format!("weight {i} = {x} outside [0, {cap}]"));
            }
        }
        Ok(())
    }

    /// Upper bound implied by `q` and the sidedness (infinite without `q`).
    pub fn cap(&self) -> f64 {
        match (self.q, self.sided) {
            (None, _) => f64::INFINITY,
            (Some(q), Sidedness::OneSided) => 1.0 / q,
            (Some(q), Sidedness::TwoSided) => 1.0 / (2.0 * q),
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.w
    }

    pub fn q(&self) -> Option<f64> {
        self.q
    }

    pub fn sided(&self) -> Sidedness {
        self.sided
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }
}

fn check_q(q: f64) -> Result<()> {
    if !(q > 0.0 && q < 1.0) {
        return domain(format!("per-test level q must lie in (0, 1), got {q}"));
    }
    Ok(())
}

/// One-sided Gaussian optimum and its threshold constant.
#[derive(Debug, Clone, PartialEq)]
pub struct SpjotvollSolution {
    pub weights: WeightVector,
    /// The constant `c` in `w_i = Phi(mu_i/2 + c/mu_i) / q`.
    pub c: f64,
}

/// `G(c) = sum_i Phi(mu_i/2 + c/mu_i)` over grouped effects.
fn one_sided_level_sum(groups: &[(f64, f64)], c: f64) -> f64 {
    groups.iter().map(|&(m, n)| n * std_normal_cdf(0.5 * m + c / m)).sum()
}

/// Optimal one-sided Gaussian weights without further constraints.
pub fn spjotvoll_one_sided(mu: &EffectSizeVector, q: f64) -> Result<SpjotvollSolution> {
    check_q(q)?;
    if let Some(m) = mu.values().iter().find(|m| !(**m < 0.0)) {
        return domain(format!("one-sided weights need negative effects, found {m}"));
    }
    let groups = mu.grouped();
    let j = mu.len() as f64;
    let target = j * q;
    let g = |c: f64| one_sided_level_sum(&groups, c);

    let m_max = mu.values().iter().map(|m| 0.5 * m * m).fold(0.0, f64::max);
    let mut hi = m_max + 50.0;
    let mut lo = 0.0;
    let mut step = 1.0;
    while g(lo) < target {
        lo -= step;
        step *= 2.0;
        if step > 1e300 {
            return Err(Error::Bracketing { lo, hi, f_lo: g(lo), f_hi: g(hi), target });
        }
    }
    let mut step = hi.max(1.0);
    while g(hi) > target {
        hi += step;
        step *= 2.0;
        if step > 1e300 {
            return Err(Error::Bracketing { lo, hi, f_lo: g(lo), f_hi: g(hi), target });
        }
    }
    let c = bisect_tolerances(g, lo, hi, target, SUM_TOL * target, 0.0)?;
    let w: Vec<f64> = mu
        .values()
        .iter()
        .map(|&m| (std_normal_cdf(0.5 * m + c / m) / q).min(1.0 / q))
        .collect();
    let weights = WeightVector::new(w, Some(q), Sidedness::OneSided).map_err(|e| {
        Error::Infeasible(format!("one-sided closed form failed its post-check: {e}"))
    })?;
    Ok(SpjotvollSolution { weights, c })
}

/// `arccosh(e^L)` for `L >= 0`, without forming `e^L`.
fn arccosh_exp(log_x: f64) -> f64 {
    let l = log_x.max(0.0);
    l + (1.0 + (-(-2.0 * l).exp_m1()).sqrt()).ln()
}

/// Two-sided weight `w(mu; lambda)` with `lambda = exp(log_lambda)`.
pub fn two_sided_weight(mu: f64, log_lambda: f64, q: f64) -> f64 {
    let log_x = log_lambda + 0.5 * mu * mu - q.ln();
    2.0 * std_normal_cdf(-arccosh_exp(log_x) / mu.abs()) / q
}

fn two_sided_sum(groups: &[(f64, f64)], log_lambda: f64, q: f64) -> f64 {
    groups.iter().map(|&(m, n)| n * two_sided_weight(m, log_lambda, q)).sum()
}

/// Two-sided Gaussian optimum.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSidedSolution {
    pub weights: WeightVector,
    /// Dual constant `lambda`.
    pub lambda: f64,
    /// `m = min_i mu_i^2 / 2`.
    pub m: f64,
}

/// Optimal two-sided Gaussian weights.
///
/// Requires `H(q e^{-m}) >= J`; otherwise no interior optimum of the closed
/// form exists and an error carrying `H(q e^{-m})` is returned.
pub fn spjotvoll_two_sided(mu: &EffectSizeVector, q: f64) -> Result<TwoSidedSolution> {
    check_q(q)?;
    if let Some(m) = mu.values().iter().find(|m| !(**m != 0.0)) {
        return domain(format!("two-sided weights need nonzero effects, found {m}"));
    }
    let groups = mu.grouped();
    let j = mu.len() as f64;
    let m = mu.values().iter().map(|x| 0.5 * x * x).fold(f64::INFINITY, f64::min);
    let floor = q.ln() - m;
    let h = |ll: f64| two_sided_sum(&groups, ll, q);
    let h_floor = h(floor);
    if h_floor < j {
        return Err(Error::NoInteriorSolution { h_at_floor: h_floor, j: mu.len() });
    }
    let mut hi = floor + 1.0;
    let mut step = 1.0;
    while h(hi) > j {
        hi += step;
        step *= 2.0;
        if step > 1e300 {
            return Err(Error::Bracketing { lo: floor, hi, f_lo: h_floor, f_hi: h(hi), target: j });
        }
    }
    let log_lambda = bisect_tolerances(h, floor, hi, j, SUM_TOL * j, 0.0)?;
    let w: Vec<f64> = mu.values().iter().map(|&x| two_sided_weight(x, log_lambda, q)).collect();
    let cap = two_sided_cap(q);
    if let Some(big) = w.iter().find(|x| **x > cap) {
        return Err(Error::Infeasible(format!(
            "closed-form two-sided weight {big} exceeds the cap 1/(2q) = {cap}; decrease q"
        )));
    }
    let weights = WeightVector::new(w, Some(q), Sidedness::TwoSided).map_err(|e| {
        Error::Infeasible(format!("two-sided closed form failed its post-check: {e}"))
    })?;
    Ok(TwoSidedSolution { weights, lambda: log_lambda.exp(), m })
}

/// Certificate for the small-`q` monotonicity condition on one-sided weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneSidedRegime {
    pub monotone: bool,
    /// `G(M) = sum_i Phi(mu_i/2 + M/mu_i)`.
    pub g_at_max: f64,
    /// `M = max_i mu_i^2 / 2`.
    pub m_max: f64,
}

/// Checks `q <= G(M)/J`, under which the one-sided closed-form weights are
/// nondecreasing in `|mu|`.
pub fn monotone_regime_one_sided(mu: &EffectSizeVector, q: f64) -> Result<OneSidedRegime> {
    if let Some(m) = mu.values().iter().find(|m| !(**m < 0.0)) {
        return domain(format!("one-sided regime check needs negative effects, found {m}"));
    }
    let m_max = mu.values().iter().map(|m| 0.5 * m * m).fold(0.0, f64::max);
    let g_at_max = one_sided_level_sum(&mu.grouped(), m_max);
    Ok(OneSidedRegime { monotone: q <= g_at_max / mu.len() as f64, g_at_max, m_max })
}

/// Certificate for the two-sided monotonicity condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSidedRegime {
    pub monotone: bool,
    /// Root of `log(a) - m = (2a / sqrt(a^2 - 1) - 1) M` on `(1, inf)`.
    pub a_star: f64,
    pub m: f64,
    pub m_max: f64,
    /// `H(q a* e^{-m})`.
    pub h_at_threshold: f64,
}

/// `f1(a) - f2(a)` from the two-sided monotonicity condition; increasing on `(1, inf)`.
pub fn two_sided_regime_gap(a: f64, m: f64, m_max: f64) -> f64 {
    a.ln() - m - (2.0 * a / (a * a - 1.0).sqrt() - 1.0) * m_max
}

/// Checks `H(q a* e^{-m}) >= J`, under which two-sided weights are
/// nondecreasing in `|mu|`.
pub fn monotone_regime_two_sided(mu: &EffectSizeVector, q: f64) -> Result<TwoSidedRegime> {
    check_q(q)?;
    if let Some(m) = mu.values().iter().find(|m| !(**m != 0.0)) {
        return domain(format!("two-sided regime check needs nonzero effects, found {m}"));
    }
    let m = mu.values().iter().map(|x| 0.5 * x * x).fold(f64::INFINITY, f64::min);
    let m_max = mu.values().iter().map(|x| 0.5 * x * x).fold(0.0, f64::max);
    let neg_gap = |a: f64| -two_sided_regime_gap(a, m, m_max);
    // Bisect in log(a - 1): the gap tends to -inf at 1+ and to +inf as a grows.
    let mut lo = -30.0f64;
    while neg_gap(1.0 + lo.exp()) <= 0.0 {
        lo -= 10.0;
        if lo < -700.0 {
            return domain("two-sided regime equation has no root near a = 1");
        }
    }
    let mut hi = 1.0f64;
    while neg_gap(1.0 + hi.exp()) > 0.0 {
        hi *= 2.0;
        if hi > 700.0 {
            return domain("two-sided regime equation has no finite root");
        }
    }
    let s = bisect_decreasing(|s: f64| neg_gap(1.0 + s.exp()), lo, hi, 0.0, 1e-13)?;
    let a_star = 1.0 + s.exp();
    let h_at_threshold = two_sided_sum(&mu.grouped(), q.ln() + a_star.ln() - m, q);
    Ok(TwoSidedRegime { monotone: h_at_threshold >= mu.len() as f64, a_star, m, m_max, h_at_threshold })
}

/// `w_i = J exp(beta |mu_i|) / sum_j exp(beta |mu_j|)`.
pub fn exponential_weights(mu: &EffectSizeVector, beta: f64) -> Result<WeightVector> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return domain(format!("beta must be finite and nonnegative, got {beta}"));
    }
    let top = mu.values().iter().map(|m| beta * m.abs()).fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<f64> = mu.values().iter().map(|m| (beta * m.abs() - top).exp()).collect();
    let total: f64 = raw.iter().sum();
    let j = mu.len() as f64;
    let w = raw.into_iter().map(|r| j * r / total).collect();
    Ok(WeightVector::new_unchecked(w, None, Sidedness::OneSided))
}

/// Equal weight `J/K` on the `K` hypotheses whose prior p-value is at most
/// `cutoff`, zero elsewhere.
pub fn filter_weights(prior_p: &[f64], cutoff: f64) -> Result<WeightVector> {
    if !(cutoff > 0.0 && cutoff < 1.0) {
        return domain(format!("cutoff must lie in (0, 1), got {cutoff}"));
    }
    if prior_p.is_empty() {
        return domain("no prior p-values");
    }
    let k = prior_p.iter().filter(|&&p| p <= cutoff).count();
    if k == 0 {
        return Err(Error::EmptySelection { cutoff });
    }
    let share = prior_p.len() as f64 / k as f64;
    let w = prior_p.iter().map(|&p| if p <= cutoff { share } else { 0.0 }).collect();
    Ok(WeightVector::new_unchecked(w, None, Sidedness::OneSided))
}
