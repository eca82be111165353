//! Dispatch from a scheme name and its flags to a weight vector.

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use pweight_core::barrier::{monotone_weights, BarrierConfig, SolveDiagnostics};
use pweight_core::testing::zero_weight_nonnegative;
use pweight_core::weights::{
    exponential_weights, filter_weights, spjotvoll_one_sided, spjotvoll_two_sided, EffectSizeVector,
    Sidedness, WeightVector,
};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// One-sided optimal weights.
    Spjotvoll,
    /// Two-sided optimal weights.
    TwoSided,
    /// Bounded weights nondecreasing in |mu|.
    Monotone,
    /// Weights proportional to exp(beta |mu|).
    Exponential,
    /// Equal weight on prior p-values at or below a cutoff.
    Filter,
    /// All weights one.
    Unweighted,
}

impl Scheme {
    /// Filtering reads prior p-values instead of effect sizes.
    pub fn input_column(self) -> &'static str {
        match self {
            Scheme::Filter => "p",
            _ => "mu",
        }
    }
}

/// Scheme flags; unused ones are ignored.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchemeParams {
    pub q: Option<f64>,
    pub l: f64,
    #[serde(serialize_with = "crate::manifest::serialize_real")]
    pub u: f64,
    pub beta: Option<f64>,
    pub cutoff: Option<f64>,
    /// Give nonnegative effects zero weight instead of refusing them.
    pub zero_nonnegative: bool,
    #[serde(skip)]
    pub barrier: BarrierConfig,
}

impl Default for SchemeParams {
    fn default() -> Self {
        Self {
            q: None,
            l: 0.0,
            u: f64::INFINITY,
            beta: None,
            cutoff: None,
            zero_nonnegative: false,
            barrier: BarrierConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Computed {
    pub weights: WeightVector,
    /// Box promised by the scheme, if any.
    pub bounds: Option<(f64, f64)>,
    /// Whether the scheme promises weights nondecreasing in `|mu|`.
    pub monotone: bool,
    pub diagnostics: Option<SolveDiagnostics>,
}

fn need(x: Option<f64>, flag: &str, scheme: Scheme) -> Result<f64> {
    x.with_context(|| format!("scheme {scheme:?} needs {flag}"))
}

fn one_sided_hint(e: pweight_core::Error) -> anyhow::Error {
    anyhow::Error::new(e).context("one-sided schemes need negative effects; pass --zero-nonnegative to give the rest zero weight")
}

/// Computes weights for `values` (effects, or prior p-values for `filter`).
pub fn compute(scheme: Scheme, values: &[f64], p: &SchemeParams) -> Result<Computed> {
    let plain = |weights| Computed { weights, bounds: None, monotone: false, diagnostics: None };
    Ok(match scheme {
        Scheme::Unweighted => plain(WeightVector::new(vec![1.0; values.len()], None, Sidedness::OneSided)?),
        Scheme::Filter => plain(filter_weights(values, need(p.cutoff, "--cutoff", scheme)?)?),
        Scheme::Exponential => Computed {
            monotone: true,
            ..plain(exponential_weights(
                &EffectSizeVector::unrestricted(values.to_vec())?,
                need(p.beta, "--beta", scheme)?,
            )?)
        },
        Scheme::TwoSided => {
            let q = need(p.q, "--q", scheme)?;
            plain(spjotvoll_two_sided(&EffectSizeVector::two_sided(values.to_vec())?, q)?.weights)
        }
        Scheme::Spjotvoll => {
            let q = need(p.q, "--q", scheme)?;
            let solve = |mu: &EffectSizeVector, q: f64| spjotvoll_one_sided(mu, q).map(|s| s.weights);
            let weights = if p.zero_nonnegative {
                zero_weight_nonnegative(values, q, solve)?
            } else {
                solve(&EffectSizeVector::one_sided(values.to_vec()).map_err(one_sided_hint)?, q)?
            };
            plain(weights)
        }
        Scheme::Monotone => {
            let q = need(p.q, "--q", scheme)?;
            let mut diag = None;
            let mut solve = |mu: &EffectSizeVector, q: f64| {
                monotone_weights(mu, q, p.l, p.u, &p.barrier).map(|(w, d)| {
                    diag = Some(d);
                    w
                })
            };
            let weights = if p.zero_nonnegative {
                zero_weight_nonnegative(values, q, &mut solve)?
            } else {
                solve(&EffectSizeVector::one_sided(values.to_vec()).map_err(one_sided_hint)?, q)?
            };
            // With zero-weighting the box applies to the negative effects before rescaling.
            let bounds = (!p.zero_nonnegative).then_some((p.l, p.u.min(1.0 / q)));
            Computed { weights, bounds, monotone: !p.zero_nonnegative, diagnostics: diag }
        }
    })
}

/// Sum, extremes and bound activity of a weight vector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightSummary {
    pub j: usize,
    pub sum: f64,
    pub relative_sum_error: f64,
    pub min: f64,
    pub max: f64,
    pub at_lower: usize,
    pub at_upper: usize,
}

const ACTIVE_TOL: f64 = 1e-9;

/// Re-validates emitted weights: sum `J` within relative 1e-8, the box, and
/// monotonicity in `|mu|` where the scheme promises it.
pub fn check(c: &Computed, effects: &[f64]) -> Result<WeightSummary> {
    c.weights.validate()?;
    let w = c.weights.as_slice();
    let j = w.len();
    let sum: f64 = w.iter().sum();
    let (lo, hi) = c.bounds.unwrap_or((0.0, f64::INFINITY));
    let slack = |b: f64| ACTIVE_TOL * b.abs().max(1.0);
    if let Some(x) = w.iter().find(|&&x| x < lo - slack(lo) || x > hi + slack(hi)) {
        bail!("weight {x} escapes the box [{lo}, {hi}]");
    }
    if c.monotone {
        let mut order: Vec<usize> = (0..j).collect();
        order.sort_by(|&a, &b| effects[a].abs().total_cmp(&effects[b].abs()));
        for pair in order.windows(2) {
            let (a, b) = (w[pair[0]], w[pair[1]]);
            if effects[pair[0]].abs() < effects[pair[1]].abs() && b < a - slack(a) {
                bail!("weights decrease in |mu|: {a} then {b}");
            }
        }
    }
    let (at_lower, at_upper) = match c.bounds {
        Some((l, u)) => (
            w.iter().filter(|&&x| x <= l + slack(l)).count(),
            w.iter().filter(|&&x| u.is_finite() && x >= u - slack(u)).count(),
        ),
        None => (0, 0),
    };
    Ok(WeightSummary {
        j,
        sum,
        relative_sum_error: (sum - j as f64).abs() / j as f64,
        min: w.iter().copied().fold(f64::INFINITY, f64::min),
        max: w.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        at_lower,
        at_upper,
    })
}
