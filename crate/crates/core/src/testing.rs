//! Applying weights to data: weighted Bonferroni, prior-to-current effect
//! transport for summary statistics, and method scoring.

use std::collections::{HashMap, HashSet};

use crate::error::{domain, Error, Result};
use crate::numkit::std_normal_quantile;
use crate::weights::{EffectSizeVector, WeightVector};

/// One row of a summary-statistics file.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryStatRecord {
    pub id: String,
    pub p_two_sided: f64,
    /// Per-record sample size.
    pub n: f64,
    /// Direction of the estimated effect (`+1` or `-1`), when known.
    pub sign: Option<f64>,
}

impl SummaryStatRecord {
    pub fn new(id: impl Into<String>, p_two_sided: f64, n: f64, sign: Option<f64>) -> Result<Self> {
        let id = id.into();
        if !(p_two_sided > 0.0 && p_two_sided <= 1.0) {
            return domain(format!("record {id:?}: p-value must lie in (0, 1], got {p_two_sided}"));
        }
        if !(n > 0.0 && n.is_finite()) {
            return domain(format!("record {id:?}: sample size must be positive, got {n}"));
        }
        if let Some(s) = sign {
            if s != 1.0 && s != -1.0 {
                return domain(format!("record {id:?}: sign must be +1 or -1, got {s}"));
            }
        }
        Ok(Self { id, p_two_sided, n, sign })
    }
}

/// Prior and current studies joined on identifier, in prior-study order.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedStudy {
    pub ids: Vec<String>,
    /// Prior z-scores, all negative by convention.
    pub prior_z: Vec<f64>,
    /// Prior z-scores transported to the current sample size.
    pub mu_hat: Vec<f64>,
    /// One-sided current p-values in the replication direction.
    pub current_p: Vec<f64>,
    /// Shared records dropped because the prior p-value was 1 (zero effect).
    pub dropped_zero_prior: usize,
}

impl PairedStudy {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn effects(&self) -> Result<EffectSizeVector> {
        EffectSizeVector::one_sided(self.mu_hat.clone())
    }
}

/// Outcome of weighted Bonferroni testing.
#[derive(Debug, Clone, PartialEq)]
pub struct RejectionReport {
    pub rejected: Vec<bool>,
    /// `Q_i = P_i / w_i`, infinite when `w_i = 0 < P_i`.
    pub weighted_p: Vec<f64>,
    pub q: f64,
    /// Family-wise level `J q`.
    pub alpha: f64,
    pub hits: usize,
}

/// `Phi^{-1}(p0 / 2)`: the prior z-score with its sign chosen negative.
pub fn z_from_two_sided_p(p0: f64) -> Result<f64> {
    if !(p0 > 0.0 && p0 <= 1.0) {
        return domain(format!("two-sided p-value must lie in (0, 1], got {p0}"));
    }
    if p0 == 1.0 {
        return Ok(0.0);
    }
    std_normal_quantile(0.5 * p0)
}

/// `mu_i = sqrt(n_i / n0_i) t0_i`.
pub fn rescale_effects(t0: &[f64], n: &[f64], n0: &[f64]) -> Result<Vec<f64>> {
    if t0.len() != n.len() || t0.len() != n0.len() {
        return domain(format!("misaligned inputs: {} z-scores, {} and {} sample sizes", t0.len(), n.len(), n0.len()));
    }
    t0.iter()
        .zip(n.iter().zip(n0))
        .enumerate()
        .map(|(i, (&z, (&a, &b)))| {
            if !(a > 0.0 && b > 0.0) {
                return domain(format!("entry {i}: sample sizes must be positive, got n = {a}, n0 = {b}"));
            }
            Ok((a / b).sqrt() * z)
        })
        .collect()
}

/// One-sided p-value for a replication-of-sign test.
///
/// `p / 2` when the current estimate points the same way as the prior one,
/// `1 - p / 2` otherwise. Without both directions the two-sided value is
/// returned, which is conservative for the one-sided test.
pub fn one_sided_current_p(p_current: f64, prior_sign: Option<f64>, current_sign: Option<f64>) -> f64 {
    match (prior_sign, current_sign) {
        (Some(a), Some(b)) if a == b => 0.5 * p_current,
        (Some(_), Some(_)) => 1.0 - 0.5 * p_current,
        _ => p_current,
    }
}

/// Rejects `H_i` when `P_i <= q w_i`; ties reject.
pub fn weighted_bonferroni(p: &[f64], w: &WeightVector, q: f64) -> Result<RejectionReport> {
    if p.len() != w.len() {
        return domain(format!("{} p-values for {} weights", p.len(), w.len()));
    }
    if !(q > 0.0 && q < 1.0) {
        return domain(format!("per-test level q must lie in (0, 1), got {q}"));
    }
    if let Some(i) = p.iter().position(|x| !(0.0..=1.0).contains(x)) {
        return domain(format!("p-value {i} is {}, outside [0, 1]", p[i]));
    }
    let rejected: Vec<bool> = p.iter().zip(w.as_slice()).map(|(&pi, &wi)| pi <= q * wi).collect();
    let weighted_p = p
        .iter()
        .zip(w.as_slice())
        .map(|(&pi, &wi)| if wi == 0.0 { if pi > 0.0 { f64::INFINITY } else { 0.0 } } else { pi / wi })
        .collect();
    let hits = rejected.iter().filter(|r| **r).count();
    Ok(RejectionReport { rejected, weighted_p, q, alpha: p.len() as f64 * q, hits })
}

/// `+1` if the method finds more hits than unweighted testing, `0` on a tie, `-1` otherwise.
pub fn score_method(hits_method: usize, hits_unweighted: usize) -> i32 {
    match hits_method.cmp(&hits_unweighted) {
        std::cmp::Ordering::Greater => 1,
        std::cmp::Ordering::Equal => 0,
        std::cmp::Ordering::Less => -1,
    }
}

/// Counts hits after collapsing identifiers into loci.
///
/// `locus_of` maps an identifier to its locus; unmapped identifiers are their own locus.
pub fn hits_by_locus(ids: &[String], rejected: &[bool], locus_of: &HashMap<String, String>) -> usize {
    ids.iter()
        .zip(rejected)
        .filter(|(_, r)| **r)
        .map(|(id, _)| locus_of.get(id).unwrap_or(id).as_str())
        .collect::<HashSet<_>>()
        .len()
}

fn index_unique(records: &[SummaryStatRecord]) -> Result<HashMap<&str, &SummaryStatRecord>> {
    let mut map = HashMap::with_capacity(records.len());
    for r in records {
        if map.insert(r.id.as_str(), r).is_some() {
            return Err(Error::DuplicateId(r.id.clone()));
        }
    }
    Ok(map)
}

/// Inner join on identifier in prior-study order, with prior z-scores
/// transported to the current sample sizes.
pub fn join_studies(prior: &[SummaryStatRecord], current: &[SummaryStatRecord]) -> Result<PairedStudy> {
    index_unique(prior)?;
    let current = index_unique(current)?;
    let mut out = PairedStudy {
        ids: Vec::new(),
        prior_z: Vec::new(),
        mu_hat: Vec::new(),
        current_p: Vec::new(),
        dropped_zero_prior: 0,
    };
    let mut shared = false;
    for r in prior {
        let Some(c) = current.get(r.id.as_str()) else { continue };
        shared = true;
        let z = z_from_two_sided_p(r.p_two_sided)?;
        if z == 0.0 {
            out.dropped_zero_prior += 1;
            continue;
        }
        out.ids.push(r.id.clone());
        out.prior_z.push(z);
        out.mu_hat.push((c.n / r.n).sqrt() * z);
        out.current_p.push(one_sided_current_p(c.p_two_sided, r.sign, c.sign));
    }
    if !shared {
        return Err(Error::EmptyJoin);
    }
    if out.ids.is_empty() {
        return domain("every shared record has prior p-value 1; nothing left to weight");
    }
    Ok(out)
}

/// Gives zero weight to every nonnegative effect and spreads the full budget
/// `J` over the negative ones.
///
/// `solve` receives the negative effects and the level `q J / J'` (`J'` of
/// them) and must return weights summing to `J'`; they are scaled by `J / J'`.
/// Scaling the weights and the level together leaves every threshold
/// `q w_i` unchanged, so the power objective is the same problem. Bounds
/// used inside `solve` are therefore in scaled units.
pub fn zero_weight_nonnegative<F>(mu: &[f64], q: f64, solve: F) -> Result<WeightVector>
where
    F: FnOnce(&EffectSizeVector, f64) -> Result<WeightVector>,
{
    let keep: Vec<usize> = (0..mu.len()).filter(|&i| mu[i] < 0.0).collect();
    if keep.is_empty() {
        return domain("no negative effects: every hypothesis would receive zero weight");
    }
    if let Some(i) = mu.iter().position(|m| m.is_nan()) {
        return domain(format!("effect {i} is NaN"));
    }
    let scale = mu.len() as f64 / keep.len() as f64;
    let sub = EffectSizeVector::one_sided(keep.iter().map(|&i| mu[i]).collect())?;
    let w = solve(&sub, q * scale)?;
    if w.len() != keep.len() {
        return domain(format!("solver returned {} weights for {} effects", w.len(), keep.len()));
    }
    let mut full = vec![0.0; mu.len()];
    for (&i, &wi) in keep.iter().zip(w.as_slice()) {
        full[i] = wi * scale;
    }
    WeightVector::new(full, Some(q), w.sided())
}
