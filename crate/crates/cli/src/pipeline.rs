//! Prior study to current study: join, weight, test, score.

use std::collections::HashMap;

use anyhow::{Context, Result};
use pweight_core::testing::{
    hits_by_locus, join_studies, score_method, weighted_bonferroni, PairedStudy, RejectionReport,
    SummaryStatRecord,
};
use pweight_core::weights::{Sidedness, WeightVector};
use serde::Serialize;

use crate::scheme::{compute, Scheme, SchemeParams};
use crate::tsv::{fmt_real, Table};

/// Per-test level, given directly or as a family-wise level split over `J`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Level {
    PerTest(f64),
    FamilyWise(f64),
}

impl Level {
    pub fn per_test(self, j: usize) -> f64 {
        match self {
            Level::PerTest(q) => q,
            Level::FamilyWise(alpha) => alpha / j as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestOutcome {
    pub study: PairedStudy,
    pub weights: WeightVector,
    pub report: RejectionReport,
    pub unweighted_hits: usize,
    pub score: i32,
    /// Hits after collapsing to loci, when a grouping was given: (method, unweighted).
    pub locus_hits: Option<(usize, usize)>,
}

pub fn run(
    prior: &[SummaryStatRecord],
    current: &[SummaryStatRecord],
    scheme: Scheme,
    params: &SchemeParams,
    level: Level,
    loci: Option<&HashMap<String, String>>,
) -> Result<TestOutcome> {
    let study = join_studies(prior, current)?;
    let q = level.per_test(study.len());
    let params = SchemeParams { q: Some(q), ..params.clone() };
    let values = match scheme {
        Scheme::Filter => {
            let p0: HashMap<&str, f64> = prior.iter().map(|r| (r.id.as_str(), r.p_two_sided)).collect();
            study.ids.iter().map(|id| p0[id.as_str()]).collect()
        }
        _ => study.mu_hat.clone(),
    };
    let weights = compute(scheme, &values, &params).context("computing weights")?.weights;
    let report = weighted_bonferroni(&study.current_p, &weights, q)?;
    let ones = WeightVector::new(vec![1.0; study.len()], None, Sidedness::OneSided)?;
    let unweighted = weighted_bonferroni(&study.current_p, &ones, q)?;
    let locus_hits = loci.map(|m| {
        (hits_by_locus(&study.ids, &report.rejected, m), hits_by_locus(&study.ids, &unweighted.rejected, m))
    });
    let score = match locus_hits {
        Some((a, b)) => score_method(a, b),
        None => score_method(report.hits, unweighted.hits),
    };
    Ok(TestOutcome { study, weights, report, unweighted_hits: unweighted.hits, score, locus_hits })
}

impl TestOutcome {
    /// `id, p, weight, weighted_p, reject` in prior-study order.
    pub fn table(&self) -> Table {
        let mut t = Table::new(&["id", "p", "weight", "weighted_p", "reject"]);
        for i in 0..self.study.len() {
            t.push(vec![
                self.study.ids[i].clone(),
                fmt_real(self.study.current_p[i]),
                fmt_real(self.weights.as_slice()[i]),
                fmt_real(self.report.weighted_p[i]),
                u8::from(self.report.rejected[i]).to_string(),
            ]);
        }
        t
    }

    pub fn summary_line(&self) -> String {
        let mut s = format!(
            "J={} dropped_zero_prior={} q={:e} alpha={} hits={} unweighted_hits={}",
            self.study.len(),
            self.study.dropped_zero_prior,
            self.report.q,
            self.report.alpha,
            self.report.hits,
            self.unweighted_hits
        );
        if let Some((a, b)) = self.locus_hits {
            s.push_str(&format!(" locus_hits={a} unweighted_locus_hits={b}"));
        }
        s.push_str(&format!(" score={:+}", self.score));
        s
    }
}
