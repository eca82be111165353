//! Seeded simulation experiments behind `pweight simulate`.
//!
//! Effects are `mu_i = -|Z_i|` with `Z_i` iid standard normal drawn from
//! ChaCha8. Every experiment draws from its own stream of the seeded
//! generator, so results do not depend on thread count or scheduling.

use std::time::Instant;

use anyhow::{Context, Result};
use clap::ValueEnum;
use pweight_core::barrier::{
    monotone_weights, power_of_slice, solve_monotone, subsample_solve, BarrierConfig, MonotoneProblem,
};
use pweight_core::weights::{monotone_regime_one_sided, spjotvoll_one_sided, EffectSizeVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::tsv::{fmt_real, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    /// Monotone weights under varying lower and upper bounds.
    WeightShapes,
    /// Power of bounded weights against the unbounded optimum.
    PowerLoss,
    /// Subsampled against full barrier solves.
    SubsampleAccuracy,
    /// Monotone against closed-form weights where both coincide.
    SpjotVsMonotone,
    /// Wall-clock time of monotone solves across problem sizes.
    Timing,
}

/// Generator for stream `stream` of `seed`.
pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `J` effects `-|Z|`, redrawing exact zeros.
pub fn negative_half_normal(rng: &mut impl Rng, j: usize) -> Vec<f64> {
    (0..j)
        .map(|_| loop {
            let z: f64 = rng.sample(StandardNormal);
            if z != 0.0 {
                break -z.abs();
            }
        })
        .collect()
}

/// Sorted-order solve returning `(mu, w)` in `|mu|`-ascending order.
fn sorted_monotone(mu: &[f64], q: f64, l: f64, u: f64, cfg: &BarrierConfig) -> Result<(Vec<f64>, Vec<f64>)> {
    let (prob, _) = MonotoneProblem::from_effects(&EffectSizeVector::one_sided(mu.to_vec())?, q, l, u)?;
    let sol = subsample_solve(&prob, cfg)?;
    Ok((prob.mu().to_vec(), sol.weights.into_vec()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeCurve {
    pub panel: &'static str,
    pub l: f64,
    pub u: f64,
    /// `|mu|`-ascending.
    pub mu: Vec<f64>,
    pub w: Vec<f64>,
}

pub const SHAPES_J: usize = 1000;
pub const SHAPES_Q: f64 = 1e-7;

/// Lower bounds 0 to 0.75 with no upper bound, upper bounds 1.25 to 2 with
/// no lower bound, and both bounds together.
pub fn weight_shapes(seed: u64, cfg: &BarrierConfig) -> Result<Vec<ShapeCurve>> {
    let mu = negative_half_normal(&mut stream(seed, 0), SHAPES_J);
    let mut configs: Vec<(&'static str, f64, f64)> = Vec::new();
    configs.extend([0.0, 0.25, 0.5, 0.75].map(|l| ("lower", l, f64::INFINITY)));
    configs.extend([1.25, 1.5, 1.75, 2.0].map(|u| ("upper", 0.0, u)));
    for l in [0.25, 0.5] {
        configs.extend([1.5, 1.75].map(|u| ("both", l, u)));
    }
    configs
        .par_iter()
        .map(|&(panel, l, u)| {
            let (mu, w) = sorted_monotone(&mu, SHAPES_Q, l, u, cfg)
                .with_context(|| format!("weight shapes at l = {l}, u = {u}"))?;
            Ok(ShapeCurve { panel, l, u, mu, w })
        })
        .collect()
}

pub fn shapes_table(curves: &[ShapeCurve]) -> Table {
    let mut t = Table::new(&["panel", "l", "u", "mu", "weight"]);
    for c in curves {
        for (m, w) in c.mu.iter().zip(&c.w) {
            t.push(vec![c.panel.into(), fmt_real(c.l), fmt_real(c.u), fmt_real(*m), fmt_real(*w)]);
        }
    }
    t
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerLossRow {
    pub l: f64,
    pub u: f64,
    pub power: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerLoss {
    pub unweighted: f64,
    pub spjotvoll: f64,
    pub rows: Vec<PowerLossRow>,
}

pub const POWER_LOSS_J: usize = 10_000;
pub const POWER_LOSS_LOWER: [f64; 7] = [1e-3, 5e-3, 1e-2, 5e-2, 1e-1, 5e-1, 0.9];
pub const POWER_LOSS_UPPER: [f64; 3] = [2.0, 10.0, f64::INFINITY];

/// Summed power of bounded monotone weights over the lower/upper grid,
/// with unweighted and closed-form references.
pub fn power_loss(seed: u64, cfg: &BarrierConfig) -> Result<PowerLoss> {
    let j = POWER_LOSS_J;
    let q = 0.05 / j as f64;
    let mu = negative_half_normal(&mut stream(seed, 0), j);
    let unweighted = power_of_slice(&vec![1.0; j], &mu, q)?;
    let spj = spjotvoll_one_sided(&EffectSizeVector::one_sided(mu.clone())?, q)?;
    let spjotvoll = power_of_slice(spj.weights.as_slice(), &mu, q)?;
    let grid: Vec<(f64, f64)> =
        POWER_LOSS_UPPER.iter().flat_map(|&u| POWER_LOSS_LOWER.iter().map(move |&l| (l, u))).collect();
    let rows = grid
        .par_iter()
        .map(|&(l, u)| {
            let (m, w) = sorted_monotone(&mu, q, l, u, cfg).with_context(|| format!("power loss at l = {l}, u = {u}"))?;
            Ok(PowerLossRow { l, u, power: power_of_slice(&w, &m, q)? })
        })
        .collect::<Result<_>>()?;
    Ok(PowerLoss { unweighted, spjotvoll, rows })
}

pub fn power_loss_table(p: &PowerLoss) -> Table {
    let mut t = Table::new(&["l", "u", "power", "unweighted_power", "spjotvoll_power", "relative_power"]);
    for r in &p.rows {
        t.push(vec![
            fmt_real(r.l),
            fmt_real(r.u),
            fmt_real(r.power),
            fmt_real(p.unweighted),
            fmt_real(p.spjotvoll),
            fmt_real(r.power / p.spjotvoll),
        ]);
    }
    t
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubsampleAccuracy {
    /// `|mu|`-ascending.
    pub mu: Vec<f64>,
    pub full: Vec<f64>,
    pub subsampled: Vec<f64>,
    pub solved_size: usize,
}

impl SubsampleAccuracy {
    pub fn max_abs_error(&self) -> f64 {
        self.full.iter().zip(&self.subsampled).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

pub const SUBSAMPLE_J: usize = 20_000;
pub const SUBSAMPLE_Q: f64 = 5e-3;

/// Full barrier solve against the subsampled solve, `l = 0`, `u = inf`.
pub fn subsample_accuracy(seed: u64, cfg: &BarrierConfig) -> Result<SubsampleAccuracy> {
    let mu = negative_half_normal(&mut stream(seed, 0), SUBSAMPLE_J);
    let (prob, _) = MonotoneProblem::from_effects(&EffectSizeVector::one_sided(mu)?, SUBSAMPLE_Q, 0.0, f64::INFINITY)?;
    let full_cfg = BarrierConfig { subsample_l: SUBSAMPLE_J, ..cfg.clone() };
    let (full, sub) = rayon::join(|| solve_monotone(&prob, &full_cfg), || subsample_solve(&prob, cfg));
    let (full, sub) = (full.context("full solve")?, sub.context("subsampled solve")?);
    Ok(SubsampleAccuracy {
        mu: prob.mu().to_vec(),
        full: full.weights.into_vec(),
        solved_size: sub.diagnostics.solved_size,
        subsampled: sub.weights.into_vec(),
    })
}

pub fn subsample_table(s: &SubsampleAccuracy) -> Table {
    let mut t = Table::new(&["mu", "w_full", "w_subsample", "abs_error", "rel_error"]);
    for i in 0..s.mu.len() {
        let err = (s.full[i] - s.subsampled[i]).abs();
        t.push(vec![
            fmt_real(s.mu[i]),
            fmt_real(s.full[i]),
            fmt_real(s.subsampled[i]),
            fmt_real(err),
            fmt_real(err / s.full[i].abs()),
        ]);
    }
    t
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpjotVsMonotone {
    /// `|mu|`-ascending.
    pub mu: Vec<f64>,
    pub spjotvoll: Vec<f64>,
    pub monotone: Vec<f64>,
    /// Closed-form weights certified monotone at this level.
    pub regime: bool,
}

impl SpjotVsMonotone {
    pub fn max_abs_diff(&self) -> f64 {
        self.spjotvoll.iter().zip(&self.monotone).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

pub const COMPARE_J: usize = 1000;
pub const COMPARE_Q: f64 = 1e-7;

pub fn spjot_vs_monotone(seed: u64, cfg: &BarrierConfig) -> Result<SpjotVsMonotone> {
    let mu = negative_half_normal(&mut stream(seed, 0), COMPARE_J);
    let effects = EffectSizeVector::one_sided(mu.clone())?;
    let regime = monotone_regime_one_sided(&effects, COMPARE_Q)?.monotone;
    let spj = spjotvoll_one_sided(&effects, COMPARE_Q)?;
    let (mono, _) = monotone_weights(&effects, COMPARE_Q, 0.0, f64::INFINITY, cfg)?;
    let order = effects.order();
    let pick = |w: &[f64]| order.iter().map(|&i| w[i]).collect::<Vec<_>>();
    Ok(SpjotVsMonotone {
        mu: pick(&mu),
        spjotvoll: pick(spj.weights.as_slice()),
        monotone: pick(mono.as_slice()),
        regime,
    })
}

pub fn compare_table(s: &SpjotVsMonotone) -> Table {
    let mut t = Table::new(&["mu", "w_spjotvoll", "w_monotone", "abs_diff"]);
    for i in 0..s.mu.len() {
        t.push(vec![
            fmt_real(s.mu[i]),
            fmt_real(s.spjotvoll[i]),
            fmt_real(s.monotone[i]),
            fmt_real((s.spjotvoll[i] - s.monotone[i]).abs()),
        ]);
    }
    t
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingRow {
    pub j: usize,
    /// Wall-clock seconds per trial, in trial order.
    pub seconds: Vec<f64>,
}

impl TimingRow {
    pub fn median(&self) -> f64 {
        let mut s = self.seconds.clone();
        s.sort_by(f64::total_cmp);
        let n = s.len();
        if n % 2 == 1 {
            s[n / 2]
        } else {
            0.5 * (s[n / 2 - 1] + s[n / 2])
        }
    }

    pub fn mean(&self) -> f64 {
        self.seconds.iter().sum::<f64>() / self.seconds.len() as f64
    }

    /// Standard error of the mean.
    pub fn se(&self) -> f64 {
        let n = self.seconds.len() as f64;
        if n < 2.0 {
            return 0.0;
        }
        let m = self.mean();
        let var = self.seconds.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    }
}

pub const TIMING_SIZES: [usize; 4] = [100, 1_000, 10_000, 100_000];
pub const TIMING_TRIALS: usize = 50;

/// Times `monotone_weights` with `q = U/10`, `l = V/10`, `u = inf`.
///
/// Trials run one after another so they do not compete for cores.
pub fn timing(seed: u64, sizes: &[usize], trials: usize, cfg: &BarrierConfig) -> Result<Vec<TimingRow>> {
    sizes
        .iter()
        .enumerate()
        .map(|(s, &j)| {
            let seconds = (0..trials)
                .map(|k| {
                    let mut rng = stream(seed, ((s as u64) << 32) | k as u64);
                    let mu = negative_half_normal(&mut rng, j);
                    // 1 - U lies in (0, 1], keeping q positive.
                    let q = (1.0 - rng.random::<f64>()) / 10.0;
                    let l = rng.random::<f64>() / 10.0;
                    let effects = EffectSizeVector::one_sided(mu)?;
                    let start = Instant::now();
                    monotone_weights(&effects, q, l, f64::INFINITY, cfg)
                        .with_context(|| format!("timing trial {k} at J = {j}, q = {q}, l = {l}"))?;
                    Ok(start.elapsed().as_secs_f64())
                })
                .collect::<Result<_>>()?;
            Ok(TimingRow { j, seconds })
        })
        .collect()
}

pub fn timing_table(rows: &[TimingRow]) -> Table {
    let mut t = Table::new(&["J", "trials", "median_s", "mean_s", "se_s", "mean_minus_2se_s", "mean_plus_2se_s"]);
    for r in rows {
        let (m, se) = (r.mean(), r.se());
        t.push(vec![
            r.j.to_string(),
            r.seconds.len().to_string(),
            fmt_real(r.median()),
            fmt_real(m),
            fmt_real(se),
            fmt_real(m - 2.0 * se),
            fmt_real(m + 2.0 * se),
        ]);
    }
    t
}

/// Settings of `pweight simulate`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimOptions {
    pub seed: u64,
    pub trials: usize,
    pub sizes: Vec<usize>,
    pub barrier: BarrierConfig,
}

/// Runs one experiment; returns its table and a one-line summary.
pub fn run(e: Experiment, o: &SimOptions) -> Result<(Table, String)> {
    Ok(match e {
        Experiment::WeightShapes => {
            let c = weight_shapes(o.seed, &o.barrier)?;
            (shapes_table(&c), format!("{} curves of {} weights", c.len(), SHAPES_J))
        }
        Experiment::PowerLoss => {
            let p = power_loss(o.seed, &o.barrier)?;
            let s = format!("unweighted_power={} spjotvoll_power={}", p.unweighted, p.spjotvoll);
            (power_loss_table(&p), s)
        }
        Experiment::SubsampleAccuracy => {
            let s = subsample_accuracy(o.seed, &o.barrier)?;
            let line = format!("max_abs_error={:e} solved_size={}", s.max_abs_error(), s.solved_size);
            (subsample_table(&s), line)
        }
        Experiment::SpjotVsMonotone => {
            let s = spjot_vs_monotone(o.seed, &o.barrier)?;
            let line = format!("monotone_regime={} max_abs_diff={:e}", s.regime, s.max_abs_diff());
            (compare_table(&s), line)
        }
        Experiment::Timing => {
            let rows = timing(o.seed, &o.sizes, o.trials, &o.barrier)?;
            let line = rows
                .iter()
                .map(|r| format!("J={} median={:.3}s", r.j, r.median()))
                .collect::<Vec<_>>()
                .join(" ");
            (timing_table(&rows), line)
        }
    })
}
