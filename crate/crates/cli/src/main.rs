use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use pweight::experiments::{self, Experiment, SimOptions};
use pweight::manifest::RunManifest;
use pweight::pipeline::{self, Level};
use pweight::scheme::{self, Scheme, SchemeParams};
use pweight::tsv::{self, fmt_real, Table};
use pweight_core::barrier::BarrierConfig;
use serde_json::json;

/// Optimal p-value weights for weighted Bonferroni testing.
#[derive(Parser)]
#[command(name = "pweight", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute weights from an `id, mu` file (`id, p` for --scheme filter).
    Weights {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        #[command(flatten)]
        scheme: SchemeArgs,
        #[command(flatten)]
        barrier: BarrierArgs,
    },
    /// Weight a current study by a prior one and run weighted Bonferroni.
    Test {
        /// Prior study: `id, p[, n][, sign]`.
        #[arg(long, value_name = "FILE")]
        prior: PathBuf,
        /// Current study: `id, p[, n][, sign]`.
        #[arg(long, value_name = "FILE")]
        current: PathBuf,
        /// Family-wise level; the per-test level is alpha / J. Alternative to --q.
        #[arg(long, conflicts_with = "q")]
        alpha: Option<f64>,
        /// Sample size for every current record.
        #[arg(long, value_name = "N")]
        broadcast_n: Option<f64>,
        /// Sample size for every prior record.
        #[arg(long, value_name = "N0")]
        broadcast_n0: Option<f64>,
        /// `id, locus` grouping; hits are then counted per locus.
        #[arg(long, value_name = "FILE")]
        loci: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        #[command(flatten)]
        scheme: SchemeArgs,
        #[command(flatten)]
        barrier: BarrierArgs,
    },
    /// Run a seeded simulation experiment and emit its table.
    Simulate {
        #[arg(long, value_enum)]
        experiment: Experiment,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Write here instead of standard output.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Trials per size (timing).
        #[arg(long, default_value_t = experiments::TIMING_TRIALS)]
        trials: usize,
        /// Comma-separated problem sizes (timing).
        #[arg(long, value_delimiter = ',', default_values_t = experiments::TIMING_SIZES)]
        sizes: Vec<usize>,
        #[command(flatten)]
        barrier: BarrierArgs,
    },
}

#[derive(Args)]
struct SchemeArgs {
    #[arg(long, value_enum)]
    scheme: Scheme,
    /// Per-test level.
    #[arg(long)]
    q: Option<f64>,
    /// Lower weight bound (monotone).
    #[arg(long, default_value_t = 0.0)]
    l: f64,
    /// Upper weight bound (monotone); `inf` for none.
    #[arg(long, default_value_t = f64::INFINITY)]
    u: f64,
    /// Exponential rate (exponential).
    #[arg(long)]
    beta: Option<f64>,
    /// Prior p-value cutoff (filter).
    #[arg(long)]
    cutoff: Option<f64>,
    /// Give nonnegative effects zero weight (spjotvoll, monotone).
    #[arg(long)]
    zero_nonnegative: bool,
}

#[derive(Args)]
struct BarrierArgs {
    /// Initial barrier parameter, in units of 1/q.
    #[arg(long, default_value_t = BarrierConfig::default().t0)]
    t0: f64,
    /// Barrier growth factor.
    #[arg(long, default_value_t = BarrierConfig::default().kappa)]
    kappa: f64,
    /// Duality-gap target, in units of q.
    #[arg(long, default_value_t = BarrierConfig::default().eps)]
    eps: f64,
    /// Largest problem solved without subsampling.
    #[arg(long, default_value_t = BarrierConfig::default().subsample_l)]
    subsample_limit: usize,
}

impl BarrierArgs {
    fn config(&self) -> BarrierConfig {
        BarrierConfig {
            t0: self.t0,
            kappa: self.kappa,
            eps: self.eps,
            subsample_l: self.subsample_limit,
            ..BarrierConfig::default()
        }
    }
}

impl SchemeArgs {
    fn params(&self, barrier: BarrierConfig) -> SchemeParams {
        SchemeParams {
            q: self.q,
            l: self.l,
            u: self.u,
            beta: self.beta,
            cutoff: self.cutoff,
            zero_nonnegative: self.zero_nonnegative,
            barrier,
        }
    }
}

fn emit(table: &Table, out: &Path, manifest: &RunManifest) -> Result<()> {
    tsv::write_atomic(out, table.render().as_bytes())?;
    manifest.write_beside(out)
}

fn cmd_weights(input: &Path, out: &Path, s: &SchemeArgs, b: &BarrierArgs) -> Result<()> {
    let params = s.params(b.config());
    let (ids, values) = tsv::read_values(input, s.scheme.input_column())?;
    let computed = scheme::compute(s.scheme, &values, &params)?;
    let summary = scheme::check(&computed, &values).context("emitted weights failed re-validation")?;
    let mut table = Table::new(&["id", "weight"]);
    for (id, w) in ids.iter().zip(computed.weights.as_slice()) {
        table.push(vec![id.clone(), fmt_real(*w)]);
    }
    let mut manifest = RunManifest::new("weights", json!({ "scheme": s.scheme, "params": params }), &params.barrier);
    manifest.add_input(input)?;
    emit(&table, out, &manifest)?;
    eprintln!(
        "J={} sum={} relative_sum_error={:e} min={} max={} at_lower={} at_upper={}",
        summary.j, summary.sum, summary.relative_sum_error, summary.min, summary.max, summary.at_lower, summary.at_upper
    );
    if let Some(d) = computed.diagnostics {
        eprintln!(
            "barrier: solved_size={} outer_iterations={} newton_steps={} precision_floor_stops={}",
            d.solved_size, d.outer_iterations, d.newton_steps, d.precision_floor_stops
        );
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_test(
    prior: &Path,
    current: &Path,
    alpha: Option<f64>,
    n: Option<f64>,
    n0: Option<f64>,
    loci: Option<&Path>,
    out: &Path,
    s: &SchemeArgs,
    b: &BarrierArgs,
) -> Result<()> {
    let level = match (s.q, alpha) {
        (Some(q), None) => Level::PerTest(q),
        (None, Some(a)) => Level::FamilyWise(a),
        _ => bail!("give exactly one of --q and --alpha"),
    };
    let params = s.params(b.config());
    let prior_recs = tsv::read_summary(prior, n0)?;
    let current_recs = tsv::read_summary(current, n)?;
    let loci_map = loci.map(tsv::read_loci).transpose()?;
    let outcome = pipeline::run(&prior_recs, &current_recs, s.scheme, &params, level, loci_map.as_ref())?;
    let parameters = json!({
        "scheme": s.scheme,
        "params": params,
        "level": level,
        "broadcast_n": n,
        "broadcast_n0": n0,
    });
    let mut manifest = RunManifest::new("test", parameters, &params.barrier);
    for p in [Some(prior), Some(current), loci].into_iter().flatten() {
        manifest.add_input(p)?;
    }
    emit(&outcome.table(), out, &manifest)?;
    eprintln!("{}", outcome.summary_line());
    Ok(())
}

fn cmd_simulate(e: Experiment, opts: SimOptions, out: Option<&Path>) -> Result<()> {
    if opts.trials == 0 || opts.sizes.contains(&0) {
        bail!("--trials and every --sizes entry must be positive");
    }
    let parameters = json!({
        "experiment": e,
        "seed": opts.seed,
        "generator": "ChaCha8, one stream per draw group",
        "trials": opts.trials,
        "sizes": opts.sizes,
    });
    let manifest = RunManifest::new("simulate", parameters, &opts.barrier);
    let (table, summary) = experiments::run(e, &opts)?;
    match out {
        Some(path) => emit(&table, path, &manifest)?,
        None => {
            print!("{}", table.render());
            eprint!("{}", manifest.to_json());
        }
    }
    eprintln!("{summary}");
    Ok(())
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("PWEIGHT_THREADS") {
        let n: usize = v.trim().parse().with_context(|| format!("PWEIGHT_THREADS={v:?} is not a count"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    configure_threads()?;
    match cli.command {
        Command::Weights { input, out, scheme, barrier } => cmd_weights(&input, &out, &scheme, &barrier),
        Command::Test { prior, current, alpha, broadcast_n, broadcast_n0, loci, out, scheme, barrier } => cmd_test(
            &prior,
            &current,
            alpha,
            broadcast_n,
            broadcast_n0,
            loci.as_deref(),
            &out,
            &scheme,
            &barrier,
        ),
        Command::Simulate { experiment, seed, out, trials, sizes, barrier } => {
            let opts = SimOptions { seed, trials, sizes, barrier: barrier.config() };
            cmd_simulate(experiment, opts, out.as_deref())
        }
    }
}
