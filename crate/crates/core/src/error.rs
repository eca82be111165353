use thiserror::Error;

/// Errors raised by the weight solvers and the testing pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "bracket [{lo}, {hi}] does not straddle target {target} (f(lo) = {f_lo}, f(hi) = {f_hi})"
    )]
    Bracketing {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
        target: f64,
    },

    #[error("tridiagonal elimination hit a non-positive pivot {pivot:e} at row {row}; matrix is not positive definite")]
    Degenerate { row: usize, pivot: f64 },

    #[error("derivative undefined at boundary weight {w} (domain is the open interval (0, {cap}))")]
    BoundaryDerivative { w: f64, cap: f64 },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error(
        "no interior solution: H(q exp(-m)) = {h_at_floor} < J = {j}; decrease q or the effect sizes"
    )]
    NoInteriorSolution { h_at_floor: f64, j: usize },

    #[error("empty selection: no prior p-value is at or below the cutoff {cutoff}")]
    EmptySelection { cutoff: f64 },

    #[error("line search failed: no acceptable step above {min_step:e}")]
    LineSearch { min_step: f64 },

    #[error("centering did not converge after {iterations} Newton steps (last decrement {decrement:e})")]
    Convergence { iterations: usize, decrement: f64 },

    #[error("barrier solver failed at t = {t:e}: {source}; retry through the subsampling path with a smaller limit")]
    Solver {
        t: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("the two studies share no identifiers")]
    EmptyJoin,

    #[error("duplicate identifier {0:?}")]
    DuplicateId(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
