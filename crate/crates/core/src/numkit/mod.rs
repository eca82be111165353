//! Numerical building blocks: the standard normal distribution, a bracketed
//! root finder and a symmetric tridiagonal solver.

mod normal;
mod root;
mod tridiag;

pub use normal::{
    std_normal_cdf, std_normal_cdf_both, std_normal_log_pdf, std_normal_pdf, std_normal_quantile,
    std_normal_sf,
};
pub(crate) use normal::quantile_unchecked;
pub use root::{bisect_counted, bisect_decreasing, bisect_tolerances};
pub use tridiag::{solve_tridiagonal, PathFactor, PathLaplacian, TridiagonalFactor, TridiagonalMatrix};
