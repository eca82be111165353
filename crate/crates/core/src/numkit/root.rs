use crate::error::{Error, Result};

/// Hard cap on bisection steps; a double-precision bracket collapses well before this.
const MAX_ITER: usize = 2_000;

/// Finds `x` in `[lo, hi]` with `f(x) = target` for a continuous, strictly
/// decreasing `f`.
///
/// Plain bisection: stops as soon as `|f(x) - target| <= tol` or the bracket
/// is narrower than `tol * max(1, |x|)`.
pub fn bisect_decreasing<F>(mut f: F, lo: f64, hi: f64, target: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    bisect_counted(&mut f, lo, hi, target, tol).map(|(x, _)| x)
}

/// Bisection with separate stopping rules: `|f(x) - target| <= f_tol`, or a
/// bracket narrower than `x_tol * max(1, |x|)`. Useful when the function's
/// scale and the argument's scale differ by orders of magnitude.
pub fn bisect_tolerances<F>(mut f: F, lo: f64, hi: f64, target: f64, f_tol: f64, x_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    bisect_impl(&mut f, lo, hi, target, f_tol, x_tol).map(|(x, _)| x)
}

/// Same as [`bisect_decreasing`], also returning the number of midpoint evaluations.
pub fn bisect_counted<F>(f: &mut F, lo: f64, hi: f64, target: f64, tol: f64) -> Result<(f64, usize)>
where
    F: FnMut(f64) -> f64,
{
    bisect_impl(f, lo, hi, target, tol, tol)
}

fn bisect_impl<F>(f: &mut F, lo: f64, hi: f64, target: f64, tol: f64, x_tol: f64) -> Result<(f64, usize)>
where
    F: FnMut(f64) -> f64,
{
    if !(lo <= hi) || !(tol > 0.0) || !(x_tol >= 0.0) {
        return Err(Error::Domain(format!(
            "bisection needs lo <= hi and positive tolerances (lo = {lo}, hi = {hi}, tol = {tol}, x_tol = {x_tol})"
        )));
    }
    let f_lo = f(lo);
    let f_hi = f(hi);
    if !(f_lo >= target && target >= f_hi) {
        return Err(Error::Bracketing { lo, hi, f_lo, f_hi, target });
    }
    if (f_lo - target).abs() <= tol {
        return Ok((lo, 0));
    }
    if (f_hi - target).abs() <= tol {
        return Ok((hi, 0));
    }
    let (mut a, mut b) = (lo, hi);
    let mut iters = 0;
    loop {
        let mid = 0.5 * (a + b);
        iters += 1;
        let fm = f(mid);
        if (fm - target).abs() <= tol || mid <= a || mid >= b {
            return Ok((mid, iters));
        }
        if fm > target {
            a = mid;
        } else {
            b = mid;
        }
        if b - a <= x_tol * mid.abs().max(1.0) || iters >= MAX_ITER {
            return Ok((0.5 * (a + b), iters));
        }
    }
}
