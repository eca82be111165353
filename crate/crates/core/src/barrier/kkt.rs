//! Equality-constrained Newton step for a tridiagonal Hessian.

use crate::error::{domain, Result};
use crate::numkit::{PathFactor, PathLaplacian, TridiagonalFactor, TridiagonalMatrix};

/// Newton step `(delta_w, nu)` with its relative KKT residual.
#[derive(Debug, Clone, PartialEq)]
pub struct KktStep {
    pub delta_w: Vec<f64>,
    pub nu: f64,
    /// `||K x - rhs||_inf / (||K||_inf ||x||_inf + ||rhs||_inf)` after refinement.
    pub residual: f64,
}

/// Solves `[A e; e^T 0] [x; nu] = [r1; r2]` by block elimination, given `a = A^{-1} e`.
fn eliminate(factor: &TridiagonalFactor<'_>, a: &[f64], ea: f64, r1: &[f64], r2: f64) -> (Vec<f64>, f64) {
    let b = factor.solve(r1);
    let eb: f64 = b.iter().sum();
    let nu = (eb - r2) / ea;
    let x = b.iter().zip(a).map(|(bi, ai)| bi - nu * ai).collect();
    (x, nu)
}

/// Residual blocks `(r1 - A x - e nu, r2 - e^T x)`.
fn residual_blocks(hess: &TridiagonalMatrix, r1: &[f64], r2: f64, x: &[f64], nu: f64) -> (Vec<f64>, f64) {
    let ax = hess.mul_vec(x);
    let top = r1.iter().zip(&ax).map(|(r, v)| r - v - nu).collect();
    (top, r2 - x.iter().sum::<f64>())
}

/// Normwise relative residual of the full KKT system.
pub fn kkt_residual(hess: &TridiagonalMatrix, grad: &[f64], delta_w: &[f64], nu: f64) -> f64 {
    let rhs: Vec<f64> = grad.iter().map(|g| -g).collect();
    let (top, bottom) = residual_blocks(hess, &rhs, 0.0, delta_w, nu);
    let res = top.iter().fold(bottom.abs(), |m, v| m.max(v.abs()));
    let k_norm = (hess.norm_inf() + 1.0).max(hess.dim() as f64);
    let x_norm = delta_w.iter().fold(nu.abs(), |m, v| m.max(v.abs()));
    let rhs_norm = rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = k_norm * x_norm + rhs_norm;
    if scale == 0.0 {
        0.0
    } else {
        res / scale
    }
}

/// Solves `[H e; e^T 0] [dw; nu] = [-grad; 0]` in O(J).
///
/// `a = H^{-1} e`, `b = H^{-1} grad`, `nu = -(e^T b)/(e^T a)`, `dw = -(b + nu a)`,
/// followed by one round of iterative refinement with the same factorization.
pub fn kkt_newton_step(grad: &[f64], hess: &TridiagonalMatrix) -> Result<KktStep> {
    let n = hess.dim();
    if grad.len() != n {
        return domain(format!("gradient has length {} but Hessian has dimension {n}", grad.len()));
    }
    let factor = hess.factor()?;
    let a = factor.solve(&vec![1.0; n]);
    let ea: f64 = a.iter().sum();
    let rhs: Vec<f64> = grad.iter().map(|g| -g).collect();
    let (mut dw, mut nu) = eliminate(&factor, &a, ea, &rhs, 0.0);
    let (r1, r2) = residual_blocks(hess, &rhs, 0.0, &dw, nu);
    let (cx, cnu) = eliminate(&factor, &a, ea, &r1, r2);
    for (d, c) in dw.iter_mut().zip(&cx) {
        *d += c;
    }
    nu += cnu;
    let residual = kkt_residual(hess, grad, &dw, nu);
    Ok(KktStep { delta_w: dw, nu, residual })
}

/// Newton step for a barrier Hessian in path form, carrying the step's
/// successive differences (the changes of the gaps) at full relative precision.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct PathStep {
    pub delta_w: Vec<f64>,
    pub delta_gaps: Vec<f64>,
    pub nu: f64,
    pub residual: f64,
}

fn eliminate_path(
    factor: &PathFactor,
    a: &(Vec<f64>, Vec<f64>),
    ea: f64,
    r1: &[f64],
    r2: f64,
) -> (Vec<f64>, Vec<f64>, f64) {
    let (b, db) = factor.solve_with_differences(r1);
    let nu = (b.iter().sum::<f64>() - r2) / ea;
    let x = b.iter().zip(&a.0).map(|(bi, ai)| bi - nu * ai).collect();
    let dx = db.iter().zip(&a.1).map(|(bi, ai)| bi - nu * ai).collect();
    (x, dx, nu)
}

fn path_residual(hess: &PathLaplacian, r1: &[f64], r2: f64, x: &[f64], dx: &[f64], nu: f64) -> (Vec<f64>, f64) {
    let hx = hess.mul_with_differences(x, dx);
    let top = r1.iter().zip(&hx).map(|(r, v)| r - v - nu).collect();
    (top, r2 - x.iter().sum::<f64>())
}

pub(crate) fn kkt_path_step(grad: &[f64], hess: &PathLaplacian) -> Result<PathStep> {
    let n = hess.dim();
    let factor = hess.factor()?;
    let a = factor.solve_with_differences(&vec![1.0; n]);
    let ea: f64 = a.0.iter().sum();
    let rhs: Vec<f64> = grad.iter().map(|g| -g).collect();
    let (mut dw, mut dg, mut nu) = eliminate_path(&factor, &a, ea, &rhs, 0.0);
    let (r1, r2) = path_residual(hess, &rhs, 0.0, &dw, &dg, nu);
    let (cx, cdx, cnu) = eliminate_path(&factor, &a, ea, &r1, r2);
    dw.iter_mut().zip(&cx).for_each(|(d, c)| *d += c);
    dg.iter_mut().zip(&cdx).for_each(|(d, c)| *d += c);
    nu += cnu;
    let (top, bottom) = path_residual(hess, &rhs, 0.0, &dw, &dg, nu);
    let res = top.iter().fold(bottom.abs(), |m, v| m.max(v.abs()));
    let k_norm = (hess.norm_inf() + 1.0).max(n as f64);
    let x_norm = dw.iter().fold(nu.abs(), |m, v| m.max(v.abs()));
    let rhs_norm = rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = k_norm * x_norm + rhs_norm;
    let residual = if scale == 0.0 { 0.0 } else { res / scale };
    Ok(PathStep { delta_w: dw, delta_gaps: dg, nu, residual })
}

/// `sqrt(dw^T H dw)`, the Newton decrement in the local Hessian norm.
pub fn newton_decrement(delta_w: &[f64], hess: &TridiagonalMatrix) -> f64 {
    hess.quadratic_form(delta_w).max(0.0).sqrt()
}
