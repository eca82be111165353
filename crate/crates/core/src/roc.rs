//! Power (ROC) curves as functions of the per-test level, with derivatives.
//!
//! For a one-sided Gaussian test of `mu >= 0` against `N(mu, 1)` with
//! `mu < 0`, the power at weight `w` is `f(w) = Phi(Phi^{-1}(q w) - mu)`.
//! With `z = Phi^{-1}(q w)`:
//!
//! ```text
//! f'(w)  = q exp(mu z - mu^2 / 2)
//! f''(w) = q^2 mu sqrt(2 pi) exp(z^2 / 2 + mu z - mu^2 / 2)
//! ```
//!
//! Exponents are assembled in log space and clamped at +-700 before the
//! single `exp`, so `f''` stays finite as `w -> 0`.

use crate::error::{domain, Error, Result};
use crate::numkit::{quantile_unchecked, std_normal_cdf, std_normal_pdf};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_741_78;
const EXP_CLAMP: f64 = 700.0;

/// Prior standardized effect of a Gaussian alternative `N(mu, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianAlternative {
    pub mu: f64,
}

impl GaussianAlternative {
    /// One-sided alternatives must point into the rejection region.
    pub fn one_sided(mu: f64) -> Result<Self> {
        if !(mu < 0.0) {
            return domain(format!("one-sided effect sizes must be negative, got {mu}"));
        }
        Ok(Self { mu })
    }

    pub fn power(&self, w: f64, q: f64) -> Result<f64> {
        roc_value(w, self.mu, q)
    }
}

#[inline]
fn clamped_exp(x: f64) -> f64 {
    x.clamp(-EXP_CLAMP, EXP_CLAMP).exp()
}

fn check_q(q: f64) -> Result<()> {
    if !(q > 0.0 && q < 1.0) {
        return domain(format!("per-test level q must lie in (0, 1), got {q}"));
    }
    Ok(())
}

fn check_interior(w: f64, q: f64) -> Result<f64> {
    check_q(q)?;
    let level = q * w;
    if !(w > 0.0 && level < 1.0) {
        return Err(Error::BoundaryDerivative { w, cap: 1.0 / q });
    }
    Ok(quantile_unchecked(level))
}

/// Gaussian one-sided power `Phi(Phi^{-1}(q w) - mu)`, continuous at both endpoints.
pub fn roc_value(w: f64, mu: f64, q: f64) -> Result<f64> {
    check_q(q)?;
    if !(w >= 0.0) || q * w > 1.0 {
        return domain(format!("weight {w} outside [0, 1/q] = [0, {}]", 1.0 / q));
    }
    Ok(roc_value_unchecked(w, mu, q))
}

pub(crate) fn roc_value_unchecked(w: f64, mu: f64, q: f64) -> f64 {
    let level = q * w;
    if level <= 0.0 {
        0.0
    } else if level >= 1.0 {
        1.0
    } else if mu == 0.0 {
        level
    } else {
        std_normal_cdf(quantile_unchecked(level) - mu)
    }
}

/// First derivative of [`roc_value`] in `w`, defined on the open interval.
pub fn roc_grad(w: f64, mu: f64, q: f64) -> Result<f64> {
    let z = check_interior(w, q)?;
    Ok(grad_at(z, mu, q))
}

/// Second derivative of [`roc_value`] in `w`, defined on the open interval.
pub fn roc_hess(w: f64, mu: f64, q: f64) -> Result<f64> {
    let z = check_interior(w, q)?;
    Ok(hess_at(z, mu, q))
}

#[inline]
pub(crate) fn grad_at(z: f64, mu: f64, q: f64) -> f64 {
    clamped_exp(q.ln() + mu * z - 0.5 * mu * mu)
}

#[inline]
pub(crate) fn hess_at(z: f64, mu: f64, q: f64) -> f64 {
    if mu == 0.0 {
        return 0.0;
    }
    let log_mag = 2.0 * q.ln() + mu.abs().ln() + LN_SQRT_2PI + 0.5 * z * z + mu * z - 0.5 * mu * mu;
    mu.signum() * clamped_exp(log_mag)
}

/// Largest admissible two-sided weight, `(1 - 1e-9) / (2 q)`.
pub fn two_sided_cap(q: f64) -> f64 {
    (1.0 - 1e-9) / (2.0 * q)
}

/// Two-sided Gaussian power `Phi(z - mu) + Phi(z + mu)` with `z = Phi^{-1}(q w / 2)`.
pub fn two_sided_power(w: f64, mu: f64, q: f64) -> Result<f64> {
    check_q(q)?;
    if !(w >= 0.0) || w > two_sided_cap(q) {
        return domain(format!("two-sided weight {w} outside [0, {}]", two_sided_cap(q)));
    }
    if w == 0.0 {
        return Ok(0.0);
    }
    let z = quantile_unchecked(0.5 * q * w);
    if mu == 0.0 {
        return Ok(q * w);
    }
    Ok(std_normal_cdf(z - mu) + std_normal_cdf(z + mu))
}

/// Slope of [`two_sided_power`]: `q exp(-mu^2/2) cosh(mu z)`.
pub fn two_sided_grad(w: f64, mu: f64, q: f64) -> Result<f64> {
    check_q(q)?;
    if !(w > 0.0) || w > two_sided_cap(q) {
        return Err(Error::BoundaryDerivative { w, cap: two_sided_cap(q) });
    }
    let z = quantile_unchecked(0.5 * q * w);
    let a = (mu * z).abs();
    // cosh(a) = exp(a) (1 + exp(-2a)) / 2
    Ok(clamped_exp(q.ln() - 0.5 * mu * mu + a - std::f64::consts::LN_2) * (1.0 + (-2.0 * a).exp()))
}

/// A one-parameter family of continuous distributions with monotone
/// likelihood ratio, described through its distribution function.
///
/// Implementations supply the density and its derivative in `x` so the ROC
/// curve's slope and curvature follow by the chain rule.
pub trait MlrFamily: Sync {
    fn name(&self) -> &'static str;
    /// Fixed nuisance parameters, as `(name, value)` pairs.
    fn nuisance(&self) -> Vec<(&'static str, f64)> {
        Vec::new()
    }
    fn cdf(&self, theta: f64, x: f64) -> f64;
    fn quantile(&self, theta: f64, p: f64) -> f64;
    fn pdf(&self, theta: f64, x: f64) -> f64;
    /// Derivative of the density in `x`.
    fn pdf_dx(&self, theta: f64, x: f64) -> f64;
}

/// `N(theta, sigma^2)` with fixed `sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianLocation {
    pub sigma: f64,
}

impl Default for GaussianLocation {
    fn default() -> Self {
        Self { sigma: 1.0 }
    }
}

impl MlrFamily for GaussianLocation {
    fn name(&self) -> &'static str {
        "gaussian-location"
    }
    fn nuisance(&self) -> Vec<(&'static str, f64)> {
        vec![("sigma", self.sigma)]
    }
    fn cdf(&self, theta: f64, x: f64) -> f64 {
        std_normal_cdf((x - theta) / self.sigma)
    }
    fn quantile(&self, theta: f64, p: f64) -> f64 {
        theta + self.sigma * quantile_unchecked(p)
    }
    fn pdf(&self, theta: f64, x: f64) -> f64 {
        std_normal_pdf((x - theta) / self.sigma) / self.sigma
    }
    fn pdf_dx(&self, theta: f64, x: f64) -> f64 {
        let u = (x - theta) / self.sigma;
        -u * std_normal_pdf(u) / (self.sigma * self.sigma)
    }
}

/// Double-exponential location family, density `exp(-|x - theta| / b) / (2 b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceLocation {
    pub scale: f64,
}

impl Default for LaplaceLocation {
    fn default() -> Self {
        Self { scale: 1.0 }
    }
}

impl MlrFamily for LaplaceLocation {
    fn name(&self) -> &'static str {
        "laplace-location"
    }
    fn nuisance(&self) -> Vec<(&'static str, f64)> {
        vec![("scale", self.scale)]
    }
    fn cdf(&self, theta: f64, x: f64) -> f64 {
        let u = (x - theta) / self.scale;
        if u < 0.0 {
            0.5 * u.exp()
        } else {
            1.0 - 0.5 * (-u).exp()
        }
    }
    fn quantile(&self, theta: f64, p: f64) -> f64 {
        if p <= 0.5 {
            theta + self.scale * (2.0 * p).ln()
        } else {
            theta - self.scale * (2.0 * (1.0 - p)).ln()
        }
    }
    fn pdf(&self, theta: f64, x: f64) -> f64 {
        (-(x - theta).abs() / self.scale).exp() / (2.0 * self.scale)
    }
    fn pdf_dx(&self, theta: f64, x: f64) -> f64 {
        -(x - theta).signum() * self.pdf(theta, x) / self.scale
    }
}

/// Logistic location family, density `e^{-u} / (b (1 + e^{-u})^2)` with `u = (x - theta) / b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticLocation {
    pub scale: f64,
}

impl Default for LogisticLocation {
    fn default() -> Self {
        Self { scale: 1.0 }
    }
}

impl MlrFamily for LogisticLocation {
    fn name(&self) -> &'static str {
        "logistic-location"
    }
    fn nuisance(&self) -> Vec<(&'static str, f64)> {
        vec![("scale", self.scale)]
    }
    fn cdf(&self, theta: f64, x: f64) -> f64 {
        let u = (x - theta) / self.scale;
        if u >= 0.0 {
            1.0 / (1.0 + (-u).exp())
        } else {
            let e = u.exp();
            e / (1.0 + e)
        }
    }
    fn quantile(&self, theta: f64, p: f64) -> f64 {
        theta + self.scale * (p.ln() - (-p).ln_1p())
    }
    fn pdf(&self, theta: f64, x: f64) -> f64 {
        let u = ((x - theta) / self.scale).abs();
        let e = (-u).exp();
        e / (self.scale * (1.0 + e) * (1.0 + e))
    }
    fn pdf_dx(&self, theta: f64, x: f64) -> f64 {
        let f = self.cdf(theta, x);
        self.pdf(theta, x) * (1.0 - 2.0 * f) / self.scale
    }
}

fn check_level(x: f64) -> Result<()> {
    if !(x > 0.0 && x < 1.0) {
        return domain(format!("ROC level must lie in (0, 1), got {x}"));
    }
    Ok(())
}

/// ROC curve `G(x) = F_{theta1}(F_{theta0}^{-1}(x))`: power at `theta1` of the
/// level-`x` test that rejects for small observations.
pub fn general_roc<F: MlrFamily + ?Sized>(family: &F, theta1: f64, theta0: f64, x: f64) -> Result<f64> {
    check_level(x)?;
    Ok(family.cdf(theta1, family.quantile(theta0, x)))
}

/// `G'(x) = f_{theta1}(y) / f_{theta0}(y)` with `y = F_{theta0}^{-1}(x)`.
pub fn general_roc_grad<F: MlrFamily + ?Sized>(family: &F, theta1: f64, theta0: f64, x: f64) -> Result<f64> {
    check_level(x)?;
    let y = family.quantile(theta0, x);
    Ok(family.pdf(theta1, y) / family.pdf(theta0, y))
}

/// `G''(x) = (f1'(y) f0(y) - f1(y) f0'(y)) / f0(y)^3`.
pub fn general_roc_hess<F: MlrFamily + ?Sized>(family: &F, theta1: f64, theta0: f64, x: f64) -> Result<f64> {
    check_level(x)?;
    let y = family.quantile(theta0, x);
    let f0 = family.pdf(theta0, y);
    let f1 = family.pdf(theta1, y);
    let num = family.pdf_dx(theta1, y) * f0 - f1 * family.pdf_dx(theta0, y);
    Ok(num / (f0 * f0 * f0))
}
