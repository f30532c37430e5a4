//! Mittag-Leffler function on the negative real axis.
//!
//! `E_beta(-z) = sum_n (-z)^n / Gamma(1 + n beta)` is summed directly for
//! small `z`. Past the crossover the alternating series cancels badly, so we
//! switch to the representation
//!
//! ```text
//! E_beta(-z) = sin(beta pi) / (beta pi) * int_0^inf exp(-w^(1/beta)) z / (w^2 + 2 z w cos(beta pi) + z^2) dw
//! ```
//!
//! which is what the Laplace transform of the inverse subordinator reduces
//! to after the substitution `u = w^(1/beta)`. The integrand is smooth and
//! positive, so the quadrature is well conditioned for every `z > 0`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::quadrature::integrate;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MLConfig {
    /// Upper limit for the series branch; the effective switch point is
    /// `min(series_crossover, 8^beta / 2)`, which keeps the largest series
    /// term below about `e^8` even at twice the switch point.
    pub series_crossover: f64,
    /// Relative accuracy target for both branches.
    pub tolerance: f64,
    pub max_terms: usize,
}

impl Default for MLConfig {
    fn default() -> Self {
        Self {
            series_crossover: 2.0,
            tolerance: 1e-13,
            max_terms: 500,
        }
    }
}

impl MLConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return Err(Error::InvalidParameter(format!("tolerance {}", self.tolerance)));
        }
        if !(self.series_crossover > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "series_crossover {}",
                self.series_crossover
            )));
        }
        if self.max_terms == 0 {
            return Err(Error::InvalidParameter("max_terms must be positive".into()));
        }
        Ok(())
    }

    pub fn crossover(&self, beta: f64) -> f64 {
        self.series_crossover.min(0.5 * 8f64.powf(beta))
    }
}

fn check_args(beta: f64, z: f64) -> Result<()> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::DomainError(format!("beta = {beta} outside (0, 1]")));
    }
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::DomainError(format!("z = {z} must be finite and >= 0")));
    }
    Ok(())
}

/// `E_beta(-z)` for `0 < beta <= 1`, `z >= 0`.
pub fn ml_neg(beta: f64, z: f64, cfg: &MLConfig) -> Result<f64> {
    check_args(beta, z)?;
    if z == 0.0 {
        return Ok(1.0);
    }
    if beta == 1.0 {
        return Ok((-z).exp());
    }
    if z <= cfg.crossover(beta) {
        ml_neg_series(beta, z, cfg)
    } else {
        ml_neg_integral(beta, z, cfg)
    }
}

/// Truncated power series; stops once the terms are past their peak and the
/// next term is below `tolerance` relative to the partial sum.
pub fn ml_neg_series(beta: f64, z: f64, cfg: &MLConfig) -> Result<f64> {
    check_args(beta, z)?;
    let mut sum = 1.0;
    let mut largest: f64 = 1.0;
    let mut previous = 1.0;
    for n in 1..cfg.max_terms {
        let arg = 1.0 + n as f64 * beta;
        let magnitude = if arg > 171.0 { 0.0 } else { z.powi(n as i32) / gamma(arg) };
        let term = if n % 2 == 1 { -magnitude } else { magnitude };
        sum += term;
        largest = largest.max(magnitude);
        if magnitude < previous && magnitude <= cfg.tolerance * sum.abs() {
            if largest * f64::EPSILON > 1e-6 * sum.abs() {
                return Err(Error::NoConvergence(format!(
                    "series cancellation at z = {z}: largest term {largest:e}"
                )));
            }
            return Ok(sum);
        }
        previous = magnitude;
    }
    Err(Error::NoConvergence(format!(
        "Mittag-Leffler series did not converge in {} terms (beta = {beta}, z = {z})",
        cfg.max_terms
    )))
}

/// Quadrature of the integral representation.
pub fn ml_neg_integral(beta: f64, z: f64, cfg: &MLConfig) -> Result<f64> {
    check_args(beta, z)?;
    if z == 0.0 {
        return Ok(1.0);
    }
    if beta == 1.0 {
        return Ok((-z).exp());
    }
    let cos = (beta * PI).cos();
    let inv_beta = 1.0 / beta;
    // exp(-w^(1/beta)) < e^-50 beyond this point
    let upper = 50f64.powf(beta);
    let integrand = |w: f64| (-w.powf(inv_beta)).exp() * z / (w * w + 2.0 * z * w * cos + z * z);
    let mut breaks = vec![0.0];
    for p in [0.5 * z, z, 2.0 * z] {
        if p < upper {
            breaks.push(p);
        }
    }
    breaks.push(upper);
    let (value, _) = integrate(integrand, &breaks, cfg.tolerance, 0.0, 4000)?;
    Ok((beta * PI).sin() / (beta * PI) * value)
}

/// `Gamma(beta) sin(beta pi) / pi`, the constant `c` in `E_beta(-z) ~ c / z`.
pub fn ml_tail_constant(beta: f64) -> f64 {
    gamma(beta) * (beta * PI).sin() / PI
}

/// Laplace transform `E exp(-s E(t)) = E_beta(-s t^beta)` of the inverse subordinator.
pub fn laplace_e(beta: f64, s: f64, t: f64, cfg: &MLConfig) -> Result<f64> {
    if !(s >= 0.0 && t >= 0.0) {
        return Err(Error::DomainError(format!("s = {s}, t = {t} must be >= 0")));
    }
    ml_neg(beta, s * t.powf(beta), cfg)
}

/// Largest relative disagreement between the two branches on `[z*/2, 2 z*]`.
pub fn overlap_discrepancy(beta: f64, cfg: &MLConfig) -> Result<f64> {
    let zc = cfg.crossover(beta);
    let mut worst: f64 = 0.0;
    for i in 0..=16 {
        let z = 0.5 * zc * 4f64.powf(i as f64 / 16.0);
        let a = ml_neg_series(beta, z, cfg)?;
        let b = ml_neg_integral(beta, z, cfg)?;
        worst = worst.max((a - b).abs() / b.abs());
    }
    Ok(worst)
}
