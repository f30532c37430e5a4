//! Strictly stable laws and stable subordinators.
//!
//! The driver X has characteristic function
//! `E exp(i xi X(t)) = exp(-t |xi|^alpha (1 + i nu sgn(xi) tan(pi alpha / 2)) / chi)`.
//! In the usual `S_alpha(scale, skewness, 0)` notation this is skewness `-nu`
//! and scale `(t / chi)^(1/alpha)`; [`StableParams::standard_form`] is the
//! only place that conversion happens.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::distr::Open01;
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index, skew and scale `(alpha, nu, chi)` of a strictly stable Levy process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableParams {
    alpha: f64,
    nu: f64,
    chi: f64,
}

/// `S_index(scale, skewness, 0)` parametrization used by the samplers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandardStable {
    pub index: f64,
    pub skewness: f64,
    pub scale: f64,
}

impl StableParams {
    pub fn new(alpha: f64, nu: f64, chi: f64) -> Result<Self> {
        validate_params(alpha, nu, chi)
    }

    /// Standard Brownian motion when `chi = 2`; `chi = 1` runs at twice the speed.
    pub fn brownian(chi: f64) -> Result<Self> {
        validate_params(2.0, 0.0, chi)
    }

    /// Spectrally negative driver: `nu = 1`, `1 < alpha < 2`.
    pub fn spectrally_negative(alpha: f64, chi: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha < 2.0) {
            return Err(Error::IndexOutOfRange(alpha));
        }
        validate_params(alpha, 1.0, chi)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    pub fn is_gaussian(&self) -> bool {
        self.alpha == 2.0
    }

    /// Drivers of the time-changed process need `1 < alpha <= 2`.
    pub fn check_driver(&self) -> Result<()> {
        if self.alpha > 1.0 {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange(self.alpha))
        }
    }

    /// Law of `X(t)` in the `(index, skewness, scale)` convention.
    pub fn standard_form(&self, t: f64) -> StandardStable {
        StandardStable {
            index: self.alpha,
            skewness: if self.is_gaussian() { 0.0 } else { -self.nu },
            scale: (t / self.chi).powf(1.0 / self.alpha),
        }
    }
}

pub fn validate_params(alpha: f64, nu: f64, chi: f64) -> Result<StableParams> {
    if !(alpha > 0.0 && alpha <= 2.0) || alpha == 1.0 {
        return Err(Error::IndexOutOfRange(alpha));
    }
    if !(-1.0..=1.0).contains(&nu) {
        return Err(Error::SkewOutOfRange(nu));
    }
    if !(chi > 0.0) || !chi.is_finite() {
        return Err(Error::NonpositiveScale(chi));
    }
    Ok(StableParams { alpha, nu, chi })
}

/// Index and Laplace coefficient of a stable subordinator:
/// `E exp(-s D(t)) = exp(-t * scale_b * s^beta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubordinatorParams {
    beta: f64,
    scale_b: f64,
}

impl SubordinatorParams {
    pub fn new(beta: f64, scale_b: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::IndexOutOfRange(beta));
        }
        if !(scale_b > 0.0) || !scale_b.is_finite() {
            return Err(Error::NonpositiveScale(scale_b));
        }
        Ok(Self { beta, scale_b })
    }

    /// The inner subordinator `D` with Laplace exponent `s^beta`.
    pub fn standard(beta: f64) -> Result<Self> {
        Self::new(beta, 1.0)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn scale_b(&self) -> f64 {
        self.scale_b
    }

    /// `E[E(t)] = t^beta / (scale_b * Gamma(1 + beta))` for the inverse process.
    pub fn mean_inverse(&self, t: f64) -> f64 {
        t.powf(self.beta) / (self.scale_b * statrs::function::gamma::gamma(1.0 + self.beta))
    }
}

pub fn char_function(params: &StableParams, t: f64, xi: f64) -> Complex64 {
    if xi == 0.0 || t == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let skew_term = if params.is_gaussian() {
        0.0
    } else {
        params.nu * xi.signum() * (FRAC_PI_2 * params.alpha).tan()
    };
    let magnitude = t * xi.abs().powf(params.alpha) / params.chi;
    (-Complex64::new(magnitude, magnitude * skew_term)).exp()
}

/// One draw of `X(t)`.
pub fn sample_stable<R: Rng + ?Sized>(params: &StableParams, t: f64, rng: &mut R) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    if params.is_gaussian() {
        let z: f64 = rng.sample(StandardNormal);
        return (2.0 * t / params.chi).sqrt() * z;
    }
    let form = params.standard_form(t);
    form.scale * sample_standard_stable(form.index, form.skewness, rng)
}

/// Chambers-Mallows-Stuck draw from `S_index(1, skewness, 0)`, `index != 1`.
pub fn sample_standard_stable<R: Rng + ?Sized>(index: f64, skewness: f64, rng: &mut R) -> f64 {
    debug_assert!(index != 1.0);
    let u: f64 = rng.sample(Open01);
    let v = PI * (u - 0.5);
    let w: f64 = rng.sample(Exp1);
    let zeta = skewness * (FRAC_PI_2 * index).tan();
    let shift = zeta.atan() / index;
    let factor = (1.0 + zeta * zeta).powf(0.5 / index);
    let arg = index * (v + shift);
    factor * arg.sin() / v.cos().powf(1.0 / index)
        * ((v - arg).cos() / w).powf((1.0 - index) / index)
}

/// Totally skewed CMS draw with `E exp(-s Y) = exp(-b s^theta)`, `0 < theta < 1`.
///
/// Used as an independent check on [`sample_subordinator_increment`].
pub fn sample_one_sided_cms<R: Rng + ?Sized>(theta: f64, b: f64, rng: &mut R) -> f64 {
    let scale = (b * (FRAC_PI_2 * theta).cos()).powf(1.0 / theta);
    scale * sample_standard_stable(theta, 1.0, rng)
}

/// Kanter's representation of the positive stable law `E exp(-s S) = exp(-s^beta)`.
pub fn sample_positive_stable_kanter<R: Rng + ?Sized>(beta: f64, rng: &mut R) -> f64 {
    let u: f64 = PI * rng.sample::<f64, _>(Open01);
    let w: f64 = rng.sample(Exp1);
    let a = (beta * u).sin() / u.sin().powf(1.0 / beta);
    a * ((1.0 - beta) * u).sin().powf((1.0 - beta) / beta) / w.powf((1.0 - beta) / beta)
}

/// Increment of the subordinator over a time step `dt`.
///
/// `beta = 1/2` uses the Levy law `c^2 / (2 N^2)` directly; other indices go
/// through [`sample_positive_stable_kanter`].
pub fn sample_subordinator_increment<R: Rng + ?Sized>(
    params: &SubordinatorParams,
    dt: f64,
    rng: &mut R,
) -> f64 {
    if dt == 0.0 {
        return 0.0;
    }
    let c = dt * params.scale_b;
    if params.beta == 0.5 {
        let z: f64 = rng.sample(StandardNormal);
        return c * c / (2.0 * z * z);
    }
    c.powf(1.0 / params.beta) * sample_positive_stable_kanter(params.beta, rng)
}
