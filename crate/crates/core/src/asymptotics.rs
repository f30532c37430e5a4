//! Closed-form growth constants for `Z = X(E)` and the `Z-bar` supremum,
//! plus the empirical statistics that probe them on simulated paths.
//!
//! Notation: `theta = beta / alpha` is the self-similarity index of `Z`,
//! `b = c1^(-1/alpha)` is the Laplace coefficient of the composed
//! subordinator `D o sigma` (exponent `b s^theta`).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::path::GridPath;
use crate::stats::Ecdf;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    pub alpha: f64,
    pub beta: f64,
    pub chi: f64,
    pub theta: f64,
    pub lambda: f64,
    pub c1: f64,
    pub b: f64,
    pub m: f64,
    pub mu: f64,
    pub c_liminf: f64,
    pub kappa_paper: f64,
    pub kappa_consistent: f64,
    pub c2: f64,
    pub d: f64,
}

fn check_domain(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha > 1.0 && alpha <= 2.0) {
        return Err(Error::DomainError(format!("alpha = {alpha} outside (1, 2]")));
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::DomainError(format!("beta = {beta} outside (0, 1)")));
    }
    Ok(())
}

/// `c1 = sec(pi - pi alpha / 2) / chi`, the scale of the ladder-time subordinator.
pub fn c1(alpha: f64, chi: f64) -> Result<f64> {
    if !(alpha > 1.0 && alpha <= 2.0) {
        return Err(Error::DomainError(format!("alpha = {alpha} outside (1, 2]")));
    }
    if !(chi > 0.0) {
        return Err(Error::DomainError(format!("chi = {chi} must be positive")));
    }
    // cos(pi - pi alpha/2) lies in (0, 1] on this range; it equals 1 at alpha = 2
    let cos = if alpha == 2.0 { 1.0 } else { (PI - 0.5 * PI * alpha).cos() };
    Ok(1.0 / (chi * cos))
}

pub fn derive_constants(alpha: f64, beta: f64, chi: f64) -> Result<DerivedConstants> {
    check_domain(alpha, beta)?;
    let c1 = c1(alpha, chi)?;
    let theta = beta / alpha;
    let lambda = beta / (alpha - beta);
    let b = c1.powf(-1.0 / alpha);
    let m = b * theta / gamma(1.0 - theta);
    let mu = (gamma(1.0 - theta) * m).powf(alpha / (alpha - beta)) * (alpha - beta) / beta;
    let c_liminf = mu.powf(1.0 / lambda);
    let (c2, d) = modulus_constants(alpha, beta)?;
    Ok(DerivedConstants {
        alpha,
        beta,
        chi,
        theta,
        lambda,
        c1,
        b,
        m,
        mu,
        c_liminf,
        kappa_paper: c_liminf.powf(theta),
        kappa_consistent: mu.powf(-(alpha - beta) / alpha),
        c2,
        d,
    })
}

/// Both candidate limsup constants for `Z(t) / (t^theta (log|log t|)^(1-theta))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LilConstants {
    /// `c(beta, alpha)^(beta/alpha)` as literally stated for the limsup.
    pub paper: f64,
    /// `mu^(-(alpha-beta)/alpha)`, obtained by inverting the liminf law and
    /// matching the upper-function integral test.
    pub breiman_consistent: f64,
}

pub fn lil_limsup_constants(dc: &DerivedConstants) -> LilConstants {
    LilConstants {
        paper: dc.kappa_paper,
        breiman_consistent: dc.kappa_consistent,
    }
}

fn log_abs_log(t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::DomainError(format!("t = {t} must be positive")));
    }
    let ll = t.ln().abs().ln();
    if !(ll > 0.0) {
        return Err(Error::DomainError(format!("log|log t| <= 0 at t = {t}")));
    }
    Ok(ll)
}

/// `t^(alpha/beta) (log|log t|)^((beta-alpha)/beta)`.
pub fn fristedt_normalizer(t: f64, alpha: f64, beta: f64) -> Result<f64> {
    let ll = log_abs_log(t)?;
    Ok(t.powf(alpha / beta) * ll.powf((beta - alpha) / beta))
}

/// `t^(beta/alpha) (log|log t|)^((alpha-beta)/alpha)`.
pub fn lil_normalizer(t: f64, alpha: f64, beta: f64) -> Result<f64> {
    let ll = log_abs_log(t)?;
    Ok(t.powf(beta / alpha) * ll.powf((alpha - beta) / alpha))
}

/// Solves `rho^-(1-1/gamma) = Gamma(1+1/gamma) Gamma(1-1/gamma) / (pi chi) Re[(1 + i nu tan(pi gamma/2))^(-1/gamma)]`.
pub fn stone_rho(gamma_index: f64, chi: f64, nu: f64) -> Result<f64> {
    if !(gamma_index > 1.0 && gamma_index <= 2.0) {
        return Err(Error::DomainError(format!("gamma = {gamma_index} outside (1, 2]")));
    }
    if !(chi > 0.0) || !(-1.0..=1.0).contains(&nu) {
        return Err(Error::DomainError(format!("chi = {chi}, nu = {nu}")));
    }
    let g = 1.0 / gamma_index;
    let tan = if gamma_index == 2.0 { 0.0 } else { (0.5 * PI * gamma_index).tan() };
    let re = Complex64::new(1.0, nu * tan).powf(-g).re;
    if !(re > 0.0) {
        return Err(Error::DegenerateRe(re));
    }
    let rhs = gamma(1.0 + g) * gamma(1.0 - g) / (PI * chi) * re;
    Ok(rhs.powf(-1.0 / (1.0 - g)))
}

/// `(c2, d)` with `c2 = (1-theta) theta^(theta/(1-theta))` and `d = (alpha c2 / beta)^(1-theta)`.
pub fn modulus_constants(alpha: f64, beta: f64) -> Result<(f64, f64)> {
    check_domain(alpha, beta)?;
    let theta = beta / alpha;
    let c2 = (1.0 - beta / alpha) * (beta / alpha).powf(beta / (alpha - beta));
    let d = (alpha * c2 / beta).powf(1.0 - theta);
    Ok((c2, d))
}

/// Constants for `W(L(t))`, `L` the local time at zero of a stable process of
/// index `gamma`, using `L(t) = E(rho t)` with `beta = 1 - 1/gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalTimeLilConstants {
    pub beta: f64,
    pub rho: f64,
    /// `rho^theta * kappa_consistent`, from the scaling `Z(rho t)`.
    pub scaled_consistent: f64,
    /// `rho^theta * kappa_paper`.
    pub scaled_paper: f64,
    /// `(rho c(beta, 2))^((gamma-1)/(2 gamma))` as literally stated.
    pub literal: f64,
}

pub fn local_time_lil_constants(
    gamma_index: f64,
    chi_y: f64,
    nu_y: f64,
    chi_w: f64,
) -> Result<LocalTimeLilConstants> {
    let rho = stone_rho(gamma_index, chi_y, nu_y)?;
    let beta = 1.0 - 1.0 / gamma_index;
    let dc = derive_constants(2.0, beta, chi_w)?;
    let scale = rho.powf(dc.theta);
    Ok(LocalTimeLilConstants {
        beta,
        rho,
        scaled_consistent: scale * dc.kappa_consistent,
        scaled_paper: scale * dc.kappa_paper,
        literal: (rho * dc.c_liminf).powf((gamma_index - 1.0) / (2.0 * gamma_index)),
    })
}

/// Per-path statistics with a few quantiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathStatSummary {
    pub stats: Vec<f64>,
    pub median: f64,
    pub q10: f64,
    pub q90: f64,
}

impl PathStatSummary {
    pub fn from_stats(stats: Vec<f64>) -> Result<Self> {
        let e = Ecdf::new(&stats)?;
        Ok(Self {
            median: e.quantile(0.5),
            q10: e.quantile(0.1),
            q90: e.quantile(0.9),
            stats,
        })
    }

    pub fn fraction_at_least(&self, x: f64) -> f64 {
        self.stats.iter().filter(|&&s| s >= x).count() as f64 / self.stats.len() as f64
    }

    pub fn fraction_above(&self, x: f64) -> f64 {
        self.stats.iter().filter(|&&s| s > x).count() as f64 / self.stats.len() as f64
    }
}

/// Powers of two inside `[lo, hi]`.
pub fn dyadic_times(lo: f64, hi: f64) -> Vec<f64> {
    let first = lo.log2().ceil() as i32;
    let last = hi.log2().floor() as i32;
    (first..=last).map(|k| 2f64.powi(k)).collect()
}

/// Max over dyadic `t` in `[t_lo, t_hi]` of `path(t) / lil_normalizer(t)`.
pub fn limsup_stat(path: &GridPath, t_lo: f64, t_hi: f64, alpha: f64, beta: f64) -> Result<f64> {
    if !(t_lo > std::f64::consts::E) || !(t_hi >= t_lo) {
        return Err(Error::DomainError(format!("need e < t_lo <= t_hi, got [{t_lo}, {t_hi}]")));
    }
    let times = dyadic_times(t_lo, t_hi);
    if times.is_empty() {
        return Err(Error::DomainError(format!("no dyadic time in [{t_lo}, {t_hi}]")));
    }
    times.iter().try_fold(f64::NEG_INFINITY, |acc, &t| {
        Ok(acc.max(path.value_at(t)? / lil_normalizer(t, alpha, beta)?))
    })
}

pub fn empirical_limsup_stat(
    paths: &[GridPath],
    t_lo: f64,
    t_hi: f64,
    alpha: f64,
    beta: f64,
) -> Result<PathStatSummary> {
    let stats = paths
        .iter()
        .map(|p| limsup_stat(p, t_lo, t_hi, alpha, beta))
        .collect::<Result<Vec<_>>>()?;
    PathStatSummary::from_stats(stats)
}

/// Min over dyadic `t` in `[t_lo, t_hi]` of `path(t) / fristedt_normalizer(t)`.
pub fn liminf_stat(path: &GridPath, t_lo: f64, t_hi: f64, alpha: f64, beta: f64) -> Result<f64> {
    if !(t_lo > std::f64::consts::E) || !(t_hi >= t_lo) {
        return Err(Error::DomainError(format!("need e < t_lo <= t_hi, got [{t_lo}, {t_hi}]")));
    }
    let times = dyadic_times(t_lo, t_hi);
    if times.is_empty() {
        return Err(Error::DomainError(format!("no dyadic time in [{t_lo}, {t_hi}]")));
    }
    times.iter().try_fold(f64::INFINITY, |acc, &t| {
        Ok(acc.min(path.value_at(t)? / fristedt_normalizer(t, alpha, beta)?))
    })
}

/// Liminf probe for `D o sigma`; `paths` are subordinator paths from
/// [`crate::path::bochner_path`].
pub fn empirical_liminf_subordinator_stat(
    paths: &[GridPath],
    t_lo: f64,
    t_hi: f64,
    alpha: f64,
    beta: f64,
) -> Result<PathStatSummary> {
    let stats = paths
        .iter()
        .map(|p| liminf_stat(p, t_lo, t_hi, alpha, beta))
        .collect::<Result<Vec<_>>>()?;
    PathStatSummary::from_stats(stats)
}

/// Dyadic increments `2^-k` for `k` between the two exponents, inclusive, in either order.
pub fn dyadic_h_grid(k_a: u32, k_b: u32) -> Vec<f64> {
    (k_a.min(k_b)..=k_a.max(k_b)).map(|k| 2f64.powi(-(k as i32))).collect()
}

/// `sup_{t, h} (zbar(t+h) - zbar(t)) / (h^theta (log 1/h)^(1-theta))` over a
/// uniform grid; every `h` must be a multiple of the grid spacing.
pub fn empirical_modulus_stat(zbar: &GridPath, h_grid: &[f64], alpha: f64, beta: f64) -> Result<f64> {
    check_domain(alpha, beta)?;
    let times = zbar.times();
    let values = zbar.values();
    if times.len() < 2 {
        return Err(Error::DegenerateGrid(times.len()));
    }
    if h_grid.is_empty() {
        return Err(Error::DomainError("empty h grid".into()));
    }
    let spacing = times[1] - times[0];
    let theta = beta / alpha;
    let mut best: f64 = 0.0;
    for &h in h_grid {
        if !(h > 0.0 && h < (-1f64).exp()) {
            return Err(Error::DomainError(format!("h = {h} outside (0, 1/e)")));
        }
        let offset = (h / spacing).round() as usize;
        if offset == 0 || ((offset as f64) * spacing - h).abs() > 1e-9 * h {
            return Err(Error::DomainError(format!("h = {h} is not a multiple of the grid spacing {spacing}")));
        }
        let norm = h.powf(theta) * (1.0 / h).ln().powf(1.0 - theta);
        let widest = values
            .iter()
            .zip(values.iter().skip(offset))
            .map(|(a, b)| b - a)
            .fold(0.0, f64::max);
        best = best.max(widest / norm);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::PathKind;

    // 50-digit reference values (mpmath)
    const MU_CHI1: f64 = 0.472_470_393_710_577;
    const KAPPA_PAPER_CHI1: f64 = 0.569_876_764_238_694;
    const KAPPA_CONSISTENT_CHI1: f64 = 1.754_765_350_603_32;
    const D_2_HALF: f64 = 1.611_854_897_735_31;

    #[test]
    fn brownian_half_chi_one() {
        let dc = derive_constants(2.0, 0.5, 1.0).unwrap();
        assert_eq!(dc.c1, 1.0);
        assert!((dc.mu - MU_CHI1).abs() < 1e-14);
        assert!((dc.lambda - 1.0 / 3.0).abs() < 1e-15);
        assert!((dc.c_liminf - 27.0 / 256.0).abs() < 1e-14);
        assert!((dc.kappa_paper - KAPPA_PAPER_CHI1).abs() < 1e-13);
        assert!((dc.kappa_consistent - KAPPA_CONSISTENT_CHI1).abs() < 1e-13);
    }

    #[test]
    fn brownian_half_chi_two() {
        let dc = derive_constants(2.0, 0.5, 2.0).unwrap();
        assert_eq!(dc.c1, 0.5);
        assert!((dc.b - 2f64.sqrt()).abs() < 1e-15);
        assert!((dc.mu - 0.75).abs() < 1e-14);
        assert!((dc.c_liminf - 27.0 / 64.0).abs() < 1e-14);
        assert!((dc.kappa_paper - 0.805_927_448_867_656).abs() < 1e-13);
        assert!((dc.kappa_consistent - 1.240_806_478_802_8).abs() < 1e-12);
    }

    #[test]
    fn c1_at_alpha_two_is_inverse_chi() {
        for chi in [0.5, 1.0, 3.0] {
            assert_eq!(c1(2.0, chi).unwrap(), 1.0 / chi);
        }
        assert!(c1(1.0, 1.0).is_err());
    }

    #[test]
    fn identities_over_sweep() {
        for alpha in [1.2, 1.5, 2.0] {
            for beta in [0.3, 0.5, 0.7, 0.9] {
                for chi in [0.5, 1.0, 2.0] {
                    let dc = derive_constants(alpha, beta, chi).unwrap();
                    let th = dc.theta;
                    assert!((dc.lambda - th / (1.0 - th)).abs() < 1e-12);
                    assert!((dc.m * gamma(1.0 - th) - dc.b * th).abs() < 1e-12);
                    let mu2 = (dc.b * th).powf(1.0 / (1.0 - th)) * (1.0 - th) / th;
                    assert!((dc.mu - mu2).abs() < 1e-12 * mu2);
                    assert!((dc.kappa_paper * dc.kappa_consistent - 1.0).abs() < 1e-12);
                    assert!(dc.c2 < 1.0 && dc.c2 > 0.0);
                    let c2 = (1.0 - th) * th.powf(th / (1.0 - th));
                    assert!((dc.c2 - c2).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn modulus_examples() {
        let (c2, d) = modulus_constants(2.0, 0.5).unwrap();
        assert!((c2 - MU_CHI1).abs() < 1e-14);
        assert!((d - D_2_HALF).abs() < 1e-13);
    }

    #[test]
    fn normalizers() {
        let t = std::f64::consts::E.exp();
        assert!((fristedt_normalizer(t, 2.0, 0.5).unwrap() - t.powi(4)).abs() < 1e-9 * t.powi(4));
        assert!((lil_normalizer(t, 2.0, 0.5).unwrap() - t.powf(0.25)).abs() < 1e-12);
        assert!(fristedt_normalizer(std::f64::consts::E, 2.0, 0.5).is_err());
        // small-time branch uses |log t|
        let s = 1.0 / t;
        assert!((lil_normalizer(s, 2.0, 0.5).unwrap() - s.powf(0.25)).abs() < 1e-12);
    }

    #[test]
    fn asymptotic_inverse() {
        for (alpha, beta) in [(2.0, 0.5), (1.5, 0.7), (1.2, 0.3)] {
            // the composition is the identity up to a ratio of iterated logarithms
            for t in [1e6f64, 1e12, 1e40] {
                let f = fristedt_normalizer(t, alpha, beta).unwrap();
                let r = lil_normalizer(f, alpha, beta).unwrap() / t;
                let ll_ratio = f.ln().ln() / t.ln().ln();
                let want = ll_ratio.powf((alpha - beta) / alpha);
                assert!((r / want - 1.0).abs() < 1e-10, "({alpha}, {beta}): {r} vs {want}");
            }
        }
    }

    #[test]
    fn stone_rho_values() {
        assert!((stone_rho(2.0, 2.0, 0.0).unwrap() - 16.0).abs() < 1e-12);
        for chi in [0.3, 0.5, 1.0, 2.0, 7.0] {
            for nu in [-1.0, 0.0, 0.4, 1.0] {
                let r = stone_rho(2.0, chi, nu).unwrap();
                assert!((r - 4.0 * chi * chi).abs() < 1e-12 * r);
            }
        }
        // nu = 0: the complex term is exactly 1
        let g: f64 = 1.5;
        let rhs = gamma(1.0 + 1.0 / g) * gamma(1.0 - 1.0 / g) / PI;
        assert!((stone_rho(g, 1.0, 0.0).unwrap() - rhs.powf(-1.0 / (1.0 - 1.0 / g))).abs() < 1e-12);
        assert!(stone_rho(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn local_time_constants_agree_with_scaling() {
        let c = local_time_lil_constants(2.0, 2.0, 0.0, 1.0).unwrap();
        assert_eq!(c.beta, 0.5);
        // (rho c_liminf)^theta = rho^theta kappa_paper exactly
        assert!((c.literal - c.scaled_paper).abs() < 1e-12);
    }

    fn step_path(times: Vec<f64>, values: Vec<f64>) -> GridPath {
        GridPath::new(PathKind::PiecewiseLinear, times, values).unwrap()
    }

    #[test]
    fn limsup_stat_properties() {
        let times: Vec<f64> = (0..=20).map(|k| if k == 0 { 0.0 } else { 2f64.powi(k) }).collect();
        let zero = step_path(times.clone(), vec![0.0; times.len()]);
        assert_eq!(limsup_stat(&zero, 8.0, 1024.0, 2.0, 0.5).unwrap(), 0.0);
        let vals: Vec<f64> = times.iter().map(|t| (t + 1.0).ln().sin()).collect();
        let p = step_path(times, vals);
        let mut prev = f64::NEG_INFINITY;
        for hi in [16.0, 64.0, 1024.0, 1e6] {
            let s = limsup_stat(&p, 8.0, hi, 2.0, 0.5).unwrap();
            assert!(s >= prev);
            prev = s;
        }
        assert!(limsup_stat(&p, 2.0, 100.0, 2.0, 0.5).is_err());
    }

    #[test]
    fn modulus_stat_properties() {
        let n = 1025;
        let times: Vec<f64> = (0..n).map(|i| i as f64 / 1024.0).collect();
        let flat = step_path(times.clone(), vec![1.0; n]);
        let h = dyadic_h_grid(4, 10);
        assert_eq!(empirical_modulus_stat(&flat, &h, 2.0, 0.5).unwrap(), 0.0);
        let ramp = step_path(times.clone(), times.clone());
        let s = empirical_modulus_stat(&ramp, &h, 2.0, 0.5).unwrap();
        assert!(s > 0.0);
        assert!(empirical_modulus_stat(&ramp, &[0.5], 2.0, 0.5).is_err());
        assert!(empirical_modulus_stat(&ramp, &[0.001], 2.0, 0.5).is_err());
    }

    #[test]
    fn dyadic_grids() {
        let t = dyadic_times(std::f64::consts::E.powi(2), 2f64.powi(20));
        assert_eq!(t.first(), Some(&8.0));
        assert_eq!(t.len(), 18);
        assert_eq!(dyadic_h_grid(4, 16).len(), 13);
    }
}
