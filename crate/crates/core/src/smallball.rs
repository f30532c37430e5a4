//! Small-ball probabilities `P(sup_{0<=t<=1} |Z(t)| <= u)`.
//!
//! For a Brownian driver the exit-time series of Brownian motion from
//! `[-u, u]` can be averaged over the clock `E(1)`, which turns each
//! exponential `exp(-z_k)` into `E_beta(-z_k)`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::mittag_leffler::{ml_neg, MLConfig};
use crate::path::{CompositionSpec, ZWalker};
use crate::rng::RngStream;
use crate::stats::{mc_mean_ci, normal_quantile_two_sided, EstimateWithCI};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmallBallSeriesConfig {
    pub k_max: usize,
    /// Stop once the truncation bound falls below this.
    pub remainder_tol: f64,
    pub ml: MLConfig,
}

impl Default for SmallBallSeriesConfig {
    fn default() -> Self {
        Self {
            k_max: 200_000,
            remainder_tol: 1e-13,
            ml: MLConfig::default(),
        }
    }
}

impl SmallBallSeriesConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_max == 0 {
            return Err(Error::InvalidParameter("k_max must be positive".into()));
        }
        if !(self.remainder_tol > 0.0 && self.remainder_tol < 1.0) {
            return Err(Error::InvalidParameter(format!("remainder_tol {}", self.remainder_tol)));
        }
        self.ml.validate()
    }
}

/// Sum of an alternating series `sum_k (-1)^(k-1) a_k` with `a_k >= 0`.
///
/// Terms must decrease; the result is the midpoint of two consecutive
/// partial sums, whose error is at most `(a_k - a_{k+1}) / 2` when the
/// magnitudes are also convex. Returns the sum and the last bound.
fn alternating_sum<F>(mut term: F, k_max: usize, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(usize) -> Result<f64>,
{
    let mut sum = 0.0;
    let mut prev = term(1)?;
    for k in 1..=k_max {
        let next = term(k + 1)?;
        if next > prev {
            return Err(Error::NoConvergence(format!(
                "series terms increase at k = {k} ({prev} -> {next})"
            )));
        }
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        sum += sign * prev;
        let bound = 0.5 * (prev - next);
        if bound <= tol || next == 0.0 {
            // midpoint of S_k and S_{k+1}
            return Ok((sum - sign * 0.5 * next, bound));
        }
        prev = next;
    }
    Err(Error::NoConvergence(format!("alternating series not within {tol} after {k_max} terms")))
}

fn exit_rate(k: usize, u: f64) -> f64 {
    let odd = (2 * k - 1) as f64;
    odd * odd * PI * PI / (8.0 * u * u)
}

fn check_level(u: f64) -> Result<()> {
    if !(u > 0.0) || !u.is_finite() {
        return Err(Error::DomainError(format!("u = {u} must be positive and finite")));
    }
    Ok(())
}

/// `P(sup_{0<=t<=1} |W(t)| <= u)` for standard Brownian motion.
pub fn chung_smallball_bm(u: f64) -> Result<f64> {
    chung_smallball_bm_with(u, &SmallBallSeriesConfig::default())
}

pub fn chung_smallball_bm_with(u: f64, cfg: &SmallBallSeriesConfig) -> Result<f64> {
    check_level(u)?;
    cfg.validate()?;
    let (s, _) = alternating_sum(
        |k| Ok((-exit_rate(k, u)).exp() / (2 * k - 1) as f64),
        cfg.k_max,
        cfg.remainder_tol,
    )?;
    Ok((4.0 / PI * s).clamp(0.0, 1.0))
}

/// `P(sup_{0<=t<=1} |W(E(t))| <= u)` for standard `W` and the inverse of a
/// standard `beta`-stable subordinator.
pub fn smallball_z_series(beta: f64, u: f64, cfg: &SmallBallSeriesConfig) -> Result<f64> {
    check_level(u)?;
    cfg.validate()?;
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::DomainError(format!("beta = {beta} outside (0, 1]")));
    }
    let (s, _) = alternating_sum(
        |k| Ok(ml_neg(beta, exit_rate(k, u), &cfg.ml)? / (2 * k - 1) as f64),
        cfg.k_max,
        cfg.remainder_tol,
    )?;
    Ok((4.0 / PI * s).clamp(0.0, 1.0))
}

/// Same probability for a Brownian driver with variance `2t/chi`.
pub fn smallball_z_series_scaled(beta: f64, u: f64, chi: f64, cfg: &SmallBallSeriesConfig) -> Result<f64> {
    if !(chi > 0.0) {
        return Err(Error::NonpositiveScale(chi));
    }
    smallball_z_series(beta, u * (0.5 * chi).sqrt(), cfg)
}

/// `sum_k (-1)^(k-1) / (2k-1)^3`, summed term by term (equals `pi^3 / 32`).
pub fn odd_cube_series(tol: f64) -> Result<f64> {
    let (s, _) = alternating_sum(|k| Ok(((2 * k - 1) as f64).powi(-3)), 10_000_000, tol)?;
    Ok(s)
}

/// Limit of `u^-2 P(sup |W(E(t))| <= u)` as `u -> 0`.
pub fn smallball_z_limit_constant(beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::DomainError(format!("beta = {beta} outside (0, 1)")));
    }
    let s = odd_cube_series(1e-15)?;
    Ok(32.0 * gamma(beta) * (beta * PI).sin() / PI.powi(4) * s)
}

/// Parameters of the two-sided bound for a self-similar driver of index `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeParams {
    pub hurst: f64,
    pub k_const: f64,
    pub nu_slack: f64,
    pub beta: f64,
    pub c_lo: f64,
    pub c_hi: f64,
}

/// `(c_lo E_beta(-k(1+nu) u^-theta), c_hi E_beta(-k(1-nu) u^-theta))`, `theta = 1/H`.
pub fn selfsimilar_envelope(p: &EnvelopeParams, u: f64, cfg: &MLConfig) -> Result<(f64, f64)> {
    check_level(u)?;
    if !(p.hurst > 0.0 && p.hurst < 1.0) {
        return Err(Error::DomainError(format!("H = {} outside (0, 1)", p.hurst)));
    }
    if !(p.k_const > 0.0 && p.c_lo > 0.0 && p.c_hi > 0.0) {
        return Err(Error::DomainError("k, c_lo, c_hi must be positive".into()));
    }
    if !(p.nu_slack > 0.0 && p.nu_slack < 1.0) {
        return Err(Error::DomainError(format!("nu = {} outside (0, 1)", p.nu_slack)));
    }
    let scale = p.k_const * u.powf(-1.0 / p.hurst);
    let lo = p.c_lo * ml_neg(p.beta, (1.0 + p.nu_slack) * scale, cfg)?;
    let hi = p.c_hi * ml_neg(p.beta, (1.0 - p.nu_slack) * scale, cfg)?;
    Ok((lo, hi))
}

/// Monte Carlo small-ball estimates at one level, each with its
/// grid-doubling companion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmallBallMc {
    pub u: f64,
    /// Fraction of paths whose grid supremum stays within `u`.
    pub estimate: EstimateWithCI,
    /// Same paths, supremum over the grid with twice as many intervals.
    pub refined: EstimateWithCI,
    /// Brownian drivers only: mean conditional probability that the
    /// continuous path stays within `u`, given the grid values.
    pub bridge: Option<EstimateWithCI>,
    pub bridge_refined: Option<EstimateWithCI>,
}

impl SmallBallMc {
    /// Difference `estimate - refined`; never negative, since the refined sup dominates.
    pub fn grid_bias(&self) -> f64 {
        self.estimate.mean - self.refined.mean
    }

    /// The estimate to compare against exact values: the bridge estimate when available.
    pub fn best(&self) -> EstimateWithCI {
        self.bridge.unwrap_or(self.estimate)
    }

    pub fn best_refined(&self) -> EstimateWithCI {
        self.bridge_refined.unwrap_or(self.refined)
    }
}

fn proportion(hits: usize, n: usize, level: f64, seed: u64) -> EstimateWithCI {
    let p = hits as f64 / n as f64;
    let var = if n > 1 { p * (1.0 - p) * n as f64 / (n - 1) as f64 } else { 0.0 };
    EstimateWithCI {
        mean: p,
        half_width: normal_quantile_two_sided(level) * (var / n as f64).sqrt(),
        level,
        n,
        seed: Some(seed),
    }
}

/// Probability that a Brownian bridge from `x` to `y` with total variance
/// `s` stays inside `(-u, u)`, by the method of images.
pub fn bridge_stay_probability(x: f64, y: f64, s: f64, u: f64) -> f64 {
    if x.abs() >= u || y.abs() >= u {
        return 0.0;
    }
    if s <= 0.0 {
        return 1.0;
    }
    // both barriers far away relative to the bridge spread
    let near = ((u - x) * (u - y)).min((u + x) * (u + y));
    if 2.0 * near / s > 40.0 {
        return 1.0;
    }
    let w = 2.0 * u;
    let d = y - x;
    let k_max = ((20.0 * s).sqrt() / w).ceil() as i64 + 1;
    let mut p = 0.0;
    for k in -k_max..=k_max {
        let shift = 2.0 * k as f64 * w;
        let direct = d - shift;
        let image = y + x + 2.0 * u - shift;
        p += (-(direct * direct - d * d) / (2.0 * s)).exp() - (-(image * image - d * d) / (2.0 * s)).exp();
    }
    p.clamp(0.0, 1.0)
}

/// Per-path `(coarse, fine)` grid suprema of `|Z|` on `[0, horizon]`.
///
/// Each path is simulated once on the refined spec (twice the outer
/// intervals, half the lattice step); the coarse supremum reads every other
/// grid point of the same path. Path `i` uses stream `i` of `seed`.
pub fn sup_abs_samples(spec: &CompositionSpec, n_paths: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    let fine = spec.refined();
    let grid = fine.outer_grid();
    let step = fine.step();
    (0..n_paths)
        .into_par_iter()
        .map(|i| {
            let mut walker = ZWalker::new(&fine.driver, &fine.inner, step, RngStream::for_path(seed, i));
            let (mut coarse, mut all) = (0.0f64, 0.0f64);
            for (j, &t) in grid.iter().enumerate() {
                let z = walker.advance_to(t)?.1.abs();
                all = all.max(z);
                if j % 2 == 0 {
                    coarse = coarse.max(z);
                }
            }
            Ok((coarse, all))
        })
        .collect()
}

/// Running small-ball bookkeeping for one path at one resolution.
#[derive(Clone)]
struct Tracker {
    sup: f64,
    bridge: Vec<f64>,
    last: (f64, f64),
}

impl Tracker {
    fn new(levels: usize) -> Self {
        Self {
            sup: 0.0,
            bridge: vec![1.0; levels],
            last: (0.0, 0.0),
        }
    }

    fn observe(&mut self, e: f64, z: f64, us: &[f64], variance_rate: Option<f64>) {
        self.sup = self.sup.max(z.abs());
        if let Some(rate) = variance_rate {
            if e > self.last.0 {
                let s = rate * (e - self.last.0);
                for (b, &u) in self.bridge.iter_mut().zip(us) {
                    if *b > 0.0 {
                        *b *= bridge_stay_probability(self.last.1, z, s, u);
                    }
                }
            }
        }
        self.last = (e, z);
    }
}

/// Small-ball estimates for each level in `us`, from one set of paths.
///
/// Paths are simulated on the refined spec; the requested grid is every
/// other refined point. Path `i` uses stream `i` of `seed`, so the result
/// does not depend on the number of worker threads.
pub fn mc_smallball_levels(
    spec: &CompositionSpec,
    us: &[f64],
    n_paths: usize,
    seed: u64,
    level: f64,
) -> Result<Vec<SmallBallMc>> {
    for &u in us {
        check_level(u)?;
    }
    if n_paths < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: n_paths });
    }
    let fine = spec.refined();
    let grid = fine.outer_grid();
    let step = fine.step();
    let u_max = us.iter().cloned().fold(0.0, f64::max);
    let variance_rate = fine.driver.is_gaussian().then(|| 2.0 / fine.driver.chi());
    let per_path: Vec<(Tracker, Tracker)> = (0..n_paths)
        .into_par_iter()
        .map(|i| {
            let mut walker = ZWalker::new(&fine.driver, &fine.inner, step, RngStream::for_path(seed, i));
            let mut coarse = Tracker::new(us.len());
            let mut all = Tracker::new(us.len());
            for (j, &t) in grid.iter().enumerate() {
                let (e, z) = walker.advance_to(t)?;
                all.observe(e, z, us, variance_rate);
                if j % 2 == 0 {
                    coarse.observe(e, z, us, variance_rate);
                    // every level already exceeded on both grids
                    if coarse.sup > u_max {
                        break;
                    }
                }
            }
            Ok((coarse, all))
        })
        .collect::<Result<_>>()?;
    us.iter()
        .enumerate()
        .map(|(k, &u)| {
            let hits = |pick: fn(&(Tracker, Tracker)) -> &Tracker| per_path.iter().filter(|p| pick(p).sup <= u).count();
            let bridge = |pick: fn(&(Tracker, Tracker)) -> &Tracker| -> Result<Option<EstimateWithCI>> {
                if variance_rate.is_none() {
                    return Ok(None);
                }
                let xs: Vec<f64> = per_path.iter().map(|p| pick(p).bridge[k]).collect();
                Ok(Some(mc_mean_ci(&xs, level)?.with_seed(seed)))
            };
            Ok(SmallBallMc {
                u,
                estimate: proportion(hits(|p| &p.0), n_paths, level, seed),
                refined: proportion(hits(|p| &p.1), n_paths, level, seed),
                bridge: bridge(|p| &p.0)?,
                bridge_refined: bridge(|p| &p.1)?,
            })
        })
        .collect()
}

pub fn mc_smallball(spec: &CompositionSpec, u: f64, n_paths: usize, seed: u64) -> Result<SmallBallMc> {
    Ok(mc_smallball_levels(spec, &[u], n_paths, seed, 0.9973)?.remove(0))
}
