//! Seeded Monte Carlo experiments that compare simulated paths with the
//! closed-form results. Path `i` of every run uses stream `i` of the seed,
//! so results do not depend on how rayon splits the work.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{
    derive_constants, dyadic_h_grid, dyadic_times, limsup_stat, lil_normalizer, stone_rho, DerivedConstants,
    PathStatSummary, empirical_modulus_stat,
};
use crate::error::{Error, Result};
use crate::mittag_leffler::{ml_neg, MLConfig};
use crate::path::{bochner_sample, compose_z, levy_local_time_oracle, running_sup, simulate_subordinator_until, CompositionSpec, ZWalker};
use crate::rng::{RngStream, LANE_AUX};
use crate::stable::{sample_one_sided_cms, StableParams, SubordinatorParams};
use crate::stats::{ks_result, ks_two_sample, mc_mean_ci, EstimateWithCI, KsResult};

const THREE_SIGMA: f64 = 0.9973;

fn check_paths(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: n });
    }
    Ok(())
}

/// One Laplace-transform comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaplaceComparison {
    pub s: f64,
    pub estimate: EstimateWithCI,
    pub exact: f64,
    pub within: bool,
}

fn compare(s: f64, samples: &[f64], exact: f64, seed: u64) -> Result<LaplaceComparison> {
    let xs: Vec<f64> = samples.iter().map(|x| (-s * x).exp()).collect();
    let estimate = mc_mean_ci(&xs, THREE_SIGMA)?.with_seed(seed);
    Ok(LaplaceComparison {
        s,
        within: estimate.contains(exact),
        estimate,
        exact,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BochnerReport {
    pub alpha: f64,
    pub beta: f64,
    pub chi: f64,
    pub theta: f64,
    pub b: f64,
    pub laplace: Vec<LaplaceComparison>,
    /// Composed draws against direct one-sided stable draws of index `theta`.
    pub ks: KsResult,
    pub ks_threshold: f64,
}

impl BochnerReport {
    pub fn passes(&self) -> bool {
        self.laplace.iter().all(|c| c.within) && self.ks.p_value > self.ks_threshold
    }
}

/// `D o sigma(1)` against `exp(-b s^theta)` and against a direct stable sampler.
pub fn bochner_check(alpha: f64, beta: f64, chi: f64, s_list: &[f64], n: usize, seed: u64) -> Result<BochnerReport> {
    check_paths(n)?;
    let dc = derive_constants(alpha, beta, chi)?;
    let composed = (0..n)
        .into_par_iter()
        .map(|i| bochner_sample(beta, alpha, chi, 1.0, &mut RngStream::for_path(seed, i).generator()))
        .collect::<Result<Vec<f64>>>()?;
    let direct: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| sample_one_sided_cms(dc.theta, dc.b, &mut RngStream::for_path(seed, i).lane(LANE_AUX)))
        .collect();
    let laplace = s_list
        .iter()
        .map(|&s| compare(s, &composed, (-dc.b * s.powf(dc.theta)).exp(), seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(BochnerReport {
        alpha,
        beta,
        chi,
        theta: dc.theta,
        b: dc.b,
        laplace,
        ks: ks_result(ks_two_sample(&composed, &direct)?),
        ks_threshold: 1e-3,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InverseLaplaceReport {
    pub beta: f64,
    pub t: f64,
    pub step: f64,
    pub laplace: Vec<LaplaceComparison>,
}

impl InverseLaplaceReport {
    pub fn passes(&self) -> bool {
        self.laplace.iter().all(|c| c.within)
    }
}

/// `E(t)` read off a subordinator lattice with spacing `step`.
pub fn sample_inverse(inner: &SubordinatorParams, t: f64, step: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    (0..n)
        .into_par_iter()
        .map(|i| {
            let d = simulate_subordinator_until(inner, step, t, &mut RngStream::for_path(seed, i).generator())?;
            Ok(d.horizon())
        })
        .collect()
}

/// `E[exp(-s E(t))]` against `E_beta(-s t^beta)`.
pub fn inverse_laplace_check(beta: f64, t: f64, s_list: &[f64], n: usize, step: f64, seed: u64) -> Result<InverseLaplaceReport> {
    check_paths(n)?;
    let inner = SubordinatorParams::standard(beta)?;
    let e = sample_inverse(&inner, t, step, n, seed)?;
    let cfg = MLConfig::default();
    let laplace = s_list
        .iter()
        .map(|&s| compare(s, &e, ml_neg(beta, s * t.powf(beta), &cfg)?, seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(InverseLaplaceReport { beta, t, step, laplace })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalTimeReport {
    pub chi: f64,
    pub nu: f64,
    pub rho: f64,
    pub beta: f64,
    pub horizon: f64,
    pub ks: KsResult,
    pub ks_threshold: f64,
    pub median_oracle: f64,
    pub median_clock: f64,
    /// `rho` that would equate the medians, using `E(rho) =d rho^beta E(1)`.
    pub rho_matching_medians: f64,
    pub rho_check: bool,
}

impl LocalTimeReport {
    pub fn passes(&self) -> bool {
        self.ks.p_value > self.ks_threshold && self.rho_check
    }
}

/// Brownian local time at zero at `horizon` against `E(rho * horizon)`.
pub fn local_time_check(chi: f64, nu: f64, horizon: f64, n: usize, oracle_grid: usize, step: f64, seed: u64) -> Result<LocalTimeReport> {
    check_paths(n)?;
    let rho = stone_rho(2.0, chi, nu)?;
    let beta = 0.5;
    let inner = SubordinatorParams::standard(beta)?;
    let clock = sample_inverse(&inner, rho * horizon, step, n, seed)?;
    let oracle = (0..n)
        .into_par_iter()
        .map(|i| Ok(levy_local_time_oracle(horizon, oracle_grid, &mut RngStream::for_path(seed, i).lane(LANE_AUX))?.last_value()))
        .collect::<Result<Vec<f64>>>()?;
    let median = |xs: &[f64]| crate::stats::Ecdf::new(xs).map(|e| e.quantile(0.5));
    let (mo, mc) = (median(&oracle)?, median(&clock)?);
    let rho_check = [0.5, 1.0, 2.0, 3.0]
        .iter()
        .all(|&c| stone_rho(2.0, c, nu).map(|r| (r - 4.0 * c * c).abs() <= 1e-12 * 4.0 * c * c).unwrap_or(false));
    Ok(LocalTimeReport {
        chi,
        nu,
        rho,
        beta,
        horizon,
        ks: ks_result(ks_two_sample(&oracle, &clock)?),
        ks_threshold: 1e-3,
        median_oracle: mo,
        median_clock: mc,
        rho_matching_medians: rho * (mo / mc).powf(1.0 / beta),
        rho_check,
    })
}

/// Large-time LIL probe for `Z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LilReport {
    pub constants: DerivedConstants,
    pub t_lo: f64,
    pub t_hi: f64,
    pub step: f64,
    pub summary: PathStatSummary,
    pub kappa_paper: f64,
    pub kappa_consistent: f64,
    /// Fraction of paths with statistic `>= 0.5 kappa_consistent`.
    pub fraction_reaching_half: f64,
    /// Fraction with statistic `> 1.5 max(kappa_paper, kappa_consistent)`.
    pub fraction_exceeding: f64,
    /// The constant closer (in log scale) to the median statistic.
    pub favors: String,
}

impl LilReport {
    pub fn passes(&self) -> bool {
        self.fraction_reaching_half >= 0.5 && self.fraction_exceeding <= 0.1
    }
}

/// `max_t Z(t) / (t^theta (log log t)^(1-theta))` over dyadic `t` in `[t_lo, t_hi]`, per path.
pub fn lil_experiment(
    driver: StableParams,
    beta: f64,
    t_lo: f64,
    t_hi: f64,
    n_paths: usize,
    step: f64,
    seed: u64,
) -> Result<LilReport> {
    check_paths(n_paths)?;
    let alpha = driver.alpha();
    let dc = derive_constants(alpha, beta, driver.chi())?;
    let inner = SubordinatorParams::standard(beta)?;
    let times = dyadic_times(t_lo, t_hi);
    // validates the range before any simulation
    lil_normalizer(t_lo.max(times.first().copied().unwrap_or(t_lo)), alpha, beta)?;
    let stats = (0..n_paths)
        .into_par_iter()
        .map(|i| {
            let mut walker = ZWalker::new(&driver, &inner, step, RngStream::for_path(seed, i));
            let mut grid = vec![0.0];
            let mut vals = vec![0.0];
            for &t in &times {
                grid.push(t);
                vals.push(walker.advance_to(t)?.1);
            }
            let path = crate::path::GridPath::new(crate::path::PathKind::RightContinuousStep, grid, vals)?;
            limsup_stat(&path, t_lo, t_hi, alpha, beta)
        })
        .collect::<Result<Vec<f64>>>()?;
    let summary = PathStatSummary::from_stats(stats)?;
    let (kp, kc) = (dc.kappa_paper, dc.kappa_consistent);
    let favors = if (summary.median.ln() - kc.ln()).abs() <= (summary.median.ln() - kp.ln()).abs() {
        "breiman-consistent"
    } else {
        "paper"
    };
    Ok(LilReport {
        constants: dc,
        t_lo,
        t_hi,
        step,
        fraction_reaching_half: summary.fraction_at_least(0.5 * kc),
        fraction_exceeding: summary.fraction_above(1.5 * kp.max(kc)),
        favors: favors.into(),
        summary,
        kappa_paper: kp,
        kappa_consistent: kc,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusReport {
    pub alpha: f64,
    pub beta: f64,
    pub chi: f64,
    pub grid_log2: u32,
    pub h_log2_range: (u32, u32),
    pub c2: f64,
    pub d: f64,
    pub summary: PathStatSummary,
    /// `median / d`.
    pub ratio: f64,
}

impl ModulusReport {
    pub fn within_factor(&self, factor: f64) -> bool {
        self.ratio >= 1.0 / factor && self.ratio <= factor
    }
}

/// Modulus statistic of `Z-bar` on `[0, 1]` with `2^grid_log2` intervals.
pub fn modulus_experiment(
    driver: StableParams,
    beta: f64,
    grid_log2: u32,
    h_log2_range: (u32, u32),
    n_paths: usize,
    seed: u64,
) -> Result<ModulusReport> {
    check_paths(n_paths)?;
    let alpha = driver.alpha();
    let dc = derive_constants(alpha, beta, driver.chi())?;
    let spec = CompositionSpec::new(driver, SubordinatorParams::standard(beta)?, 1.0, (1usize << grid_log2) + 1)?;
    let h_grid = dyadic_h_grid(h_log2_range.0, h_log2_range.1);
    let stats = (0..n_paths)
        .into_par_iter()
        .map(|i| {
            let c = compose_z(&spec, RngStream::for_path(seed, i))?;
            empirical_modulus_stat(&running_sup(&c.z), &h_grid, alpha, beta)
        })
        .collect::<Result<Vec<f64>>>()?;
    let summary = PathStatSummary::from_stats(stats)?;
    Ok(ModulusReport {
        alpha,
        beta,
        chi: driver.chi(),
        grid_log2,
        h_log2_range,
        c2: dc.c2,
        d: dc.d,
        ratio: summary.median / dc.d,
        summary,
    })
}
