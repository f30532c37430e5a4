//! Empirical CDFs, Kolmogorov-Smirnov tests and Monte Carlo intervals.
//!
//! p-values come from the asymptotic Kolmogorov distribution only; every
//! sample in this crate has at least a thousand points.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Monte Carlo point estimate with a symmetric normal-approximation interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithCI {
    pub mean: f64,
    pub half_width: f64,
    pub level: f64,
    pub n: usize,
    pub seed: Option<u64>,
}

impl EstimateWithCI {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// Standard error implied by the half-width.
    pub fn std_error(&self) -> f64 {
        self.half_width / normal_quantile_two_sided(self.level)
    }

    pub fn contains(&self, x: f64) -> bool {
        (self.mean - x).abs() <= self.half_width
    }
}

/// Result of a KS test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / SQRT_2)
}

/// Multiplier `z` with `P(|N| <= z) = level`.
pub fn normal_quantile_two_sided(level: f64) -> f64 {
    Normal::standard().inverse_cdf(0.5 + 0.5 * level)
}

/// `P(K <= x)` for the Kolmogorov distribution.
pub fn kolmogorov_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x < 1.18 {
        // theta-function form converges fast for small x
        let pref = (2.0 * PI).sqrt() / x;
        let q = -PI * PI / (8.0 * x * x);
        let sum: f64 = (1..=20)
            .map(|k| ((2 * k - 1) as f64).powi(2) * q)
            .map(f64::exp)
            .sum();
        (pref * sum).min(1.0)
    } else {
        1.0 - kolmogorov_survival(x)
    }
}

/// `P(K > x) = 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 x^2)`.
pub fn kolmogorov_survival(x: f64) -> f64 {
    if x < 1.18 {
        return 1.0 - kolmogorov_cdf(x);
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * x * x).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn sorted(samples: &[f64]) -> Vec<f64> {
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Exact empirical CDF backed by a sorted copy of the data.
#[derive(Debug, Clone)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

impl Ecdf {
    pub fn new(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySample);
        }
        Ok(Self { sorted: sorted(samples) })
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Empirical quantile by the nearest-rank rule.
    pub fn quantile(&self, q: f64) -> f64 {
        let n = self.sorted.len();
        let rank = ((q * n as f64).ceil() as usize).clamp(1, n);
        self.sorted[rank - 1]
    }
}

pub fn ks_one_sample<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<(f64, f64)> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let xs = sorted(samples);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok((d, kolmogorov_survival(n.sqrt() * d)))
}

pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    let xa = sorted(a);
    let xb = sorted(b);
    let (na, nb) = (xa.len(), xb.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < na && j < nb {
        let x = xa[i].min(xb[j]);
        while i < na && xa[i] <= x {
            i += 1;
        }
        while j < nb && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    let n_eff = (na * nb) as f64 / (na + nb) as f64;
    Ok((d, kolmogorov_survival(n_eff.sqrt() * d)))
}

pub fn ks_result(stat_p: (f64, f64)) -> KsResult {
    KsResult { statistic: stat_p.0, p_value: stat_p.1 }
}

pub fn mc_mean_ci(samples: &[f64], level: f64) -> Result<EstimateWithCI> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: n });
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidParameter(format!("confidence level {level}")));
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    Ok(EstimateWithCI {
        mean,
        half_width: normal_quantile_two_sided(level) * (var / n as f64).sqrt(),
        level,
        n,
        seed: None,
    })
}
