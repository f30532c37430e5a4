//! Sampled paths: subordinators, their inverses, time-changed drivers and
//! running suprema.
//!
//! `E(t) = inf{s : D(s) > t}` is read off a subordinator sampled on a
//! uniform lattice in its own time, treating `D` as a right-continuous step
//! function. The driver is then evaluated exactly at the distinct values of
//! `E` by summing independent stable increments over the gaps, so the only
//! approximation is the lattice spacing of `D`.

use std::fmt::Write as _;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{c1, stone_rho};
use crate::error::{Error, Result};
use crate::rng::{RngStream, LANE_DRIVER, LANE_SUBORDINATOR};
use crate::stable::{sample_stable, sample_subordinator_increment, StableParams, SubordinatorParams};

/// How values between grid points are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PathKind {
    RightContinuousStep,
    PiecewiseLinear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGridPath")]
pub struct GridPath {
    kind: PathKind,
    times: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Deserialize)]
struct RawGridPath {
    kind: PathKind,
    times: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<RawGridPath> for GridPath {
    type Error = Error;

    fn try_from(raw: RawGridPath) -> Result<Self> {
        GridPath::new(raw.kind, raw.times, raw.values)
    }
}

impl GridPath {
    /// Times must start at 0 and increase strictly; lengths must match.
    pub fn new(kind: PathKind, times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(Error::InvalidParameter(format!(
                "path needs matching non-empty arrays ({} times, {} values)",
                times.len(),
                values.len()
            )));
        }
        if times[0] != 0.0 {
            return Err(Error::InvalidParameter(format!("path must start at time 0, got {}", times[0])));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("path times must increase strictly".into()));
        }
        Ok(Self { kind, times, values })
    }

    pub fn kind(&self) -> PathKind {
        self.kind
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().expect("non-empty")
    }

    pub fn last_value(&self) -> f64 {
        *self.values.last().expect("non-empty")
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0])
    }

    /// Value at `t` under the path's interpolation convention.
    pub fn value_at(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0 && t <= self.horizon()) {
            return Err(Error::QueryBeyondRange { query: t, sup: self.horizon() });
        }
        let i = self.times.partition_point(|&s| s <= t) - 1;
        if self.times[i] == t || self.kind == PathKind::RightContinuousStep {
            return Ok(self.values[i]);
        }
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let w = (t - t0) / (t1 - t0);
        Ok(self.values[i] + w * (self.values[i + 1] - self.values[i]))
    }

    /// `time,value` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time,value\n");
        for (t, v) in self.times.iter().zip(&self.values) {
            let _ = writeln!(out, "{t},{v}");
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("paths serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidParameter(e.to_string()))
    }
}

/// Uniform grid with `n` points on `[0, horizon]`.
pub fn uniform_grid(horizon: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::DegenerateGrid(n));
    }
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::InvalidParameter(format!("horizon {horizon}")));
    }
    let dt = horizon / (n - 1) as f64;
    Ok((0..n).map(|i| if i == n - 1 { horizon } else { i as f64 * dt }).collect())
}

/// Driver, inner subordinator and outer grid of `Z = X(E)` on `[0, horizon]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompositionSpec {
    pub driver: StableParams,
    pub inner: SubordinatorParams,
    pub horizon: f64,
    /// Number of outer grid points, including `t = 0`.
    pub grid_size: usize,
    /// Lattice spacing for `D`; defaults to `E[E(horizon)] / (grid_size - 1)`.
    pub intrinsic_step: Option<f64>,
}

impl CompositionSpec {
    pub fn new(driver: StableParams, inner: SubordinatorParams, horizon: f64, grid_size: usize) -> Result<Self> {
        driver.check_driver()?;
        if grid_size < 2 {
            return Err(Error::DegenerateGrid(grid_size));
        }
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::InvalidParameter(format!("horizon {horizon}")));
        }
        Ok(Self {
            driver,
            inner,
            horizon,
            grid_size,
            intrinsic_step: None,
        })
    }

    pub fn with_intrinsic_step(mut self, step: f64) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::InvalidParameter(format!("intrinsic step {step}")));
        }
        self.intrinsic_step = Some(step);
        Ok(self)
    }

    pub fn step(&self) -> f64 {
        self.intrinsic_step
            .unwrap_or_else(|| self.inner.mean_inverse(self.horizon) / (self.grid_size - 1) as f64)
    }

    /// Same process on a grid with twice as many intervals and half the lattice step.
    pub fn refined(&self) -> Self {
        Self {
            grid_size: 2 * (self.grid_size - 1) + 1,
            intrinsic_step: Some(0.5 * self.step()),
            ..*self
        }
    }

    pub fn outer_grid(&self) -> Vec<f64> {
        uniform_grid(self.horizon, self.grid_size).expect("validated spec")
    }
}

const MAX_LATTICE_STEPS: usize = 1 << 30;

/// Subordinator on a uniform `n`-point grid over `[0, horizon]`.
pub fn simulate_subordinator_path<R: Rng + ?Sized>(
    params: &SubordinatorParams,
    horizon: f64,
    n: usize,
    rng: &mut R,
) -> Result<GridPath> {
    let times = uniform_grid(horizon, n)?;
    let mut values = Vec::with_capacity(n);
    values.push(0.0);
    let mut level = 0.0;
    for w in times.windows(2) {
        level += sample_subordinator_increment(params, w[1] - w[0], rng);
        values.push(level);
    }
    GridPath::new(PathKind::RightContinuousStep, times, values)
}

/// Subordinator on the lattice `k * step`, extended until it first exceeds `level`.
pub fn simulate_subordinator_until<R: Rng + ?Sized>(
    params: &SubordinatorParams,
    step: f64,
    level: f64,
    rng: &mut R,
) -> Result<GridPath> {
    if !(step > 0.0) {
        return Err(Error::InvalidParameter(format!("step {step}")));
    }
    let mut values = vec![0.0];
    let mut current = 0.0;
    while current <= level {
        if values.len() >= MAX_LATTICE_STEPS {
            return Err(Error::NoConvergence(format!("subordinator stayed below {level}")));
        }
        current += sample_subordinator_increment(params, step, rng);
        values.push(current);
    }
    let times = (0..values.len()).map(|k| k as f64 * step).collect();
    GridPath::new(PathKind::RightContinuousStep, times, values)
}

/// `E(t)` = first grid time `s` with `d(s) > t`, for each query time.
pub fn inverse_path(d: &GridPath, query_times: &[f64]) -> Result<GridPath> {
    let sup = d.last_value();
    let mut values = Vec::with_capacity(query_times.len());
    for &t in query_times {
        let k = d.values().partition_point(|&v| v <= t);
        if k == d.len() {
            return Err(Error::QueryBeyondRange { query: t, sup });
        }
        values.push(d.times()[k]);
    }
    GridPath::new(PathKind::PiecewiseLinear, query_times.to_vec(), values)
}

/// Right-continuous first-passage process of a nondecreasing path over `levels`.
pub fn first_passage(zbar: &GridPath, levels: &[f64]) -> Result<GridPath> {
    let mut p = inverse_path(zbar, levels)?;
    p.kind = PathKind::RightContinuousStep;
    Ok(p)
}

/// Driver `X` sampled at the values of `clock`, starting from `X(0) = 0`.
pub fn simulate_driver_path<R: Rng + ?Sized>(
    params: &StableParams,
    clock: &GridPath,
    rng: &mut R,
) -> Result<GridPath> {
    if !clock.is_nondecreasing() || clock.values()[0] < 0.0 {
        return Err(Error::InvalidParameter("clock must be nonnegative and nondecreasing".into()));
    }
    let mut x = 0.0;
    let mut at = 0.0;
    let values = clock
        .values()
        .iter()
        .map(|&c| {
            if c > at {
                x += sample_stable(params, c - at, rng);
                at = c;
            }
            x
        })
        .collect();
    GridPath::new(clock.kind(), clock.times().to_vec(), values)
}

/// Prefix maximum.
pub fn running_sup(path: &GridPath) -> GridPath {
    let mut best = f64::NEG_INFINITY;
    let values = path
        .values()
        .iter()
        .map(|&v| {
            best = best.max(v);
            best
        })
        .collect();
    GridPath {
        kind: path.kind,
        times: path.times.clone(),
        values,
    }
}

/// `D`, `E` and `Z` of one realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComposedPath {
    pub d: GridPath,
    pub e: GridPath,
    pub z: GridPath,
}

/// `E(0) = 0`: a subordinator with positive increments leaves 0 immediately.
fn inverse_with_origin(d: &GridPath, times: &[f64]) -> Result<GridPath> {
    let mut e = inverse_path(d, times)?;
    for (t, v) in e.times.iter().zip(e.values.iter_mut()) {
        if *t == 0.0 {
            *v = 0.0;
        }
    }
    Ok(e)
}

/// Simulate `D`, invert it on the outer grid, and evaluate the driver at `E`.
///
/// `D` draws from the subordinator lane of `rng` and `X` from the driver lane.
pub fn compose_z(spec: &CompositionSpec, rng: RngStream) -> Result<ComposedPath> {
    let mut d_rng = rng.lane(LANE_SUBORDINATOR);
    let mut x_rng = rng.lane(LANE_DRIVER);
    let d = simulate_subordinator_until(&spec.inner, spec.step(), spec.horizon, &mut d_rng)?;
    let e = inverse_with_origin(&d, &spec.outer_grid())?;
    let z = simulate_driver_path(&spec.driver, &e, &mut x_rng)?;
    Ok(ComposedPath { d, e, z })
}

/// Streaming evaluation of `(E(t), Z(t))` at increasing times.
///
/// Consumes the same random draws in the same order as [`compose_z`], but
/// never stores the subordinator lattice.
pub struct ZWalker<'a> {
    driver: &'a StableParams,
    inner: &'a SubordinatorParams,
    step: f64,
    d_rng: crate::rng::StreamRng,
    x_rng: crate::rng::StreamRng,
    lattice_index: usize,
    d_value: f64,
    clock: f64,
    x: f64,
    last_t: f64,
}

impl<'a> ZWalker<'a> {
    pub fn new(driver: &'a StableParams, inner: &'a SubordinatorParams, step: f64, rng: RngStream) -> Self {
        Self {
            driver,
            inner,
            step,
            d_rng: rng.lane(LANE_SUBORDINATOR),
            x_rng: rng.lane(LANE_DRIVER),
            lattice_index: 0,
            d_value: 0.0,
            clock: 0.0,
            x: 0.0,
            last_t: 0.0,
        }
    }

    /// `(E(t), Z(t))`; `t` must not decrease between calls.
    pub fn advance_to(&mut self, t: f64) -> Result<(f64, f64)> {
        if t < self.last_t {
            return Err(Error::InvalidParameter(format!("time {t} before {}", self.last_t)));
        }
        self.last_t = t;
        if t == 0.0 {
            return Ok((0.0, 0.0));
        }
        while self.d_value <= t {
            if self.lattice_index >= MAX_LATTICE_STEPS {
                return Err(Error::NoConvergence(format!("subordinator stayed below {t}")));
            }
            self.d_value += sample_subordinator_increment(self.inner, self.step, &mut self.d_rng);
            self.lattice_index += 1;
        }
        let e = self.lattice_index as f64 * self.step;
        if e > self.clock {
            self.x += sample_stable(self.driver, e - self.clock, &mut self.x_rng);
            self.clock = e;
        }
        Ok((e, self.x))
    }
}

/// `Z` at arbitrary increasing times (starting at 0) without storing `D`.
pub fn sample_z_at(
    driver: &StableParams,
    inner: &SubordinatorParams,
    times: &[f64],
    step: f64,
    rng: RngStream,
) -> Result<GridPath> {
    if !(step > 0.0) {
        return Err(Error::InvalidParameter(format!("intrinsic step {step}")));
    }
    let mut walker = ZWalker::new(driver, inner, step, rng);
    let values = times
        .iter()
        .map(|&t| walker.advance_to(t).map(|(_, z)| z))
        .collect::<Result<Vec<_>>>()?;
    GridPath::new(PathKind::PiecewiseLinear, times.to_vec(), values)
}

/// One draw of `D(sigma(t))`, where `sigma` has Laplace exponent
/// `(s / c1)^(1/alpha)` and `D` has exponent `s^beta`.
pub fn bochner_sample<R: Rng + ?Sized>(beta: f64, alpha: f64, chi: f64, t: f64, rng: &mut R) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::DomainError(format!("t = {t} must be >= 0")));
    }
    let ladder = SubordinatorParams::new(1.0 / alpha.min(2.0), c1(alpha, chi)?.powf(-1.0 / alpha))
        .map_err(|_| Error::DomainError(format!("alpha = {alpha} outside (1, 2]")))?;
    let inner = SubordinatorParams::standard(beta)?;
    let sigma = sample_subordinator_increment(&ladder, t, rng);
    Ok(sample_subordinator_increment(&inner, sigma, rng))
}

/// `D o sigma` at the given increasing times (starting at 0), from independent increments.
pub fn bochner_path<R: Rng + ?Sized>(beta: f64, alpha: f64, chi: f64, times: &[f64], rng: &mut R) -> Result<GridPath> {
    let mut level = 0.0;
    let mut prev = 0.0;
    let mut values = Vec::with_capacity(times.len());
    for &t in times {
        level += bochner_sample(beta, alpha, chi, t - prev, rng)?;
        prev = t;
        values.push(level);
    }
    GridPath::new(PathKind::RightContinuousStep, times.to_vec(), values)
}

/// `(beta, rho)` with `L(t) = E(rho t)` for the local time at zero of `y`.
pub fn local_time_clock(y: &StableParams) -> Result<(f64, f64)> {
    let gamma_index = y.alpha();
    if !(gamma_index > 1.0) {
        return Err(Error::DomainError(format!("gamma = {gamma_index} outside (1, 2]")));
    }
    let rho = stone_rho(gamma_index, y.chi(), y.nu())?;
    Ok((1.0 - 1.0 / gamma_index, rho))
}

/// Brownian local time at zero, realized as the running maximum of an
/// independent standard Brownian path (Levy's identity).
pub fn levy_local_time_oracle<R: Rng + ?Sized>(horizon: f64, n: usize, rng: &mut R) -> Result<GridPath> {
    let times = uniform_grid(horizon, n)?;
    let mut w = 0.0;
    let mut best: f64 = 0.0;
    let mut values = Vec::with_capacity(n);
    values.push(0.0);
    for pair in times.windows(2) {
        let z: f64 = rng.sample(StandardNormal);
        w += (pair[1] - pair[0]).sqrt() * z;
        best = best.max(w);
        values.push(best);
    }
    GridPath::new(PathKind::PiecewiseLinear, times, values)
}
