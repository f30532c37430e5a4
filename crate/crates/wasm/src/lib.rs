//! Browser bindings for the demo page in `www/`.

use wasm_bindgen::prelude::*;

use invsub::mittag_leffler::{ml_neg, MLConfig};
use invsub::path::{compose_z, CompositionSpec};
use invsub::rng::RngStream;
use invsub::smallball::{smallball_z_series_scaled, SmallBallSeriesConfig};
use invsub::stable::{StableParams, SubordinatorParams};

fn js_err(e: invsub::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// `[z0, v0, z1, v1, ...]` for `E_beta(-z)` on `n` points of `[0, z_max]`.
#[wasm_bindgen]
pub fn ml_curve(beta: f64, z_max: f64, n: usize) -> Result<Vec<f64>, JsError> {
    let cfg = MLConfig::default();
    let mut out = Vec::with_capacity(2 * n);
    for z in linspace(0.0, z_max, n) {
        out.push(z);
        out.push(ml_neg(beta, z, &cfg).map_err(js_err)?);
    }
    Ok(out)
}

/// `[u0, p0, u1, p1, ...]` for `P(sup_[0,1] |B(E)| <= u)`, `B` with scale `chi`.
#[wasm_bindgen]
pub fn smallball_curve(beta: f64, chi: f64, u_max: f64, n: usize) -> Result<Vec<f64>, JsError> {
    let cfg = SmallBallSeriesConfig::default();
    let mut out = Vec::with_capacity(2 * n);
    for u in linspace(u_max / n.max(2) as f64, u_max, n) {
        out.push(u);
        out.push(smallball_z_series_scaled(beta, u, chi, &cfg).map_err(js_err)?);
    }
    Ok(out)
}

/// `[t0, e0, z0, t1, e1, z1, ...]` for one path of `(E, Z)` on `[0, horizon]`.
#[wasm_bindgen]
pub fn sample_z_path(
    alpha: f64,
    beta: f64,
    chi: f64,
    horizon: f64,
    grid: usize,
    seed: u64,
) -> Result<Vec<f64>, JsError> {
    let driver = StableParams::new(alpha, 0.0, chi).map_err(js_err)?;
    let spec = CompositionSpec::new(driver, SubordinatorParams::standard(beta).map_err(js_err)?, horizon, grid + 1)
        .map_err(js_err)?;
    let c = compose_z(&spec, RngStream::for_path(seed, 0)).map_err(js_err)?;
    let mut out = Vec::with_capacity(3 * c.z.len());
    for ((t, e), z) in c.z.times().iter().zip(c.e.values()).zip(c.z.values()) {
        out.extend_from_slice(&[*t, *e, *z]);
    }
    Ok(out)
}
