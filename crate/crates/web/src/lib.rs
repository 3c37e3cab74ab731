//! wasm-bindgen entry points for the browser demo. Each operation returns
//! a flat `Float64Array`; the plain functions behind them are testable
//! natively.

// `!(x > y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use nullflow::kdvsol::StationaryBending;
use nullflow::lame::{floquet_search, tau, FloquetRatio, LameConfig, LameMethod};
use nullflow::nullcurve::{constant_bending_frames, stationary_curve, torical_embed, ConstantCase};
use nullflow::ode::OdeConfig;
use nullflow::EllipticParameter;
use wasm_bindgen::prelude::*;

/// Most samples one call may return.
pub const MAX_SAMPLES: usize = 20_000;

fn samples(n: usize) -> Result<usize, String> {
    if (2..=MAX_SAMPLES).contains(&n) {
        Ok(n)
    } else {
        Err(format!("sample count must lie in [2, {MAX_SAMPLES}]"))
    }
}

fn parameter(mu: f64) -> Result<EllipticParameter, String> {
    EllipticParameter::new(mu).map_err(|e| e.to_string())
}

/// (h, tau(h)) pairs on [h_min, h_max].
pub fn tau_samples(mu: f64, h_min: f64, h_max: f64, n: usize) -> Result<Vec<f64>, String> {
    let n = samples(n)?;
    let m = parameter(mu)?;
    if !(h_max > h_min) {
        return Err("need h_max > h_min".into());
    }
    let mut out = Vec::with_capacity(2 * n);
    for i in 0..n {
        let h = h_min + (h_max - h_min) * i as f64 / (n - 1) as f64;
        out.push(h);
        out.push(tau(m, h).map_err(|e| e.to_string())?);
    }
    Ok(out)
}

/// Torical (x, y, z) triples of the constant-bending curve on [0, s_span].
pub fn constant_points(kappa: f64, s_span: f64, n: usize) -> Result<Vec<f64>, String> {
    let n = samples(n)?;
    if !(kappa.is_finite() && s_span.is_finite() && s_span > 0.0) {
        return Err("need finite kappa and positive span".into());
    }
    Ok((0..n)
        .flat_map(|i| {
            let (p, m) = constant_bending_frames(kappa, s_span * i as f64 / (n - 1) as f64);
            torical_embed(p * m.inverse())
        })
        .collect())
}

/// "(E,E)" and friends for a constant bending.
pub fn constant_case_tag(kappa: f64) -> String {
    let c = ConstantCase::of(kappa);
    format!("case {} {}", c.number(), c.tag())
}

/// [h+, h-, period, x0, y0, z0, ...]: the stationary curve built from the
/// first two eigenvalues with tau = cos(q pi), over `periods` periods.
pub fn stationary_points(mu: f64, q_num: u32, q_den: u32, periods: f64, n: usize) -> Result<Vec<f64>, String> {
    let n = samples(n)?;
    let m = parameter(mu)?;
    let q = FloquetRatio::new(q_num, q_den).map_err(|e| e.to_string())?;
    if !(periods > 0.0 && periods <= 64.0) {
        return Err("periods must lie in (0, 64]".into());
    }
    let cfg = LameConfig { scan_ceiling: 60.0, ..LameConfig::default() };
    let recs = floquet_search(m, q, 2, &cfg).map_err(|e| e.to_string())?;
    let b = StationaryBending::new(m, recs[0].h, recs[1].h).map_err(|e| e.to_string())?;
    let span = periods * b.period();
    let grid: Vec<f64> = (0..n).map(|i| span * i as f64 / (n - 1) as f64).collect();
    let path = stationary_curve(&b, &grid, LameMethod::Heun, &OdeConfig::default()).map_err(|e| e.to_string())?;
    let mut out = vec![b.h_plus(), b.h_minus(), b.period()];
    out.extend(path.f_plus.iter().zip(&path.f_minus).flat_map(|(p, q)| torical_embed(*p * q.inverse())));
    Ok(out)
}

fn js<T>(r: Result<T, String>) -> Result<T, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = tauCurve)]
pub fn tau_curve(mu: f64, h_min: f64, h_max: f64, n: usize) -> Result<Vec<f64>, JsError> {
    js(tau_samples(mu, h_min, h_max, n))
}

#[wasm_bindgen(js_name = constantCurve)]
pub fn constant_curve(kappa: f64, s_span: f64, n: usize) -> Result<Vec<f64>, JsError> {
    js(constant_points(kappa, s_span, n))
}

#[wasm_bindgen(js_name = constantCase)]
pub fn constant_case(kappa: f64) -> String {
    constant_case_tag(kappa)
}

#[wasm_bindgen(js_name = stationaryCurve)]
pub fn stationary_curve_js(mu: f64, q_num: u32, q_den: u32, periods: f64, n: usize) -> Result<Vec<f64>, JsError> {
    js(stationary_points(mu, q_num, q_den, periods, n))
}
