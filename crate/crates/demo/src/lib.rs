//! Browser bindings for three operations of `sigma-evolve`. Every entry point
//! returns a JSON string; the plain-Rust versions are what the native tests call.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use serde_json::json;
use wasm_bindgen::prelude::*;

use sigma_evolve::admissibility::{admissible_p, TheoremId};
use sigma_evolve::propagator::{evolve_linear, lq_norm, Grid, SpectralField, StatePair};
use sigma_evolve::symbols::{multiplier_envelope, multipliers};
use sigma_evolve::{ModelParams, NormSetup, Rational};

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn rational(s: &str) -> Result<Rational, String> {
    s.trim().parse::<Rational>().map_err(|e| format!("{s:?}: {e}"))
}

/// `K̂₀`, `K̂₁` and their envelopes (where asserted) on `count` points of `[0, xi_max]`.
pub fn multiplier_curves_json(sigma: f64, delta: f64, t: f64, xi_max: f64, count: usize) -> Result<String, String> {
    let params = ModelParams::new(sigma, delta, 1.0, 1).map_err(err)?;
    if count < 2 || !(xi_max > 0.0) {
        return Err("need count >= 2 and xi_max > 0".into());
    }
    let mut xi = Vec::with_capacity(count);
    let (mut k0, mut k1) = (Vec::with_capacity(count), Vec::with_capacity(count));
    let (mut env0, mut env1) = (Vec::with_capacity(count), Vec::with_capacity(count));
    for k in 0..count {
        let x = xi_max * k as f64 / (count - 1) as f64;
        let m = multipliers(&params, t, x).map_err(err)?;
        // the envelope is not asserted in the middle zone
        let env = multiplier_envelope(&params, t, x).ok();
        xi.push(x);
        k0.push(m.k0);
        k1.push(m.k1);
        env0.push(env.map(|e| e.0));
        env1.push(env.map(|e| e.1));
    }
    Ok(json!({"xi": xi, "k0": k0, "k1": k1, "envelope_k0": env0, "envelope_k1": env1}).to_string())
}

/// 1D linear evolution of `u₀ = a₀G`, `u₁ = a₁G` (unit-width Gaussian) on `L = 80`.
pub fn evolve_gaussian_json(sigma: f64, delta: f64, a0: f64, a1: f64, t: f64, points: usize) -> Result<String, String> {
    let params = ModelParams::new(sigma, delta, 1.0, 1).map_err(err)?;
    let grid = Grid::new(1, points, 80.0).map_err(err)?;
    let g = SpectralField::gaussian(grid, 1.0, 1.0);
    let data = StatePair::new(g.scaled(a0), g.scaled(a1), 0.0).map_err(err)?;
    let state = evolve_linear(&params, &data, t).map_err(err)?;
    let x: Vec<f64> = (0..grid.len()).map(|i| grid.coordinates(i)[0]).collect();
    Ok(json!({
        "x": x,
        "u0": data.u.values(),
        "u": state.u.values(),
        "ut": state.ut.values(),
        "l2_u": lq_norm(&state.u, 2.0).map_err(err)?,
        "l2_ut": lq_norm(&state.ut, 2.0).map_err(err)?,
    })
    .to_string())
}

/// Exact admissible range of `p`; rationals are strings such as `"9/5"`, `s` may be empty.
pub fn admissible_p_json(
    theorem: &str,
    sigma: &str,
    delta: &str,
    n: u32,
    q: &str,
    m: &str,
    s: &str,
) -> Result<String, String> {
    let theorem: TheoremId = theorem.parse().map_err(err)?;
    let params = ModelParams::exact(rational(sigma)?, rational(delta)?, n).map_err(err)?;
    let setup = NormSetup::new(rational(q)?, rational(m)?).map_err(err)?;
    let s = if s.trim().is_empty() { None } else { Some(rational(s)?) };
    let report = admissible_p(theorem, &params, &setup, s).map_err(err)?;
    serde_json::to_string(&report).map_err(err)
}

#[wasm_bindgen]
pub fn multiplier_curves(sigma: f64, delta: f64, t: f64, xi_max: f64, count: usize) -> Result<String, JsValue> {
    multiplier_curves_json(sigma, delta, t, xi_max, count).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn evolve_gaussian(sigma: f64, delta: f64, a0: f64, a1: f64, t: f64, points: usize) -> Result<String, JsValue> {
    evolve_gaussian_json(sigma, delta, a0, a1, t, points).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn admissible_range(
    theorem: &str,
    sigma: &str,
    delta: &str,
    n: u32,
    q: &str,
    m: &str,
    s: &str,
) -> Result<String, JsValue> {
    admissible_p_json(theorem, sigma, delta, n, q, m, s).map_err(|e| JsValue::from_str(&e))
}
