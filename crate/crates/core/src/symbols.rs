//! Characteristic roots of `λ² + |ξ|^{2δ}λ + |ξ|^{2σ} = 0` and the Fourier
//! multipliers `K̂₀`, `K̂₁` that propagate position and velocity data.
//!
//! The multipliers are evaluated through the mean `m = (λ₁+λ₂)/2` and the
//! half-difference `d = (λ₁-λ₂)/2`:
//!
//! ```text
//! K̂₀ = e^{mt} (cosh(dt) - m t sinh(dt)/(dt)),   K̂₁ = e^{mt} t sinh(dt)/(dt)
//! ```
//!
//! which is real for both real and purely imaginary `d` and reduces to the
//! double-root formulas `(1 - λt)e^{λt}`, `t e^{λt}` when `d = 0`. Away from
//! the coalescing locus the real-root branch switches to the two-exponential
//! form with `λ₁ = |ξ|^{2σ}/λ₂`, which stays accurate at large `|ξ|`.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::model::ModelParams;

/// Discriminants with `|Δ| ≤ COALESCENCE_TOL · |ξ|^{4δ}` are reported as a double root.
pub const COALESCENCE_TOL: f64 = 1e-9;

/// Constant `c` in the exponential envelopes.
pub const ENVELOPE_RATE: f64 = 0.25;

/// Prefactor on the `K̂₀` envelope. `|K̂₀| ≤ 1` always holds (mode energy is
/// non-increasing), so the envelope is capped at 1.
pub const ENVELOPE_K0_PREFACTOR: f64 = 2.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymbolError {
    #[error("symbols are normalized to mu = 1 (got mu = {0})")]
    MuNotNormalized(f64),
    #[error("|xi| must be a finite non-negative number (got {0})")]
    BadFrequency(f64),
    #[error("t must be a finite non-negative number (got {0})")]
    BadTime(f64),
    #[error("|xi| = {0} lies in the middle zone (1/2, 2) where no envelope is asserted")]
    MidZone(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharRoots {
    pub lambda1: Complex64,
    pub lambda2: Complex64,
    /// `|ξ|^{4δ} - 4|ξ|^{2σ}`
    pub discriminant: f64,
    pub coalesced: bool,
}

/// `K̂₀`, `K̂₁` and their time derivatives at one `(t, |ξ|)`. The multipliers
/// are real, so they are stored as `f64`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MultiplierValue {
    pub k0: f64,
    pub k1: f64,
    pub dt_k0: f64,
    pub dt_k1: f64,
}

impl MultiplierValue {
    pub const IDENTITY: MultiplierValue = MultiplierValue {
        k0: 1.0,
        k1: 0.0,
        dt_k0: 0.0,
        dt_k1: 1.0,
    };
}

fn check_inputs(params: &ModelParams, xi_abs: f64) -> Result<(), SymbolError> {
    if params.mu != 1.0 {
        return Err(SymbolError::MuNotNormalized(params.mu));
    }
    if !(xi_abs >= 0.0) || !xi_abs.is_finite() {
        return Err(SymbolError::BadFrequency(xi_abs));
    }
    Ok(())
}

/// `(|ξ|^{2δ}, |ξ|^{2σ}, Δ/|ξ|^{4δ})`; the relative discriminant
/// `1 - 4|ξ|^{2σ-4δ}` is formed without squaring large powers.
fn powers(params: &ModelParams, xi_abs: f64) -> (f64, f64, f64) {
    let damping = xi_abs.powf(2.0 * params.delta);
    let elastic = xi_abs.powf(2.0 * params.sigma);
    let rel = 1.0 - 4.0 * xi_abs.powf(2.0 * params.sigma - 4.0 * params.delta);
    (damping, elastic, rel)
}

pub fn characteristic_roots(params: &ModelParams, xi_abs: f64) -> Result<CharRoots, SymbolError> {
    check_inputs(params, xi_abs)?;
    if xi_abs == 0.0 {
        return Ok(CharRoots {
            lambda1: Complex64::new(0.0, 0.0),
            lambda2: Complex64::new(0.0, 0.0),
            discriminant: 0.0,
            coalesced: true,
        });
    }
    let (damping, elastic, rel) = powers(params, xi_abs);
    let discriminant = rel * damping * damping;
    let half = -0.5 * damping;
    if rel.abs() <= COALESCENCE_TOL {
        let l = Complex64::new(half, 0.0);
        return Ok(CharRoots {
            lambda1: l,
            lambda2: l,
            discriminant,
            coalesced: true,
        });
    }
    let (lambda1, lambda2) = if rel > 0.0 {
        let lambda2 = half - 0.5 * damping * rel.sqrt();
        (Complex64::new(elastic / lambda2, 0.0), Complex64::new(lambda2, 0.0))
    } else {
        let im = 0.5 * damping * (-rel).sqrt();
        (Complex64::new(half, im), Complex64::new(half, -im))
    };
    Ok(CharRoots {
        lambda1,
        lambda2,
        discriminant,
        coalesced: false,
    })
}

/// `sin(x)/x`
pub(crate) fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// `sinh(x)/x`
pub(crate) fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 + x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sinh() / x
    }
}

pub fn multipliers(params: &ModelParams, t: f64, xi_abs: f64) -> Result<MultiplierValue, SymbolError> {
    check_inputs(params, xi_abs)?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(SymbolError::BadTime(t));
    }
    Ok(multipliers_unchecked(params, t, xi_abs))
}

/// Hot-loop variant without argument validation; `μ = 1` is assumed.
pub(crate) fn multipliers_unchecked(params: &ModelParams, t: f64, xi_abs: f64) -> MultiplierValue {
    if t == 0.0 {
        return MultiplierValue::IDENTITY;
    }
    if xi_abs == 0.0 {
        return MultiplierValue {
            k0: 1.0,
            k1: t,
            dt_k0: 0.0,
            dt_k1: 1.0,
        };
    }
    let (damping, elastic, rel) = powers(params, xi_abs);
    let mean = -0.5 * damping;
    let (k0, k1) = if rel <= 0.0 {
        let omega = 0.5 * damping * (-rel).sqrt();
        let decay = (mean * t).exp();
        let s = sinc(omega * t);
        (decay * ((omega * t).cos() - mean * t * s), decay * t * s)
    } else {
        let half_diff = 0.5 * damping * rel.sqrt();
        if half_diff * t < 0.5 {
            let decay = (mean * t).exp();
            let s = sinhc(half_diff * t);
            (decay * ((half_diff * t).cosh() - mean * t * s), decay * t * s)
        } else {
            let lambda2 = mean - half_diff;
            let lambda1 = elastic / lambda2;
            let e1 = (lambda1 * t).exp();
            let e2 = (lambda2 * t).exp();
            let gap = lambda1 - lambda2;
            ((lambda1 * e2 - lambda2 * e1) / gap, (e1 - e2) / gap)
        }
    };
    MultiplierValue {
        k0,
        k1,
        dt_k0: -elastic * k1,
        dt_k1: k0 - damping * k1,
    }
}

/// Analytic envelopes `(bound on |K̂₀|, bound on |K̂₁|)` in the small
/// (`|ξ| ≤ 1/2`) and large (`|ξ| ≥ 2`) frequency zones.
pub fn multiplier_envelope(params: &ModelParams, t: f64, xi_abs: f64) -> Result<(f64, f64), SymbolError> {
    check_inputs(params, xi_abs)?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(SymbolError::BadTime(t));
    }
    let exponent = if xi_abs <= 0.5 {
        2.0 * params.delta
    } else if xi_abs >= 2.0 {
        2.0 * (params.sigma - params.delta)
    } else {
        return Err(SymbolError::MidZone(xi_abs));
    };
    let weight = if xi_abs == 0.0 { 0.0 } else { xi_abs.powf(exponent) };
    let damped = (-ENVELOPE_RATE * weight * t).exp();
    Ok(((ENVELOPE_K0_PREFACTOR * damped).min(1.0), t * damped))
}
