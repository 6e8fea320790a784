//! Model parameters `(σ, δ, μ, n)`, norm exponents `(q, m, r)` and the
//! composite constants κ₁, κ₂.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("sigma must satisfy sigma >= 1 (got {0})")]
    SigmaTooSmall(f64),
    #[error("delta must satisfy sigma/2 < delta <= sigma (got sigma = {sigma}, delta = {delta})")]
    DeltaOutOfRange { sigma: f64, delta: f64 },
    #[error("mu must be positive (got {0})")]
    MuNotPositive(f64),
    #[error("dimension n must be at least 1")]
    ZeroDimension,
    #[error("exact rational parameters are required for this evaluation")]
    ExactRequired,
    #[error("q must lie in (1, inf) (got {0})")]
    QOutOfRange(Rational),
    #[error("m must satisfy 1 <= m < q (got m = {m}, q = {q})")]
    MOutOfRange { m: Rational, q: Rational },
}

/// Damping regime selected by `δ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `δ ∈ (σ/2, σ)`
    Structural,
    /// `δ = σ`
    ViscoElastic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactParams {
    pub sigma: Rational,
    pub delta: Rational,
    pub mu: Rational,
}

/// Parameters of `u_tt + (-Δ)^σ u + μ(-Δ)^δ u_t = 0` in `R^n`.
///
/// Floating-point values are always present for the numerics; the exact
/// rational form is kept when the parameters were given exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub sigma: f64,
    pub delta: f64,
    pub mu: f64,
    pub n: u32,
    exact: Option<ExactParams>,
}

/// Relative tolerance under which floating `δ` is considered equal to `σ`.
pub const REGIME_TOLERANCE: f64 = 1e-12;

impl ModelParams {
    pub fn new(sigma: f64, delta: f64, mu: f64, n: u32) -> Result<Self, ModelError> {
        validate(sigma, delta, mu, n)?;
        Ok(Self {
            sigma,
            delta,
            mu,
            n,
            exact: None,
        })
    }

    /// Exact parameters with `μ = 1`.
    pub fn exact(sigma: Rational, delta: Rational, n: u32) -> Result<Self, ModelError> {
        Self::exact_with_mu(sigma, delta, Rational::ONE, n)
    }

    pub fn exact_with_mu(sigma: Rational, delta: Rational, mu: Rational, n: u32) -> Result<Self, ModelError> {
        if sigma < Rational::ONE {
            return Err(ModelError::SigmaTooSmall(sigma.to_f64()));
        }
        if delta * 2 <= sigma || delta > sigma {
            return Err(ModelError::DeltaOutOfRange {
                sigma: sigma.to_f64(),
                delta: delta.to_f64(),
            });
        }
        if !mu.is_positive() {
            return Err(ModelError::MuNotPositive(mu.to_f64()));
        }
        if n == 0 {
            return Err(ModelError::ZeroDimension);
        }
        Ok(Self {
            sigma: sigma.to_f64(),
            delta: delta.to_f64(),
            mu: mu.to_f64(),
            n,
            exact: Some(ExactParams { sigma, delta, mu }),
        })
    }

    pub fn exact_params(&self) -> Result<ExactParams, ModelError> {
        self.exact.ok_or(ModelError::ExactRequired)
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn regime(&self) -> Regime {
        let visco = match self.exact {
            Some(e) => e.delta == e.sigma,
            None => (self.sigma - self.delta).abs() <= REGIME_TOLERANCE * self.sigma,
        };
        if visco {
            Regime::ViscoElastic
        } else {
            Regime::Structural
        }
    }

    /// `⌊n/2⌋`
    pub fn half_dim(&self) -> u32 {
        self.n / 2
    }
}

fn validate(sigma: f64, delta: f64, mu: f64, n: u32) -> Result<(), ModelError> {
    if !(sigma >= 1.0) || !sigma.is_finite() {
        return Err(ModelError::SigmaTooSmall(sigma));
    }
    let tol = REGIME_TOLERANCE * sigma;
    if !(delta > sigma / 2.0) || delta > sigma + tol || !delta.is_finite() {
        return Err(ModelError::DeltaOutOfRange { sigma, delta });
    }
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(ModelError::MuNotPositive(mu));
    }
    if n == 0 {
        return Err(ModelError::ZeroDimension);
    }
    Ok(())
}

/// Lebesgue exponents `q`, `m` and the derived `r` with `1 + 1/q = 1/r + 1/m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NormSetup {
    pub q: Rational,
    pub m: Rational,
    /// `1/r = 1 + 1/q - 1/m`, stored as the reciprocal so that `r = ∞` is representable.
    pub inv_r: Rational,
}

impl NormSetup {
    /// Mixed `(L^m ∩ L^q) - L^q` setup, `q ∈ (1, ∞)`, `m ∈ [1, q)`.
    pub fn new(q: Rational, m: Rational) -> Result<Self, ModelError> {
        if q <= Rational::ONE {
            return Err(ModelError::QOutOfRange(q));
        }
        if m < Rational::ONE || m >= q {
            return Err(ModelError::MOutOfRange { m, q });
        }
        Ok(Self::unchecked(q, m))
    }

    /// The `L^q - L^q` case `m = q` (so `r = 1`). Used by the linear decay
    /// harness; the theorem conditions require `m < q` and reject it.
    pub fn lq_lq(q: Rational) -> Result<Self, ModelError> {
        if q <= Rational::ONE {
            return Err(ModelError::QOutOfRange(q));
        }
        Ok(Self::unchecked(q, q))
    }

    fn unchecked(q: Rational, m: Rational) -> Self {
        let inv_r = Rational::ONE + q.recip() - m.recip();
        Self { q, m, inv_r }
    }

    pub fn is_mixed(&self) -> bool {
        self.m < self.q
    }

    pub fn r(&self) -> Option<Rational> {
        if self.inv_r.is_zero() {
            None
        } else {
            Some(self.inv_r.recip())
        }
    }
}

fn dimension_factor(params: &ModelParams, setup: &NormSetup) -> Result<Rational, ModelError> {
    if !setup.is_mixed() {
        return Err(ModelError::MOutOfRange { m: setup.m, q: setup.q });
    }
    let e = params.exact_params()?;
    let gap = Rational::ONE - e.sigma / (e.delta * 2);
    Ok(gap * setup.inv_r)
}

/// `κ₁ = 1 + (1 + ⌊n/2⌋)(1 - σ/(2δ))(1 + 1/q - 1/m)`
pub fn kappa1(params: &ModelParams, setup: &NormSetup) -> Result<Rational, ModelError> {
    let f = dimension_factor(params, setup)?;
    Ok(Rational::ONE + f * (1 + params.half_dim() as i128))
}

/// `κ₂ = (2 + ⌊n/2⌋)(1 - σ/(2δ))(1 + 1/q - 1/m)`
pub fn kappa2(params: &ModelParams, setup: &NormSetup) -> Result<Rational, ModelError> {
    let f = dimension_factor(params, setup)?;
    Ok(f * (2 + params.half_dim() as i128))
}

/// `[s]^+ = max{s, 0}`
pub fn positive_part(s: f64) -> f64 {
    s.max(0.0)
}

pub fn positive_part_exact(s: Rational) -> Rational {
    s.max(Rational::ZERO)
}

/// `⌈s⌉ = min{k ∈ Z : k ≥ s}`
pub fn ceil_min_int(s: f64) -> i64 {
    s.ceil() as i64
}

pub fn ceil_min_int_exact(s: Rational) -> i128 {
    s.ceil()
}
