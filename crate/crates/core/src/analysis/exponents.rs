//! Time exponents of the linear estimates, evaluated either in `f64` or
//! exactly in rationals from one set of formulas.

use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::hankel::{KernelKind, Zone};
use crate::model::{ModelParams, NormSetup, Regime};
use crate::rational::Rational;

use super::AnalysisError;

/// Arithmetic needed by the exponent formulas.
pub trait Scalar:
    Copy
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn int(value: i128) -> Self;
}

impl Scalar for f64 {
    fn int(value: i128) -> Self {
        value as f64
    }
}

impl Scalar for Rational {
    fn int(value: i128) -> Self {
        Rational::int(value)
    }
}

/// Which estimate of the linear theory an exponent belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateId {
    /// `L¹` norm of the low-frequency kernel.
    L1Low,
    /// `L¹` norm of the high-frequency kernel (`δ < σ`).
    L1High,
    /// `L¹` norm of the full kernel (`δ < σ`).
    L1All,
    LinfLow,
    LinfHigh,
    LinfAll,
    /// `L^r` norm of the low-frequency kernel.
    LrLow,
    /// `L^r` norm of the full kernel (`δ < σ`).
    LrAll,
    /// `L^p - L^q` estimate for the solution, `1 + 1/q = 1/r + 1/p`.
    LpLq,
    /// `(L^m ∩ L^q) - L^q` estimate, stated in powers of `1 + t`.
    Combined,
    /// High-frequency `L^q - L^q` estimate for `δ = σ`, exponential in `t`.
    ViscoHigh,
}

impl EstimateId {
    pub fn l1_for_zone(zone: Zone) -> Self {
        match zone {
            Zone::Low => Self::L1Low,
            Zone::High => Self::L1High,
            Zone::All => Self::L1All,
        }
    }

    pub fn linf_for_zone(zone: Zone) -> Self {
        match zone {
            Zone::Low => Self::LinfLow,
            Zone::High => Self::LinfHigh,
            Zone::All => Self::LinfAll,
        }
    }

    fn needs_r(self) -> bool {
        matches!(self, Self::LrLow | Self::LrAll | Self::LpLq | Self::Combined)
    }

    fn is_kernel_norm(self) -> bool {
        !matches!(self, Self::LpLq | Self::Combined | Self::ViscoHigh)
    }

    fn structural_only(self) -> bool {
        matches!(
            self,
            Self::L1High | Self::L1All | Self::LinfHigh | Self::LinfAll | Self::LrAll
        )
    }
}

/// Data slot the estimate is taken from: `u₀` (kernel `K₀`) or `u₁` (`K₁`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    U0,
    U1,
}

impl From<KernelKind> for Source {
    fn from(kind: KernelKind) -> Self {
        match kind {
            KernelKind::K0 => Source::U0,
            KernelKind::K1 => Source::U1,
        }
    }
}

/// Estimated quantity: `|D|^a u` or `|D|^a u_t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    U,
    Ut,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeRegime {
    /// `t ∈ (0, 1]`
    SmallT,
    /// `t ≥ 1`
    LargeT,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EstimateSpec {
    pub estimate_id: EstimateId,
    pub source: Source,
    pub target: Target,
    pub time_regime: TimeRegime,
}

impl EstimateSpec {
    pub fn kernel(estimate_id: EstimateId, kind: KernelKind, time_regime: TimeRegime) -> Self {
        Self {
            estimate_id,
            source: kind.into(),
            target: Target::U,
            time_regime,
        }
    }

    pub fn solution(estimate_id: EstimateId, source: Source, target: Target, time_regime: TimeRegime) -> Self {
        Self {
            estimate_id,
            source,
            target,
            time_regime,
        }
    }
}

/// Envelope exponent: `t^e` (or `(1+t)^e`), or `e^{-ct}` for the
/// visco-elastic high-frequency part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exponent<T> {
    Power(T),
    ExponentialDecay,
}

impl<T: Copy> Exponent<T> {
    pub fn power(&self) -> Option<T> {
        match self {
            Exponent::Power(e) => Some(*e),
            Exponent::ExponentialDecay => None,
        }
    }
}

/// Model data entering the formulas.
#[derive(Debug, Clone, Copy)]
pub struct ExponentInputs<T> {
    pub sigma: T,
    pub delta: T,
    pub n: u32,
    /// `1/r`; only read by the `L^r`, `L^p - L^q` and combined estimates.
    pub inv_r: Option<T>,
    /// Derivative order `a ≥ 0`.
    pub a: T,
    pub visco: bool,
}

/// Exponent of the envelope for `spec`.
pub fn exponent_formula<T: Scalar>(spec: &EstimateSpec, x: &ExponentInputs<T>) -> Result<Exponent<T>, AnalysisError> {
    use EstimateId::*;
    use Source::*;
    use Target::*;
    use TimeRegime::*;

    let id = spec.estimate_id;
    if x.visco && id.structural_only() {
        return Err(AnalysisError::ViscoElasticUnsupported(id));
    }
    if id == ViscoHigh {
        if !x.visco {
            return Err(AnalysisError::RequiresViscoElastic);
        }
        return Ok(Exponent::ExponentialDecay);
    }
    if id.is_kernel_norm() && spec.target == Ut {
        return Err(AnalysisError::TargetUnsupported(id));
    }

    let one = T::int(1);
    let two = T::int(2);
    let n = T::int(x.n as i128);
    let h = T::int((x.n / 2) as i128);
    let gap = one - x.sigma / (two * x.delta);
    let low_scale = two * x.delta;
    let high_scale = two * (x.sigma - x.delta);
    let a = x.a;
    let inv_r = if id.needs_r() {
        x.inv_r.ok_or(AnalysisError::MissingR(id))?
    } else {
        one
    };
    let dispersion = n / low_scale * (one - inv_r);
    let high_dispersion = || n / high_scale * (one - inv_r);

    // Large-time low-frequency L^r exponents; r = 1 and r = ∞ are read off these.
    let lr_low = |source: Source, inv_r: T| match source {
        U0 => (two + h) * gap * inv_r - n / low_scale * (one - inv_r) - a / low_scale,
        U1 => one + (one + h) * gap * inv_r - n / low_scale * (one - inv_r) - a / low_scale,
    };
    let small_low = |source: Source| match source {
        U0 => T::int(0),
        U1 => one,
    };

    let e = match (id, spec.source, spec.time_regime) {
        (L1Low, s, SmallT) | (LinfLow, s, SmallT) | (LrLow, s, SmallT) => small_low(s),
        (L1Low, s, LargeT) => lr_low(s, one),
        (LinfLow, s, LargeT) => lr_low(s, T::int(0)),
        (LrLow, s, LargeT) => lr_low(s, inv_r),

        (L1High, U0, SmallT) => -a / high_scale,
        (L1High, U0, LargeT) => -a / low_scale,
        (L1High, U1, SmallT) => one - a / low_scale,
        (L1High, U1, LargeT) => one - a / high_scale,
        (L1All, U0, SmallT) => -a / high_scale,
        (L1All, U1, SmallT) => one - a / low_scale,
        (L1All, s, LargeT) => lr_low(s, one),

        (LinfHigh, U0, _) => -(n + a) / high_scale,
        (LinfHigh, U1, _) => one - (n + a) / high_scale,
        (LinfAll, U0, SmallT) => -(n + a) / high_scale,
        (LinfAll, U1, SmallT) => one - (n + a) / high_scale,
        (LinfAll, s, LargeT) => lr_low(s, T::int(0)),

        (LrAll, U0, SmallT) => -high_dispersion() - a / high_scale,
        (LrAll, U1, SmallT) => one - high_dispersion() - a / high_scale,
        (LrAll, s, LargeT) => lr_low(s, inv_r),

        (LpLq, s, SmallT) if x.visco => match spec.target {
            U => small_low(s),
            Ut => T::int(0),
        },
        (LpLq, s, SmallT) => {
            let base = match s {
                U0 => T::int(0),
                U1 => one,
            };
            match spec.target {
                U => base - high_dispersion() - a / high_scale,
                Ut => base - high_dispersion() - (a + two * x.delta) / high_scale,
            }
        }
        (LpLq, s, LargeT) | (Combined, s, _) => match (spec.target, s) {
            (U, U0) => (two + h) * gap * inv_r - dispersion - a / low_scale,
            (U, U1) => one + (one + h) * gap * inv_r - dispersion - a / low_scale,
            (Ut, U0) => (one + h) * gap * inv_r - dispersion - (a + high_scale) / low_scale,
            (Ut, U1) => (two + h) * gap * inv_r - dispersion - a / low_scale,
        },
        (ViscoHigh, _, _) => unreachable!("handled above"),
    };
    Ok(Exponent::Power(e))
}

/// Floating-point exponent. `setup` supplies `1/r` where the estimate needs it.
pub fn theoretical_exponent(
    spec: &EstimateSpec,
    params: &ModelParams,
    setup: Option<&NormSetup>,
    a: f64,
) -> Result<Exponent<f64>, AnalysisError> {
    if !(a >= 0.0) || !a.is_finite() {
        return Err(AnalysisError::BadOrder(a));
    }
    let inputs = ExponentInputs {
        sigma: params.sigma,
        delta: params.delta,
        n: params.n,
        inv_r: setup.map(|s| s.inv_r.to_f64()),
        a,
        visco: params.regime() == Regime::ViscoElastic,
    };
    exponent_formula(spec, &inputs)
}

/// Exact exponent; `params` must carry rational `σ, δ`.
pub fn theoretical_exponent_exact(
    spec: &EstimateSpec,
    params: &ModelParams,
    inv_r: Option<Rational>,
    a: Rational,
) -> Result<Exponent<Rational>, AnalysisError> {
    if a < Rational::ZERO {
        return Err(AnalysisError::BadOrder(a.to_f64()));
    }
    let e = params.exact_params()?;
    let inputs = ExponentInputs {
        sigma: e.sigma,
        delta: e.delta,
        n: params.n,
        inv_r,
        a,
        visco: e.sigma == e.delta,
    };
    exponent_formula(spec, &inputs)
}
