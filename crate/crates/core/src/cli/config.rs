//! JSON experiment configurations. Unknown keys are rejected everywhere.

use serde::{Deserialize, Serialize};

use crate::admissibility::TheoremId;
use crate::analysis::Target;
use crate::hankel::{KernelKind, Zone};
use crate::model::{ModelError, ModelParams};
use crate::propagator::{Grid, SpectralField, StatePair};
use crate::rational::Rational;
use crate::semilinear::StepControl;

fn one_u32() -> u32 {
    1
}

fn one() -> Rational {
    Rational::ONE
}

fn unit_width() -> f64 {
    1.0
}

/// `(σ, δ, μ, n)`; numbers may be JSON decimals or `"num/den"` strings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub sigma: Rational,
    pub delta: Rational,
    #[serde(default = "one_u32")]
    pub n: u32,
    #[serde(default = "one")]
    pub mu: Rational,
}

impl ParamsConfig {
    pub fn build(&self) -> Result<ModelParams, ModelError> {
        ModelParams::exact_with_mu(self.sigma, self.delta, self.mu, self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleRange {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

/// Explicit list of sample points or an evenly (or log-evenly) spaced range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Samples {
    List(Vec<f64>),
    Range(SampleRange),
}

impl Samples {
    pub fn values(&self) -> Result<Vec<f64>, String> {
        match self {
            Samples::List(v) => {
                if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
                    return Err("sample list must be non-empty and finite".into());
                }
                Ok(v.clone())
            }
            Samples::Range(r) => {
                if r.count == 0 || !r.start.is_finite() || !r.stop.is_finite() || r.stop < r.start {
                    return Err("sample range needs count >= 1 and start <= stop".into());
                }
                if r.count == 1 {
                    return Ok(vec![r.start]);
                }
                let last = (r.count - 1) as f64;
                match r.spacing {
                    Spacing::Linear => Ok((0..r.count)
                        .map(|k| r.start + (r.stop - r.start) * k as f64 / last)
                        .collect()),
                    Spacing::Log => {
                        if !(r.start > 0.0) {
                            return Err("log spacing needs start > 0".into());
                        }
                        let ratio = (r.stop / r.start).ln();
                        Ok((0..r.count)
                            .map(|k| r.start * (ratio * k as f64 / last).exp())
                            .collect())
                    }
                }
            }
        }
    }
}

/// `u₀ = a₀ G`, `u₁ = a₁ G` with `G = e^{-|x-c|²/(2w²)}` centred in the box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianData {
    pub amplitude_u0: f64,
    pub amplitude_u1: f64,
    #[serde(default = "unit_width")]
    pub width: f64,
}

impl GaussianData {
    pub fn build(&self, grid: Grid) -> Result<StatePair, String> {
        if !(self.width > 0.0) || !self.amplitude_u0.is_finite() || !self.amplitude_u1.is_finite() {
            return Err("Gaussian data need finite amplitudes and width > 0".into());
        }
        let g = SpectralField::gaussian(grid, 1.0, self.width);
        StatePair::new(g.scaled(self.amplitude_u0), g.scaled(self.amplitude_u1), 0.0).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RootsConfig {
    pub params: ParamsConfig,
    pub xi: Samples,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelNormsConfig {
    pub params: ParamsConfig,
    #[serde(default)]
    pub a: f64,
    pub kernel: KernelKind,
    pub zone: Zone,
    pub times: Samples,
    /// Fit window for the large-time exponent; defaults to all `t >= 1`.
    #[serde(default)]
    pub fit_window: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub target: Target,
    #[serde(default)]
    pub order: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearDecayConfig {
    pub params: ParamsConfig,
    #[serde(default)]
    pub grid: Option<Grid>,
    pub data: GaussianData,
    pub q: Rational,
    pub m: Rational,
    pub times: Samples,
    /// Defaults to `[10, min(validity horizon, last time)]`.
    #[serde(default)]
    pub window: Option<(f64, f64)>,
    /// Defaults to `u`, `u_t` and `|D|^σ u`.
    #[serde(default)]
    pub channels: Option<Vec<ChannelSpec>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemilinearConfig {
    pub params: ParamsConfig,
    pub theorem: TheoremId,
    pub q: Rational,
    pub m: Rational,
    #[serde(default)]
    pub s: Option<Rational>,
    pub p: f64,
    #[serde(default)]
    pub grid: Option<Grid>,
    pub data: GaussianData,
    /// Amplitude of a seeded uniform perturbation added to both data slots.
    #[serde(default)]
    pub noise: f64,
    pub times: Samples,
    #[serde(default)]
    pub control: Option<StepControl>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdmissiblePConfig {
    pub theorem: TheoremId,
    pub sigma: Rational,
    pub delta: Rational,
    pub n: u32,
    pub q: Rational,
    pub m: Rational,
    #[serde(default)]
    pub s: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GevreyConfig {
    pub params: ParamsConfig,
    pub times: Samples,
    pub xi: Samples,
}
