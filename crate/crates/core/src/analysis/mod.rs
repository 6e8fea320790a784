//! Decay-rate measurement against the theoretical envelopes, Gevrey
//! smoothing fits and the convolution-integral lemma.

mod exponents;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use exponents::{
    exponent_formula, theoretical_exponent, theoretical_exponent_exact, EstimateId, EstimateSpec, Exponent,
    ExponentInputs, Scalar, Source, Target, TimeRegime,
};

use crate::model::{ModelError, ModelParams, Regime};
use crate::quadrature::adaptive;
use crate::symbols::{multipliers, SymbolError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("estimate {0:?} is only available for delta < sigma")]
    ViscoElasticUnsupported(EstimateId),
    #[error("the exponential high-frequency estimate requires delta = sigma")]
    RequiresViscoElastic,
    #[error("estimate {0:?} bounds kernels only; the u_t target is not tabulated")]
    TargetUnsupported(EstimateId),
    #[error("estimate {0:?} needs the exponent r (supply q and m)")]
    MissingR(EstimateId),
    #[error("derivative order must be finite and non-negative (got {0})")]
    BadOrder(f64),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("need at least {needed} samples in the fit window, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("series value {value} at t = {t} is not positive")]
    NonPositive { t: f64, value: f64 },
    #[error("times and values differ in length ({times} vs {values})")]
    LengthMismatch { times: usize, values: usize },
    #[error("Gevrey fit needs delta < sigma")]
    GevreyViscoElastic,
    #[error("Gevrey fit needs |xi| >= 2 (got {0})")]
    GevreyLowFrequency(f64),
    #[error("Gevrey fit needs t > 0 (got {0})")]
    GevreyBadTime(f64),
    #[error("Gevrey rate c = {c} has non-positive lower confidence bound {lower}")]
    GevreyNotPositive { c: f64, lower: f64 },
    #[error(transparent)]
    Symbol(#[from] SymbolError),
}

/// Minimum number of samples for a decay fit.
pub const MIN_FIT_SAMPLES: usize = 10;
pub const DEFAULT_SLACK: f64 = 0.1;
pub const DEFAULT_RESIDUAL_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    WithinBound,
    ViolatesBound,
    Inconclusive,
}

/// Abscissa of the log-log regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Regressor {
    /// `log(1 + t)`, matching envelopes written in `1 + t`.
    #[default]
    OnePlusT,
    /// `log t`, for envelopes written in `t` (kernel norms).
    T,
}

impl Regressor {
    fn apply(self, t: f64) -> f64 {
        match self {
            Regressor::OnePlusT => t.ln_1p(),
            Regressor::T => t.ln(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub slack: f64,
    pub residual_threshold: f64,
    pub regressor: Regressor,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            slack: DEFAULT_SLACK,
            residual_threshold: DEFAULT_RESIDUAL_THRESHOLD,
            regressor: Regressor::OnePlusT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub fitted_exponent: f64,
    pub window: (f64, f64),
    pub residual_rms: f64,
    pub theoretical_exponent: f64,
    pub verdict: Verdict,
    pub samples: usize,
    pub regressor: Regressor,
}

#[derive(Debug, Clone, Copy)]
struct LineFit {
    slope: f64,
    intercept: f64,
    residual_rms: f64,
    slope_std_error: f64,
}

fn least_squares(x: &[f64], y: &[f64]) -> LineFit {
    let k = x.len() as f64;
    let mx = x.iter().sum::<f64>() / k;
    let my = y.iter().sum::<f64>() / k;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let r = b - (intercept + slope * a);
            r * r
        })
        .sum();
    let dof = (x.len() as f64 - 2.0).max(1.0);
    LineFit {
        slope,
        intercept,
        residual_rms: (ss / k).sqrt(),
        slope_std_error: (ss / dof / sxx).sqrt(),
    }
}

/// Least-squares slope of `log value` against `log(1+t)` (or `log t`) over
/// the samples with `t` inside `window`, judged against `theoretical`.
pub fn fit_decay_exponent(
    times: &[f64],
    values: &[f64],
    window: (f64, f64),
    theoretical: f64,
    options: &FitOptions,
) -> Result<DecayFit, AnalysisError> {
    if times.len() != values.len() {
        return Err(AnalysisError::LengthMismatch {
            times: times.len(),
            values: values.len(),
        });
    }
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (&t, &v) in times.iter().zip(values) {
        if t < window.0 || t > window.1 {
            continue;
        }
        if !(v > 0.0) || !v.is_finite() {
            return Err(AnalysisError::NonPositive { t, value: v });
        }
        x.push(options.regressor.apply(t));
        y.push(v.ln());
    }
    if x.len() < MIN_FIT_SAMPLES {
        return Err(AnalysisError::TooFewSamples {
            needed: MIN_FIT_SAMPLES,
            got: x.len(),
        });
    }
    let line = least_squares(&x, &y);
    let verdict = if line.residual_rms >= options.residual_threshold {
        Verdict::Inconclusive
    } else if line.slope > theoretical + options.slack {
        Verdict::ViolatesBound
    } else {
        Verdict::WithinBound
    };
    Ok(DecayFit {
        fitted_exponent: line.slope,
        window,
        residual_rms: line.residual_rms,
        theoretical_exponent: theoretical,
        verdict,
        samples: x.len(),
        regressor: options.regressor,
    })
}

/// Fitted rate in `|K̂₀(t,ξ)| ≲ e^{-c|ξ|^{2(σ-δ)}t}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GevreyFit {
    pub c: f64,
    pub intercept: f64,
    pub std_error: f64,
    /// `c - 3·std_error`
    pub lower_bound: f64,
    pub samples: usize,
}

/// Regresses `-log|K̂₀(t,ξ)|` on `|ξ|^{2(σ-δ)}t` over the grid `t_list × xi_list`.
pub fn gevrey_fit(params: &ModelParams, t_list: &[f64], xi_list: &[f64]) -> Result<GevreyFit, AnalysisError> {
    if params.regime() == Regime::ViscoElastic {
        return Err(AnalysisError::GevreyViscoElastic);
    }
    let power = 2.0 * (params.sigma - params.delta);
    let mut x = Vec::new();
    let mut y = Vec::new();
    for &xi in xi_list {
        if !(xi >= 2.0) {
            return Err(AnalysisError::GevreyLowFrequency(xi));
        }
        for &t in t_list {
            if !(t > 0.0) {
                return Err(AnalysisError::GevreyBadTime(t));
            }
            let k0 = multipliers(params, t, xi)?.k0.abs();
            // zeros of an oscillating K̂₀ and underflow carry no rate information
            if k0 > f64::MIN_POSITIVE {
                x.push(xi.powf(power) * t);
                y.push(-k0.ln());
            }
        }
    }
    if x.len() < 3 {
        return Err(AnalysisError::TooFewSamples {
            needed: 3,
            got: x.len(),
        });
    }
    let line = least_squares(&x, &y);
    let lower = line.slope - 3.0 * line.slope_std_error;
    if !(lower > 0.0) {
        return Err(AnalysisError::GevreyNotPositive { c: line.slope, lower });
    }
    Ok(GevreyFit {
        c: line.slope,
        intercept: line.intercept,
        std_error: line.slope_std_error,
        lower_bound: lower,
        samples: x.len(),
    })
}

/// Growth regime of `∫₀^t (1+t-τ)^{-α}(1+τ)^{-β} dτ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaRegime {
    /// `max{α,β} > 1`: `(1+t)^{-min{α,β}}`
    MaxAboveOne,
    /// `max{α,β} = 1`: `(1+t)^{-min{α,β}} log(2+t)`
    MaxEqualsOne,
    /// `max{α,β} < 1`: `(1+t)^{1-α-β}`
    MaxBelowOne,
}

impl LemmaRegime {
    pub fn classify(alpha: f64, beta: f64) -> Self {
        let hi = alpha.max(beta);
        if hi > 1.0 {
            Self::MaxAboveOne
        } else if hi == 1.0 {
            Self::MaxEqualsOne
        } else {
            Self::MaxBelowOne
        }
    }

    pub fn predicted(self, alpha: f64, beta: f64, t: f64) -> f64 {
        let lo = alpha.min(beta);
        match self {
            Self::MaxAboveOne => (1.0 + t).powf(-lo),
            Self::MaxEqualsOne => (1.0 + t).powf(-lo) * (2.0 + t).ln(),
            Self::MaxBelowOne => (1.0 + t).powf(1.0 - alpha - beta),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaSample {
    pub t: f64,
    pub integral: f64,
    pub predicted: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub alpha: f64,
    pub beta: f64,
    pub regime: LemmaRegime,
    pub samples: Vec<LemmaSample>,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Ratio spread `max/min` stays below [`LEMMA_RATIO_SPREAD`].
    pub bounded: bool,
}

pub const LEMMA_RATIO_SPREAD: f64 = 10.0;

pub fn convolution_integral(alpha: f64, beta: f64, t: f64) -> f64 {
    adaptive(
        |tau| (1.0 + t - tau).powf(-alpha) * (1.0 + tau).powf(-beta),
        0.0,
        t,
        1e-300,
        1e-11,
        4000,
    )
    .value
}

pub fn integral_lemma_check(alpha: f64, beta: f64, t_list: &[f64]) -> LemmaReport {
    let regime = LemmaRegime::classify(alpha, beta);
    let samples: Vec<LemmaSample> = t_list
        .iter()
        .map(|&t| {
            let integral = convolution_integral(alpha, beta, t);
            let predicted = regime.predicted(alpha, beta, t);
            LemmaSample {
                t,
                integral,
                predicted,
                ratio: integral / predicted,
            }
        })
        .collect();
    let min_ratio = samples.iter().map(|s| s.ratio).fold(f64::INFINITY, f64::min);
    let max_ratio = samples.iter().map(|s| s.ratio).fold(0.0, f64::max);
    LemmaReport {
        alpha,
        beta,
        regime,
        bounded: min_ratio > 0.0 && max_ratio <= LEMMA_RATIO_SPREAD * min_ratio,
        samples,
        min_ratio,
        max_ratio,
    }
}

/// `t_min·(t_max/t_min)^{k/(count-1)}`
pub fn log_spaced(t_min: f64, t_max: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![t_min];
    }
    let ratio = (t_max / t_min).ln();
    (0..count)
        .map(|k| t_min * (ratio * k as f64 / (count - 1) as f64).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_power_law_fit() {
        let t = log_spaced(1.0, 1000.0, 40);
        let v: Vec<f64> = t.iter().map(|t| 3.7 * (1.0 + t).powf(-1.5)).collect();
        let fit = fit_decay_exponent(&t, &v, (1.0, 1000.0), -1.5, &FitOptions::default()).unwrap();
        assert!((fit.fitted_exponent + 1.5).abs() < 1e-10);
        assert!(fit.residual_rms < 1e-10);
        assert_eq!(fit.verdict, Verdict::WithinBound);
    }

    #[test]
    fn noisy_power_law_fit() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let t = log_spaced(1.0, 1000.0, 60);
        let v: Vec<f64> = t
            .iter()
            .map(|t| (1.0 + t).powf(-0.75) * (1.0 + 0.01 * rng.gen_range(-1.0..1.0)))
            .collect();
        let fit = fit_decay_exponent(&t, &v, (1.0, 1000.0), -0.75, &FitOptions::default()).unwrap();
        assert!((fit.fitted_exponent + 0.75).abs() < 0.02);
    }

    #[test]
    fn exponential_series_is_inconclusive() {
        let t: Vec<f64> = (1..=30).map(|k| k as f64).collect();
        let v: Vec<f64> = t.iter().map(|t| (-t).exp()).collect();
        let fit = fit_decay_exponent(&t, &v, (1.0, 30.0), 0.0, &FitOptions::default()).unwrap();
        assert!(fit.residual_rms > 0.05);
        assert_eq!(fit.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn steeper_growth_is_flagged() {
        let t = log_spaced(1.0, 100.0, 20);
        let v: Vec<f64> = t.iter().map(|t| (1.0 + t).powf(0.5)).collect();
        let fit = fit_decay_exponent(&t, &v, (1.0, 100.0), 0.2, &FitOptions::default()).unwrap();
        assert_eq!(fit.verdict, Verdict::ViolatesBound);
    }

    #[test]
    fn fit_input_errors() {
        let t = log_spaced(1.0, 10.0, 12);
        let mut v = vec![1.0; 12];
        v[3] = 0.0;
        assert!(matches!(
            fit_decay_exponent(&t, &v, (1.0, 10.0), 0.0, &FitOptions::default()),
            Err(AnalysisError::NonPositive { .. })
        ));
        assert!(matches!(
            fit_decay_exponent(&t[..3], &v[..3], (1.0, 10.0), 0.0, &FitOptions::default()),
            Err(AnalysisError::TooFewSamples { .. })
        ));
    }

    #[test]
    fn log_t_regressor() {
        let t = log_spaced(1.0, 100.0, 20);
        let v: Vec<f64> = t.iter().map(|t| t.powf(1.2)).collect();
        let options = FitOptions {
            regressor: Regressor::T,
            ..FitOptions::default()
        };
        let fit = fit_decay_exponent(&t, &v, (1.0, 100.0), 4.0 / 3.0, &options).unwrap();
        assert!((fit.fitted_exponent - 1.2).abs() < 1e-12);
    }

    #[test]
    fn gevrey_rate_for_sigma_two() {
        let p = ModelParams::new(2.0, 1.5, 1.0, 1).unwrap();
        let t = log_spaced(1.0, 10.0, 8);
        let xi = [4.0, 8.0, 16.0, 32.0];
        let fit = gevrey_fit(&p, &t, &xi).unwrap();
        assert!(fit.lower_bound > 0.0);
        assert!(fit.c > 0.4 && fit.c < 1.2, "c = {}", fit.c);
        for &x in &xi {
            for &s in &t {
                let k0 = multipliers(&p, s, x).unwrap().k0.abs();
                let ratio = -k0.ln() / (x * s);
                assert!((0.4..=1.2).contains(&ratio), "xi {x} t {s} ratio {ratio}");
            }
        }
    }

    #[test]
    fn gevrey_rescaling_keeps_rate() {
        let p = ModelParams::new(2.0, 1.5, 1.0, 1).unwrap();
        let t = log_spaced(1.0, 10.0, 8);
        let xi = [8.0, 16.0, 32.0];
        let base = gevrey_fit(&p, &t, &xi).unwrap();
        // |ξ|^{2(σ-δ)} t = |ξ| t is preserved by (t/2, 2ξ)
        let t2: Vec<f64> = t.iter().map(|s| s / 2.0).collect();
        let xi2: Vec<f64> = xi.iter().map(|x| x * 2.0).collect();
        let scaled = gevrey_fit(&p, &t2, &xi2).unwrap();
        assert!((base.c - scaled.c).abs() < 0.05 * base.c);
    }

    #[test]
    fn gevrey_rejects_bad_inputs() {
        let visco = ModelParams::new(1.0, 1.0, 1.0, 1).unwrap();
        assert_eq!(
            gevrey_fit(&visco, &[1.0], &[4.0]),
            Err(AnalysisError::GevreyViscoElastic)
        );
        let p = ModelParams::new(2.0, 1.5, 1.0, 1).unwrap();
        assert!(matches!(
            gevrey_fit(&p, &[1.0], &[1.0]),
            Err(AnalysisError::GevreyLowFrequency(_))
        ));
        assert!(matches!(
            gevrey_fit(&p, &[0.0], &[4.0]),
            Err(AnalysisError::GevreyBadTime(_))
        ));
    }

    #[test]
    fn lemma_zero_exponents_give_t() {
        let t = log_spaced(1.0, 1e4, 9);
        let report = integral_lemma_check(0.0, 0.0, &t);
        assert_eq!(report.regime, LemmaRegime::MaxBelowOne);
        for s in &report.samples {
            assert!((s.integral - s.t).abs() < 1e-9 * s.t);
        }
        assert!(report.bounded);
    }

    #[test]
    fn lemma_regimes() {
        let t = log_spaced(1.0, 1e4, 13);
        let r = integral_lemma_check(2.0, 0.5, &t);
        assert_eq!(r.regime, LemmaRegime::MaxAboveOne);
        assert!(r.min_ratio >= 0.5 && r.max_ratio <= 5.0, "{r:?}");
        let r = integral_lemma_check(1.0, 1.0, &t);
        assert_eq!(r.regime, LemmaRegime::MaxEqualsOne);
        assert!(r.bounded);
        // closed form for α = β = 1
        for s in &r.samples {
            let exact = 2.0 * (1.0 + s.t).ln() / (2.0 + s.t);
            assert!((s.integral - exact).abs() < 1e-9 * exact);
        }
        let r = integral_lemma_check(0.5, 0.25, &t);
        assert_eq!(r.regime, LemmaRegime::MaxBelowOne);
        assert!(r.bounded);
    }
}
