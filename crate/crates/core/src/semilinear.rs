//! Semilinear problem `u_tt + (-Δ)^σ u + (-Δ)^δ u_t = |u|^p` (or `|u_t|^p`)
//! on the periodic grid, advanced by an exponential trapezoid rule whose
//! linear part is exact.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::admissibility::{theorem_channels, AdmissibilityError, ChannelExponent, TheoremId};
use crate::analysis::Target;
use crate::model::{ModelParams, NormSetup};
use crate::propagator::fft;
use crate::propagator::{
    fractional_derivative, lq_norm, Grid, MultiplierTable, PropagatorError, SpectralField, StatePair,
};
use crate::rational::Rational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SemilinearError {
    #[error(transparent)]
    Propagator(#[from] PropagatorError),
    #[error(transparent)]
    Admissibility(#[from] AdmissibilityError),
    #[error("power p must be finite and > 1 (got {0})")]
    BadPower(f64),
    #[error("step controls must satisfy 0 < dt_min <= dt_max <= {max} (got dt_min = {dt_min}, dt_max = {dt_max})", max = DT_CAP)]
    BadStep { dt_min: f64, dt_max: f64 },
    #[error("output times must be ascending and after the initial time")]
    BadTimes,
}

/// Largest step the integrator takes.
pub const DT_CAP: f64 = 0.5;
/// Relative predictor/corrector discrepancy above which a step is halved.
pub const DEFAULT_STEP_TOLERANCE: f64 = 1e-6;
/// Amplitude at which a run is declared to blow up.
pub const BLOW_UP_THRESHOLD: f64 = 1e12;

/// `coefficient · |target|^p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Nonlinearity {
    pub target: Target,
    pub p: f64,
    #[serde(default = "unit")]
    pub coefficient: f64,
}

fn unit() -> f64 {
    1.0
}

impl Nonlinearity {
    pub fn power(target: Target, p: f64) -> Result<Self, SemilinearError> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(SemilinearError::BadPower(p));
        }
        Ok(Self {
            target,
            p,
            coefficient: 1.0,
        })
    }

    /// The nonlinearity of a theorem: `|u_t|^p` for `T2_5`, `|u|^p` otherwise.
    pub fn for_theorem(theorem: TheoremId, p: f64) -> Result<Self, SemilinearError> {
        let target = if theorem.acts_on_velocity() {
            Target::Ut
        } else {
            Target::U
        };
        Self::power(target, p)
    }
}

/// Channel `‖|D|^a target‖_{L^q}` weighted by `(1+t)^{-exponent}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedChannel {
    pub name: String,
    pub target: Target,
    pub order: f64,
    pub exponent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSet {
    pub q: f64,
    pub channels: Vec<WeightedChannel>,
}

impl WeightSet {
    /// Weights of the solution space of `theorem`; omitted channels are not listed.
    pub fn for_theorem(
        theorem: TheoremId,
        params: &ModelParams,
        setup: &NormSetup,
        s: Option<Rational>,
    ) -> Result<Self, SemilinearError> {
        let channels = theorem_channels(theorem, params, setup, s)?;
        Ok(Self::from_channels(setup.q.to_f64(), &channels))
    }

    pub fn from_channels(q: f64, channels: &[ChannelExponent]) -> Self {
        Self {
            q,
            channels: channels
                .iter()
                .map(|c| WeightedChannel {
                    name: c.channel.clone(),
                    target: c.target,
                    order: c.order.to_f64(),
                    exponent: c.exponent.to_f64(),
                })
                .collect(),
        }
    }

    /// `(channel norms, Σ (1+t)^{-e}·norm)` at one state.
    pub fn evaluate(&self, state: &StatePair) -> Result<(Vec<f64>, f64), SemilinearError> {
        let mut norms = Vec::with_capacity(self.channels.len());
        let mut total = 0.0;
        for c in &self.channels {
            let field = match c.target {
                Target::U => &state.u,
                Target::Ut => &state.ut,
            };
            let value = lq_norm(&fractional_derivative(field, c.order)?, self.q)?;
            total += (1.0 + state.t).powf(-c.exponent) * value;
            norms.push(value);
        }
        Ok((norms, total))
    }
}

/// Grid surrogate of the data norm:
/// `‖u₀‖_{L^m ∩ L^q} + ‖|D|^s u₀‖_{L^q} + ‖u₁‖_{L^m ∩ L^q} + ‖|D|^{[s-2δ]^+} u₁‖_{L^q}`.
pub fn data_norm(data: &StatePair, setup: &NormSetup, s: f64, delta: f64) -> Result<f64, SemilinearError> {
    let (q, m) = (setup.q.to_f64(), setup.m.to_f64());
    let u1_order = (s - 2.0 * delta).max(0.0);
    Ok(lq_norm(&data.u, m)?
        + lq_norm(&data.u, q)?
        + lq_norm(&fractional_derivative(&data.u, s)?, q)?
        + lq_norm(&data.ut, m)?
        + lq_norm(&data.ut, q)?
        + lq_norm(&fractional_derivative(&data.ut, u1_order)?, q)?)
}

/// Zero-padded evaluation of `coefficient·|v|^p` from the coefficients of `v`.
///
/// Coefficients are unnormalized forward DFTs on `N^n` points; the padded
/// grid has `3N/2` points per axis, and the Nyquist plane is dropped.
pub fn dealiased_power(grid: &Grid, coefficients: &[Complex64], nonlinearity: &Nonlinearity) -> Vec<Complex64> {
    let n = grid.points_per_axis;
    let padded = 3 * n / 2;
    let dim = grid.n;
    let big_len = padded.pow(dim);
    let up = big_len as f64 / grid.len() as f64;
    let half = (n / 2) as i64;

    let index_in = |mode: i64, side: usize| -> usize {
        if mode >= 0 {
            mode as usize
        } else {
            (side as i64 + mode) as usize
        }
    };
    // Maps each small-grid flat index to its padded flat index; None on the Nyquist plane.
    let targets: Vec<Option<usize>> = (0..grid.len())
        .map(|flat| {
            let idx = grid.unflatten(flat);
            let mut out = 0usize;
            for &i in &idx[..dim as usize] {
                let mode = grid.mode(i);
                if mode == -half {
                    return None;
                }
                out = out * padded + index_in(mode, padded);
            }
            Some(out)
        })
        .collect();

    let mut work = vec![Complex64::new(0.0, 0.0); big_len];
    for (c, target) in coefficients.iter().zip(&targets) {
        if let Some(j) = target {
            work[*j] = c * up;
        }
    }
    fft::transform(&mut work, padded, dim, false);
    let scale = 1.0 / big_len as f64;
    for v in work.iter_mut() {
        let x = v.re * scale;
        *v = Complex64::new(nonlinearity.coefficient * x.abs().powf(nonlinearity.p), 0.0);
    }
    fft::transform(&mut work, padded, dim, true);
    targets
        .iter()
        .map(|target| match target {
            Some(j) => work[*j] / up,
            None => Complex64::new(0.0, 0.0),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepControl {
    pub dt_max: f64,
    pub dt_min: f64,
    /// Relative predictor/corrector discrepancy of `û_t` that triggers halving;
    /// `f64::INFINITY` gives fixed steps of `dt_max`.
    pub tolerance: f64,
    /// Stop once `‖u‖_{X(t)}` exceeds this multiple of its value at the first output time.
    #[serde(default)]
    pub growth_cap: Option<f64>,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            dt_max: DT_CAP,
            dt_min: 1e-6,
            tolerance: DEFAULT_STEP_TOLERANCE,
            growth_cap: None,
        }
    }
}

impl StepControl {
    fn validate(&self) -> Result<(), SemilinearError> {
        if !(self.dt_min > 0.0) || !(self.dt_min <= self.dt_max) || !(self.dt_max <= DT_CAP) {
            return Err(SemilinearError::BadStep {
                dt_min: self.dt_min,
                dt_max: self.dt_max,
            });
        }
        Ok(())
    }
}

/// Result of one attempted step.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub u: Vec<Complex64>,
    pub ut: Vec<Complex64>,
    /// `‖û_t^{corr} - û_t^{pred}‖ / ‖û_t^{corr}‖`
    pub discrepancy: f64,
}

/// One exponential trapezoid step of length `table.dt` from coefficients `(u, u_t)`:
///
/// `û ← K̂₀û + K̂₁û_t + (h/2) K̂₁(h) F̂ₙ`,
/// `û_t ← ∂_tK̂₀û + ∂_tK̂₁û_t + (h/2)(∂_tK̂₁(h) F̂ₙ + F̂ₙ₊₁)`,
///
/// with `F̂ₙ₊₁` taken from the predictor that reuses `F̂ₙ`.
pub fn duhamel_step(
    grid: &Grid,
    table: &MultiplierTable,
    nonlinearity: &Nonlinearity,
    u: &[Complex64],
    ut: &[Complex64],
) -> StepOutcome {
    let h = table.dt;
    let forcing = |u: &[Complex64], ut: &[Complex64]| match nonlinearity.target {
        Target::U => dealiased_power(grid, u, nonlinearity),
        Target::Ut => dealiased_power(grid, ut, nonlinearity),
    };
    let f_now = forcing(u, ut);
    let (mut u_next, lin_ut) = table.propagate(u, ut);
    let mut ut_pred = Vec::with_capacity(u.len());
    for (k, m) in table.values.iter().enumerate() {
        u_next[k] += f_now[k] * (0.5 * h * m.k1);
        ut_pred.push(lin_ut[k] + f_now[k] * (0.5 * h * (m.dt_k1 + 1.0)));
    }
    let f_next = forcing(&u_next, &ut_pred);
    let mut ut_next = Vec::with_capacity(u.len());
    let mut diff = 0.0;
    let mut size = 0.0;
    for (k, m) in table.values.iter().enumerate() {
        let v = lin_ut[k] + (f_now[k] * m.dt_k1 + f_next[k]) * (0.5 * h);
        diff += (v - ut_pred[k]).norm_sqr();
        size += v.norm_sqr();
        ut_next.push(v);
    }
    let discrepancy = if size > 0.0 { (diff / size).sqrt() } else { diff.sqrt() };
    StepOutcome {
        u: u_next,
        ut: ut_next,
        discrepancy,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub t: f64,
    pub channel_norms: Vec<f64>,
    /// Weighted sum at this time.
    pub weighted: f64,
    /// Running supremum of the weighted sum over the initial state and the
    /// output times, the discrete `‖u‖_{X(t)}`.
    pub x_norm: f64,
    pub max_abs_u: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub channel_names: Vec<String>,
    pub records: Vec<RunRecord>,
    pub blow_up: bool,
    pub blow_up_time: Option<f64>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    /// Steps accepted at `dt_min` although the discrepancy exceeded the tolerance.
    pub forced_steps: usize,
    pub final_time: f64,
    /// The run ended early because of [`StepControl::growth_cap`].
    pub capped: bool,
}

impl RunReport {
    pub fn x_norm_at(&self, t: f64) -> Option<f64> {
        self.records
            .iter()
            .find(|r| (r.t - t).abs() <= 1e-12 * t.max(1.0))
            .map(|r| r.x_norm)
    }

    pub fn final_x_norm(&self) -> Option<f64> {
        self.records.last().map(|r| r.x_norm)
    }
}

struct TableCache<'a> {
    params: &'a ModelParams,
    grid: Grid,
    tables: HashMap<u64, MultiplierTable>,
}

impl<'a> TableCache<'a> {
    fn get(&mut self, dt: f64) -> Result<&MultiplierTable, PropagatorError> {
        if self.tables.len() > 64 {
            self.tables.clear();
        }
        let key = dt.to_bits();
        if !self.tables.contains_key(&key) {
            self.tables
                .insert(key, MultiplierTable::new(self.params, &self.grid, dt)?);
        }
        Ok(&self.tables[&key])
    }
}

fn peak(coefficients: &[Complex64], grid: &Grid) -> Result<f64, PropagatorError> {
    let field = SpectralField::from_coefficients(*grid, coefficients.to_vec())?;
    Ok(field.values().iter().fold(0.0f64, |m, v| m.max(v.abs())))
}

/// Integrates from `data` to the last of `output_times`, recording the
/// weighted norms at each output time. Stops early on blow-up.
pub fn run(
    params: &ModelParams,
    data: &StatePair,
    nonlinearity: &Nonlinearity,
    weights: &WeightSet,
    output_times: &[f64],
    control: &StepControl,
) -> Result<RunReport, SemilinearError> {
    control.validate()?;
    if output_times.is_empty() || output_times[0] < data.t || output_times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(SemilinearError::BadTimes);
    }
    let grid = *data.grid();
    let mut cache = TableCache {
        params,
        grid,
        tables: HashMap::new(),
    };
    let mut u = data.u.coefficients().to_vec();
    let mut ut = data.ut.coefficients().to_vec();
    let mut t = data.t;
    let mut dt = control.dt_max;
    let mut report = RunReport {
        channel_names: weights.channels.iter().map(|c| c.name.clone()).collect(),
        records: Vec::with_capacity(output_times.len()),
        blow_up: false,
        blow_up_time: None,
        accepted_steps: 0,
        rejected_steps: 0,
        forced_steps: 0,
        final_time: t,
        capped: false,
    };
    let (norms0, weighted0) = weights.evaluate(data)?;
    let mut sup = weighted0;
    let mut pending = output_times.iter().copied().peekable();
    if output_times[0] == data.t {
        pending.next();
        report.records.push(RunRecord {
            t,
            channel_norms: norms0,
            weighted: weighted0,
            x_norm: sup,
            max_abs_u: peak(&u, &grid)?,
        });
    }

    while let Some(&target) = pending.peek() {
        let h = dt.min(target - t);
        let outcome = duhamel_step(&grid, cache.get(h)?, nonlinearity, &u, &ut);
        let finite = outcome.discrepancy.is_finite();
        if finite && outcome.discrepancy > control.tolerance && h > control.dt_min {
            dt = (0.5 * h).max(control.dt_min);
            report.rejected_steps += 1;
            continue;
        }
        if finite && outcome.discrepancy > control.tolerance {
            report.forced_steps += 1;
        }
        u = outcome.u;
        ut = outcome.ut;
        t = if h == target - t { target } else { t + h };
        report.accepted_steps += 1;
        if finite && outcome.discrepancy < 0.25 * control.tolerance {
            dt = (2.0 * dt).min(control.dt_max);
        }

        let amplitude = peak(&u, &grid)?.max(peak(&ut, &grid)?);
        if !finite || !amplitude.is_finite() || amplitude > BLOW_UP_THRESHOLD {
            report.blow_up = true;
            report.blow_up_time = Some(t);
            break;
        }
        if t == target {
            let state = StatePair::new(
                SpectralField::from_coefficients(grid, u.clone())?,
                SpectralField::from_coefficients(grid, ut.clone())?,
                t,
            )?;
            let (norms, weighted) = weights.evaluate(&state)?;
            sup = sup.max(weighted);
            report.records.push(RunRecord {
                t,
                channel_norms: norms,
                weighted,
                x_norm: sup,
                max_abs_u: peak(&u, &grid)?,
            });
            pending.next();
            if let (Some(cap), Some(first)) = (control.growth_cap, report.records.first()) {
                if sup > cap * first.x_norm {
                    report.capped = true;
                    break;
                }
            }
        }
    }
    report.final_time = t;
    Ok(report)
}
