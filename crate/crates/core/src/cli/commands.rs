//! One function per subcommand: configuration in, tables and reports out.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::*;
use super::output::{fmt_f64, Table};
use super::CliError;
use crate::admissibility::{admissible_p, TheoremReport};
use crate::analysis::{
    fit_decay_exponent, gevrey_fit, theoretical_exponent, DecayFit, EstimateId, EstimateSpec, FitOptions, GevreyFit,
    Regressor, Source, Target, TimeRegime, Verdict,
};
use crate::hankel::{kernel_norms, KernelNormSeries};
use crate::model::{ModelParams, NormSetup};
use crate::propagator::{
    evolve_linear, fractional_derivative, lq_norm, validity_horizon, Grid, SpectralField, StatePair,
};
use crate::semilinear::{data_norm, run, Nonlinearity, RunReport, WeightSet};
use crate::symbols::{characteristic_roots, multipliers};

fn params(config: &ParamsConfig) -> Result<ModelParams, CliError> {
    config.build().map_err(CliError::input)
}

fn samples(s: &Samples) -> Result<Vec<f64>, CliError> {
    s.values().map_err(CliError::input)
}

pub fn cmd_roots(config: &RootsConfig) -> Result<Table, CliError> {
    let p = params(&config.params)?;
    let mut table = Table::new([
        "xi_abs",
        "re_l1",
        "im_l1",
        "re_l2",
        "im_l2",
        "discriminant",
        "coalesced",
    ]);
    for xi in samples(&config.xi)? {
        let r = characteristic_roots(&p, xi).map_err(CliError::input)?;
        table.push(vec![
            fmt_f64(xi),
            fmt_f64(r.lambda1.re),
            fmt_f64(r.lambda1.im),
            fmt_f64(r.lambda2.re),
            fmt_f64(r.lambda2.im),
            fmt_f64(r.discriminant),
            r.coalesced.to_string(),
        ]);
    }
    Ok(table)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelNormsReport {
    pub series: KernelNormSeries,
    pub small_t_exponent: f64,
    pub large_t_exponent: f64,
    pub fit: Option<DecayFit>,
    pub fit_note: Option<String>,
}

pub fn cmd_kernel_norms(config: &KernelNormsConfig) -> Result<(Table, KernelNormsReport), CliError> {
    let p = params(&config.params)?;
    let times = samples(&config.times)?;
    let series = kernel_norms(&p, config.a, config.kernel, config.zone, &times).map_err(CliError::from_hankel)?;
    let id = EstimateId::l1_for_zone(config.zone);
    let exponent = |regime| -> Result<f64, CliError> {
        let spec = EstimateSpec::kernel(id, config.kernel, regime);
        theoretical_exponent(&spec, &p, None, config.a)
            .map_err(CliError::from_analysis)?
            .power()
            .ok_or_else(|| CliError::input("kernel L1 estimates are powers of t"))
    };
    let small = exponent(TimeRegime::SmallT)?;
    let large = exponent(TimeRegime::LargeT)?;

    let mut table = Table::new(["t", "l1", "linf", "theoretical_exponent", "bound_ratio"]);
    for ((&t, &l1), &linf) in series.times.iter().zip(&series.l1_values).zip(&series.linf_values) {
        let e = if t <= 1.0 { small } else { large };
        table.push(vec![
            fmt_f64(t),
            fmt_f64(l1),
            fmt_f64(linf),
            fmt_f64(e),
            fmt_f64(l1 / t.powf(e)),
        ]);
    }

    let window = config.fit_window.unwrap_or((1.0, f64::INFINITY));
    let options = FitOptions {
        regressor: Regressor::T,
        ..FitOptions::default()
    };
    let (fit, fit_note) = match fit_decay_exponent(&series.times, &series.l1_values, window, large, &options) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok((
        table,
        KernelNormsReport {
            series,
            small_t_exponent: small,
            large_t_exponent: large,
            fit,
            fit_note,
        },
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelFit {
    pub channel: String,
    pub target: Target,
    pub order: f64,
    /// Largest exponent over the nonzero data slots; absent for zero data.
    pub theoretical_exponent: Option<f64>,
    pub fit: Option<DecayFit>,
    pub verdict: Verdict,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearDecayReport {
    pub grid: Grid,
    pub r: Option<String>,
    pub validity_horizon: f64,
    pub window: (f64, f64),
    pub channels: Vec<ChannelFit>,
}

fn channel_name(target: Target, order: f64) -> String {
    let base = match target {
        Target::U => "u",
        Target::Ut => "u_t",
    };
    if order == 0.0 {
        base.into()
    } else {
        format!("|D|^{order} {base}")
    }
}

/// Norm setup of the linear harness: `m < q` mixed, or `m = q` (`r = 1`).
pub fn linear_setup(q: crate::Rational, m: crate::Rational) -> Result<NormSetup, CliError> {
    if m == q {
        NormSetup::lq_lq(q).map_err(CliError::input)
    } else {
        NormSetup::new(q, m).map_err(CliError::input)
    }
}

pub fn cmd_linear_decay(config: &LinearDecayConfig) -> Result<(Table, LinearDecayReport), CliError> {
    let p = params(&config.params)?;
    let setup = linear_setup(config.q, config.m)?;
    let grid = match config.grid {
        Some(g) => Grid::new(g.n, g.points_per_axis, g.box_length).map_err(CliError::input)?,
        None => Grid::default_for(p.n).map_err(CliError::input)?,
    };
    if grid.n != p.n {
        return Err(CliError::input("grid dimension differs from params.n"));
    }
    let data = config.data.build(grid).map_err(CliError::input)?;
    let times = samples(&config.times)?;
    if times.iter().any(|&t| !(t >= 0.0)) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::input("times must be non-negative and ascending"));
    }
    let channels = config.channels.clone().unwrap_or_else(|| {
        vec![
            ChannelSpec {
                target: Target::U,
                order: 0.0,
            },
            ChannelSpec {
                target: Target::Ut,
                order: 0.0,
            },
            ChannelSpec {
                target: Target::U,
                order: p.sigma,
            },
        ]
    });
    let q = setup.q.to_f64();

    let mut columns = vec!["t".to_string()];
    columns.extend(channels.iter().map(|c| channel_name(c.target, c.order)));
    let mut table = Table::new(columns);
    let mut series: Vec<Vec<f64>> = vec![Vec::with_capacity(times.len()); channels.len()];
    for &t in &times {
        let state = evolve_linear(&p, &data, t).map_err(CliError::input)?;
        let mut row = vec![fmt_f64(t)];
        for (c, out) in channels.iter().zip(series.iter_mut()) {
            let field = if c.target == Target::U { &state.u } else { &state.ut };
            let value = lq_norm(&fractional_derivative(field, c.order).map_err(CliError::input)?, q)
                .map_err(CliError::input)?;
            row.push(fmt_f64(value));
            out.push(value);
        }
        table.push(row);
    }

    let horizon = validity_horizon(&p, &data, &times).map_err(CliError::input)?;
    let t_last = times.last().copied().unwrap_or(0.0);
    let window = config.window.unwrap_or((10.0, horizon.min(t_last)));
    let sources: Vec<Source> = [
        (Source::U0, config.data.amplitude_u0),
        (Source::U1, config.data.amplitude_u1),
    ]
    .into_iter()
    .filter(|(_, a)| *a != 0.0)
    .map(|(s, _)| s)
    .collect();

    let mut fits = Vec::with_capacity(channels.len());
    for (c, values) in channels.iter().zip(&series) {
        let mut theory: Option<f64> = None;
        for &source in &sources {
            let spec = EstimateSpec::solution(EstimateId::Combined, source, c.target, TimeRegime::LargeT);
            let e = theoretical_exponent(&spec, &p, Some(&setup), c.order)
                .map_err(CliError::from_analysis)?
                .power()
                .ok_or_else(|| CliError::input("combined estimates are powers of 1 + t"))?;
            theory = Some(theory.map_or(e, |t: f64| t.max(e)));
        }
        let (fit, verdict, note) = match theory {
            None => (None, Verdict::Inconclusive, Some("zero data".to_string())),
            Some(theory) => match fit_decay_exponent(&times, values, window, theory, &FitOptions::default()) {
                Ok(f) => {
                    let v = f.verdict;
                    (Some(f), v, None)
                }
                Err(e) => (None, Verdict::Inconclusive, Some(e.to_string())),
            },
        };
        fits.push(ChannelFit {
            channel: channel_name(c.target, c.order),
            target: c.target,
            order: c.order,
            theoretical_exponent: theory,
            fit,
            verdict,
            note,
        });
    }
    Ok((
        table,
        LinearDecayReport {
            grid,
            r: setup.r().map(|r| r.to_string()),
            validity_horizon: horizon,
            window,
            channels: fits,
        },
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemilinearOutput {
    pub admissibility: TheoremReport,
    pub p_admissible: bool,
    pub data_norm: f64,
    pub weights: WeightSet,
    pub run: RunReport,
}

fn perturb(field: &SpectralField, noise: f64, rng: &mut ChaCha8Rng) -> Result<SpectralField, CliError> {
    if noise == 0.0 {
        return Ok(field.clone());
    }
    let values = field
        .values()
        .iter()
        .map(|v| v + noise * rng.gen_range(-1.0..1.0))
        .collect();
    SpectralField::from_values(*field.grid(), values).map_err(CliError::input)
}

pub fn cmd_semilinear(config: &SemilinearConfig, seed: u64) -> Result<(Table, SemilinearOutput), CliError> {
    let p = params(&config.params)?;
    let setup = NormSetup::new(config.q, config.m).map_err(CliError::input)?;
    let report = admissible_p(config.theorem, &p, &setup, config.s).map_err(CliError::from_admissibility)?;
    let p_admissible = match (report.result, crate::Rational::from_decimal_f64(config.p)) {
        (Some(interval), Ok(exact)) => interval.contains(exact),
        _ => false,
    };
    let weights = WeightSet::for_theorem(config.theorem, &p, &setup, config.s).map_err(CliError::from_semilinear)?;
    let nonlinearity = Nonlinearity::for_theorem(config.theorem, config.p).map_err(CliError::from_semilinear)?;
    let grid = match config.grid {
        Some(g) => Grid::new(g.n, g.points_per_axis, g.box_length).map_err(CliError::input)?,
        None => Grid::default_for(p.n).map_err(CliError::input)?,
    };
    if grid.n != p.n {
        return Err(CliError::input("grid dimension differs from params.n"));
    }
    let clean = config.data.build(grid).map_err(CliError::input)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = StatePair::new(
        perturb(&clean.u, config.noise, &mut rng)?,
        perturb(&clean.ut, config.noise, &mut rng)?,
        0.0,
    )
    .map_err(CliError::input)?;
    let times = samples(&config.times)?;
    let control = config.control.clone().unwrap_or_default();
    let s = report.s.to_f64();
    let norm = data_norm(&data, &setup, s, p.delta).map_err(CliError::from_semilinear)?;
    let result = run(&p, &data, &nonlinearity, &weights, &times, &control).map_err(CliError::from_semilinear)?;

    let mut columns = vec!["t".to_string(), "x_norm".into(), "weighted".into()];
    columns.extend(result.channel_names.iter().cloned());
    columns.push("max_abs_u".into());
    let mut table = Table::new(columns);
    for rec in &result.records {
        let mut row = vec![fmt_f64(rec.t), fmt_f64(rec.x_norm), fmt_f64(rec.weighted)];
        row.extend(rec.channel_norms.iter().map(|v| fmt_f64(*v)));
        row.push(fmt_f64(rec.max_abs_u));
        table.push(row);
    }
    Ok((
        table,
        SemilinearOutput {
            admissibility: report,
            p_admissible,
            data_norm: norm,
            weights,
            run: result,
        },
    ))
}

pub fn cmd_admissible_p(config: &AdmissiblePConfig) -> Result<TheoremReport, CliError> {
    let p = ModelParams::exact(config.sigma, config.delta, config.n).map_err(CliError::input)?;
    let setup = NormSetup::new(config.q, config.m).map_err(CliError::input)?;
    admissible_p(config.theorem, &p, &setup, config.s).map_err(CliError::from_admissibility)
}

pub fn cmd_gevrey(config: &GevreyConfig) -> Result<(Table, GevreyFit), CliError> {
    let p = params(&config.params)?;
    let times = samples(&config.times)?;
    let xi = samples(&config.xi)?;
    let fit = gevrey_fit(&p, &times, &xi).map_err(CliError::from_analysis)?;
    let power = 2.0 * (p.sigma - p.delta);
    let mut table = Table::new(["xi_abs", "t", "regressor", "minus_log_k0", "ratio"]);
    for &x in &xi {
        for &t in &times {
            let k0 = multipliers(&p, t, x).map_err(CliError::input)?.k0.abs();
            let reg = x.powf(power) * t;
            let y = -k0.ln();
            table.push(vec![fmt_f64(x), fmt_f64(t), fmt_f64(reg), fmt_f64(y), fmt_f64(y / reg)]);
        }
    }
    Ok((table, fit))
}
