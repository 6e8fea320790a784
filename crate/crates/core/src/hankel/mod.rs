//! Radial inverse Fourier transforms and x-space norms of the localized
//! kernels `F⁻¹(|ξ|^a K̂_j χ)`.
//!
//! Transforms use the symmetric convention `(2π)^{-n/2} ∫ e^{ix·ξ} g(|ξ|) dξ`,
//! under which a radial symbol inverts as
//! `F(x) = ∫₀^∞ g(r) r^{n-1} J̃_{n/2-1}(r|x|) dr`.

mod bessel;

use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

pub use bessel::{jtilde, SERIES_SWITCH};

use crate::cutoff::{chi, chi_complement, CUTOFF_INNER, CUTOFF_OUTER};
use crate::model::{ModelParams, Regime};
use crate::parallel::par_map;
use crate::quadrature::GaussLegendre;
use crate::symbols::{multipliers_unchecked, ENVELOPE_K0_PREFACTOR, ENVELOPE_RATE};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HankelError {
    #[error("Bessel order {0} is not a half-integer >= -1/2")]
    UnsupportedOrder(f64),
    #[error("negative Bessel argument {0}")]
    NegativeArgument(f64),
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("tail of the radial integral did not converge: tail estimate {tail:e} against value {value:e}")]
    Truncation { tail: f64, value: f64 },
    #[error("high-frequency kernel norms are not available for delta = sigma")]
    ViscoElasticHighZone,
    #[error("times must be positive and strictly ascending")]
    BadTimes,
    #[error("derivative order a must be finite and non-negative (got {0})")]
    BadOrder(f64),
    #[error("symbols are normalized to mu = 1")]
    MuNotNormalized,
    #[error("symbol support extends beyond |xi| = {0:e}; time too small for this zone")]
    SupportTooLarge(f64),
}

/// Radial symbol `g(r)` with quadrature hints.
pub struct RadialProfile<'a> {
    evaluator: Box<dyn Fn(f64) -> f64 + Send + Sync + 'a>,
    support: (f64, Option<f64>),
    oscillation_scale: f64,
}

impl<'a> RadialProfile<'a> {
    /// `support = (r_min, r_max)` with `None` for an unbounded profile;
    /// `oscillation_scale` is the shortest local wavelength of `g` in `r`.
    pub fn new<F>(evaluator: F, support: (f64, Option<f64>), oscillation_scale: f64) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'a,
    {
        RadialProfile {
            evaluator: Box::new(evaluator),
            support,
            oscillation_scale: if oscillation_scale > 0.0 {
                oscillation_scale
            } else {
                f64::INFINITY
            },
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        (self.evaluator)(r)
    }

    pub fn support(&self) -> (f64, Option<f64>) {
        self.support
    }

    pub fn oscillation_scale(&self) -> f64 {
        self.oscillation_scale
    }
}

/// Order of the Gauss rule used on every panel.
const PANEL_ORDER: usize = 6;
/// Geometric refinement levels towards `r = 0`, where symbols such as
/// `r^{2δ}` or `r^a` are not analytic.
const GRADING_LEVELS: usize = 40;

fn panel_width(wavelength: f64) -> f64 {
    (wavelength / 8.0).min(0.1)
}

/// Gauss nodes `(r, w)` on `[lo, hi]` with panels no wider than `width`;
/// the panel touching `r = 0` is refined geometrically.
fn radial_nodes(rule: &GaussLegendre, lo: f64, hi: f64, width: f64, out: &mut Vec<(f64, f64)>) {
    if hi <= lo {
        return;
    }
    let panels = ((hi - lo) / width).ceil().max(1.0) as usize;
    let h = (hi - lo) / panels as f64;
    for k in 0..panels {
        let a = lo + h * k as f64;
        let b = a + h;
        if a == 0.0 {
            let mut right = b;
            for _ in 0..GRADING_LEVELS {
                let left = 0.5 * right;
                rule.push_panel(left, right, out);
                right = left;
            }
            rule.push_panel(0.0, right, out);
        } else {
            rule.push_panel(a, b, out);
        }
    }
}

/// Value of the `n`-dimensional radial inverse transform of `profile` at `|x| = x_abs`.
pub fn radial_inverse_fourier(profile: &RadialProfile<'_>, n: u32, x_abs: f64) -> Result<f64, HankelError> {
    if n == 0 {
        return Err(HankelError::ZeroDimension);
    }
    if !(x_abs >= 0.0) {
        return Err(HankelError::NegativeArgument(x_abs));
    }
    let mu = 0.5 * n as f64 - 1.0;
    let rule = GaussLegendre::new(PANEL_ORDER);
    let bessel_wavelength = if x_abs > 0.0 { 2.0 * PI / x_abs } else { f64::INFINITY };
    let width = panel_width(profile.oscillation_scale.min(bessel_wavelength));
    let integrand = |r: f64| profile.eval(r) * r.powi(n as i32 - 1) * bessel::jtilde_unchecked(mu, r * x_abs);
    let (r_min, r_max) = profile.support;
    let r_min = r_min.max(0.0);
    let block = |lo: f64, hi: f64| {
        let mut nodes = Vec::new();
        radial_nodes(&rule, lo, hi, width, &mut nodes);
        nodes.iter().fold((0.0, 0.0), |(s, a), &(r, w)| {
            let v = w * integrand(r);
            (s + v, a + v.abs())
        })
    };
    if let Some(r_max) = r_max {
        return Ok(block(r_min, r_max).0);
    }
    let mut hi = r_min + 1.0;
    let (mut value, _) = block(r_min, hi);
    loop {
        let next = 2.0 * hi;
        let (v, tail) = block(hi, next);
        value += v;
        hi = next;
        if tail <= 1e-6 * value.abs() || tail == 0.0 {
            return Ok(value);
        }
        if hi > 1e6 {
            return Err(HankelError::Truncation { tail, value });
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
pub enum KernelKind {
    K0,
    K1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Zone {
    Low,
    High,
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct KernelNormSeries {
    pub times: Vec<f64>,
    pub l1_values: Vec<f64>,
    pub linf_values: Vec<f64>,
    /// Largest radius used by any time in the series.
    pub truncation_radius: f64,
    /// Largest relative error estimate over the series.
    pub quadrature_error_estimate: f64,
    /// Absolute error estimates of each L¹ value (discretization plus tail).
    pub l1_error_estimates: Vec<f64>,
}

/// Surface measure `|S^{n-1}|`.
pub fn sphere_area(n: u32) -> f64 {
    let half = 0.5 * n as f64;
    2.0 * PI.powf(half) / gamma(half)
}

fn gamma(x: f64) -> f64 {
    // x is a positive integer or half-integer here
    let mut g = if (x - x.floor()).abs() < 1e-12 { 1.0 } else { PI.sqrt() };
    let mut y = if (x - x.floor()).abs() < 1e-12 { 1.0 } else { 0.5 };
    while y < x - 1e-12 {
        g *= y;
        y += 1.0;
    }
    g
}

/// The radial symbol `|ξ|^a K̂_j(t, |ξ|)` restricted to a zone.
#[derive(Debug, Clone, Copy)]
pub struct KernelSymbol {
    pub params: ModelParams,
    pub a: f64,
    pub which: KernelKind,
    pub zone: Zone,
    pub t: f64,
}

impl KernelSymbol {
    pub fn eval(&self, r: f64) -> f64 {
        let weight = match self.zone {
            Zone::Low => chi(r),
            Zone::High => chi_complement(r),
            Zone::All => 1.0,
        };
        if weight == 0.0 {
            return 0.0;
        }
        let m = multipliers_unchecked(&self.params, self.t, r);
        let k = match self.which {
            KernelKind::K0 => m.k0,
            KernelKind::K1 => m.k1,
        };
        let power = if self.a == 0.0 { 1.0 } else { r.powf(self.a) };
        weight * power * k
    }

    /// `[r_min, r_max]` outside which the symbol is below roundoff.
    pub fn support(&self) -> (f64, f64) {
        let r_min = if self.zone == Zone::High { CUTOFF_INNER } else { 0.0 };
        if self.zone == Zone::Low {
            return (r_min, CUTOFF_OUTER);
        }
        // envelope 2 r^a e^{-c r^{2(σ-δ)} t} (times t for K̂₁) below 1e-18
        let gap = 2.0 * (self.params.sigma - self.params.delta);
        let scale = if self.which == KernelKind::K1 {
            self.t.max(1.0)
        } else {
            1.0
        };
        let mut r = 2.0f64;
        while r < 1e7 {
            let env = ENVELOPE_K0_PREFACTOR
                * scale
                * r.powf(self.a + self.params.n as f64)
                * (-ENVELOPE_RATE * r.powf(gap) * self.t).exp();
            if env < 1e-18 {
                break;
            }
            r *= 1.05;
        }
        (r_min, r)
    }

    /// Shortest wavelength in `r` of the symbol's oscillation `cos(ω(r) t)`.
    pub fn oscillation_scale(&self, r_max: f64) -> f64 {
        let p = &self.params;
        let coalescing = 4f64.powf(1.0 / (4.0 * p.delta - 2.0 * p.sigma));
        let r_osc = r_max.min(coalescing).max(1.0);
        let rate = p.sigma * r_osc.powf(p.sigma - 1.0) * self.t;
        // the cutoff transition is resolved separately by the 0.1 panel cap
        if rate > 0.0 {
            2.0 * PI / rate
        } else {
            f64::INFINITY
        }
    }
}

/// Discretization of one kernel: radial samples `ρ_k = k h` plus error bookkeeping.
struct KernelSamples {
    l1: f64,
    linf: f64,
    radius: f64,
    error: f64,
}

fn kernel_at_time(symbol: &KernelSymbol) -> Result<KernelSamples, HankelError> {
    let n = symbol.params.n;
    let mu = 0.5 * n as f64 - 1.0;
    let (r_min, r_max) = symbol.support();
    if r_max >= 1e6 {
        return Err(HankelError::SupportTooLarge(r_max));
    }
    let osc = symbol.oscillation_scale(r_max);
    let rule = GaussLegendre::new(PANEL_ORDER);
    // the kernel is band-limited to |ξ| ≤ r_max: cells of π/(4 r_max) hold
    // at most an eighth of its shortest wavelength
    let cell = PI / (4.0 * r_max);
    let high_rule = GaussLegendre::new(5);
    let low_rule = GaussLegendre::new(4);
    let area = sphere_area(n);
    let weight_power = n as i32 - 1;

    // symbol values on a node set fine enough for every ρ ≤ rho_hi
    let nodes_for = |rho_hi: f64, refine: f64| -> Vec<(f64, f64)> {
        let wavelength = osc.min(2.0 * PI / rho_hi.max(1e-300));
        let mut nodes = Vec::new();
        radial_nodes(&rule, r_min, r_max, panel_width(wavelength) / refine, &mut nodes);
        nodes
            .into_iter()
            .map(|(r, w)| (r, w * symbol.eval(r) * r.powi(weight_power)))
            .filter(|&(_, gw)| gw != 0.0)
            .collect()
    };
    let kernel = |nodes: &[(f64, f64)], rho: f64| -> f64 {
        nodes
            .iter()
            .map(|&(r, gw)| gw * bessel::jtilde_unchecked(mu, r * rho))
            .sum()
    };

    let mut shell_lo = 0.0f64;
    let mut shell_hi = (16.0 / r_max).max(8.0 * PI);
    let mut total = 0.0;
    let mut discretization = 0.0;
    let mut linf = 0.0f64;
    let mut shells: Vec<f64> = Vec::new();
    let mut node_error = 0.0f64;
    loop {
        let nodes = nodes_for(shell_hi, 1.0);
        let cells = ((shell_hi - shell_lo) / cell).round().max(1.0) as usize;
        let width = (shell_hi - shell_lo) / cells as f64;
        let edges: Vec<f64> = (0..=cells).map(|k| shell_lo + width * k as f64).collect();
        let edge_values = par_map(&edges, |&rho| kernel(&nodes, rho));
        let cell_ids: Vec<usize> = (0..cells).collect();
        let pieces = par_map(&cell_ids, |&c| {
            integrate_abs_cell(
                |rho| kernel(&nodes, rho),
                edges[c],
                edges[c + 1],
                edge_values[c],
                edge_values[c + 1],
                weight_power,
                (&high_rule, &low_rule),
            )
        });
        let mut shell_high = 0.0;
        let mut shell_low = 0.0;
        for (hi_val, lo_val, peak) in pieces {
            shell_high += hi_val;
            shell_low += lo_val;
            linf = linf.max(peak);
        }
        for v in &edge_values {
            linf = linf.max(v.abs());
        }
        let shell = area * shell_high;
        total += shell;
        discretization += area * (shell_high - shell_low).abs();
        shells.push(shell);

        // node-density check at the outer edge of the shell
        let refined = nodes_for(shell_hi, 2.0);
        let mut shell_node_error = 0.0f64;
        for &rho in &[shell_lo + 0.5 * (shell_hi - shell_lo), shell_hi] {
            let a = kernel(&nodes, rho);
            let b = kernel(&refined, rho);
            shell_node_error =
                shell_node_error.max((a - b).abs() * area * rho.powi(weight_power) * (shell_hi - shell_lo));
        }
        node_error += shell_node_error;

        let k = shells.len();
        if shell <= 1e-6 * total {
            let error = discretization + shell + node_error;
            return Ok(KernelSamples {
                l1: total,
                linf,
                radius: shell_hi,
                error,
            });
        }
        if k >= 3 {
            let ratio = shells[k - 1] / shells[k - 2];
            let prev_ratio = shells[k - 2] / shells[k - 3];
            if ratio < 0.7 && prev_ratio < 1.0 {
                let tail = shell * ratio / (1.0 - ratio);
                if tail <= 1e-4 * total {
                    let error = discretization + tail + node_error;
                    return Ok(KernelSamples {
                        l1: total + tail,
                        linf,
                        radius: shell_hi,
                        error,
                    });
                }
            }
        }
        if shell_hi > 1e6 {
            return Err(HankelError::Truncation {
                tail: shell,
                value: total,
            });
        }
        shell_lo = shell_hi;
        shell_hi *= 2.0;
    }
}

/// `∫_a^b |K(ρ)| ρ^p dρ` by Gauss rules of two orders, splitting the cell at a
/// sign change of `K`. Returns `(higher order, lower order, max |K| at the nodes)`.
fn integrate_abs_cell<F: Fn(f64) -> f64>(
    kernel: F,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    power: i32,
    rules: (&GaussLegendre, &GaussLegendre),
) -> (f64, f64, f64) {
    let mut peak = 0.0f64;
    let piece = |lo: f64, hi: f64, peak: &mut f64| {
        let mut with = |rule: &GaussLegendre| {
            rule.integrate(lo, hi, |rho| {
                let v = kernel(rho);
                *peak = peak.max(v.abs());
                v * rho.powi(power)
            })
        };
        let high = with(rules.0);
        let low = with(rules.1);
        (high.abs(), low.abs())
    };
    if fa * fb >= 0.0 {
        let (h, l) = piece(a, b, &mut peak);
        return (h, l, peak);
    }
    // regula falsi with the Illinois modification; [lo, hi] always brackets the root
    let (mut lo, mut hi, mut flo, mut fhi) = (a, b, fa, fb);
    let mut kept = 0i8;
    let mut root = 0.5 * (a + b);
    for _ in 0..100 {
        let mut c = (lo * fhi - hi * flo) / (fhi - flo);
        if !(c > lo && c < hi) {
            c = 0.5 * (lo + hi);
        }
        let converged = (c - root).abs() <= 1e-15 * b.abs().max(1.0);
        root = c;
        let fc = kernel(c);
        if fc == 0.0 || converged {
            break;
        }
        if fc * fhi < 0.0 {
            lo = c;
            flo = fc;
            if kept == 1 {
                fhi *= 0.5;
            }
            kept = 1;
        } else {
            hi = c;
            fhi = fc;
            if kept == -1 {
                flo *= 0.5;
            }
            kept = -1;
        }
    }
    let (h1, l1) = piece(a, root, &mut peak);
    let (h2, l2) = piece(root, b, &mut peak);
    (h1 + h2, l1 + l2, peak)
}

/// L¹ and L^∞ norms in `x` of `F⁻¹(|ξ|^a K̂_j(t, ·) · zone cutoff)` for each `t`.
pub fn kernel_norms(
    params: &ModelParams,
    a: f64,
    which: KernelKind,
    zone: Zone,
    times: &[f64],
) -> Result<KernelNormSeries, HankelError> {
    if params.mu != 1.0 {
        return Err(HankelError::MuNotNormalized);
    }
    if !(a >= 0.0) || !a.is_finite() {
        return Err(HankelError::BadOrder(a));
    }
    if zone != Zone::Low && params.regime() == Regime::ViscoElastic {
        return Err(HankelError::ViscoElasticHighZone);
    }
    if times.iter().any(|&t| !(t > 0.0) || !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(HankelError::BadTimes);
    }
    let mut series = KernelNormSeries {
        times: times.to_vec(),
        l1_values: Vec::with_capacity(times.len()),
        linf_values: Vec::with_capacity(times.len()),
        truncation_radius: 0.0,
        quadrature_error_estimate: 0.0,
        l1_error_estimates: Vec::with_capacity(times.len()),
    };
    for &t in times {
        let symbol = KernelSymbol {
            params: *params,
            a,
            which,
            zone,
            t,
        };
        let s = kernel_at_time(&symbol)?;
        series.l1_values.push(s.l1);
        series.linf_values.push(s.linf);
        series.l1_error_estimates.push(s.error);
        series.truncation_radius = series.truncation_radius.max(s.radius);
        if s.l1 > 0.0 {
            series.quadrature_error_estimate = series.quadrature_error_estimate.max(s.error / s.l1);
        }
    }
    Ok(series)
}
