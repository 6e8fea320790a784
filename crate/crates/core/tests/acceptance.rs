//! Acceptance suite. Each test prints one `PASS`/`FAIL` line straight to
//! stdout (bypassing the test harness capture) and then asserts.

use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sigma_evolve::admissibility::{admissible_p, display_set, TheoremId};
use sigma_evolve::analysis::{
    fit_decay_exponent, gevrey_fit, integral_lemma_check, log_spaced, theoretical_exponent, theoretical_exponent_exact,
    EstimateId, EstimateSpec, FitOptions, LemmaRegime, Regressor, Target, TimeRegime,
};
use sigma_evolve::cli::commands::cmd_linear_decay;
use sigma_evolve::cli::config::{GaussianData, LinearDecayConfig, ParamsConfig, SampleRange, Samples, Spacing};
use sigma_evolve::hankel::{kernel_norms, KernelKind, Zone};
use sigma_evolve::propagator::{evolve_linear, lq_norm, split_frequencies, Grid, SpectralField, StatePair};
use sigma_evolve::semilinear::{run, Nonlinearity, StepControl, WeightSet};
use sigma_evolve::symbols::multipliers;
use sigma_evolve::{ModelParams, NormSetup, Rational};

fn report(criterion: u32, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "[acceptance {criterion:>2}] {tag}  {detail}");
    let _ = out.flush();
}

fn r(s: &str) -> Rational {
    match s.split_once('/') {
        Some((a, b)) => Rational::frac(a.parse().unwrap(), b.parse().unwrap()),
        None => Rational::int(s.parse().unwrap()),
    }
}

// ---------------------------------------------------------------- 1

#[test]
fn c01_admissibility_golden_set() {
    let blocks = [
        (
            ("9/5", "1", 4u32),
            [
                (TheoremId::T2_1, None, "[4, inf)"),
                (TheoremId::T2_2, Some("3/2"), "[4, inf)"),
                (TheoremId::T2_3, Some("5/2"), "[4, inf)"),
                (TheoremId::T2_4, Some("7/2"), "(167/37, inf)"),
                (TheoremId::T2_5, Some("4"), "[4, inf)"),
            ],
        ),
        (
            ("11/10", "11/10", 5u32),
            [
                (TheoremId::T2_1, None, "(317/79, inf)"),
                (TheoremId::T2_2, Some("2"), "[4, inf)"),
                (TheoremId::T2_3, Some("5/2"), "(329/79, inf)"),
                (TheoremId::T2_4, Some("7/2"), "(369/79, inf)"),
                (TheoremId::T2_5, Some("4"), "[4, inf)"),
            ],
        ),
    ];
    let start = Instant::now();
    let setup = NormSetup::new(r("4"), r("1")).unwrap();
    let mut mismatches = Vec::new();
    for ((sigma, delta, n), cases) in blocks {
        let params = ModelParams::exact(r(sigma), r(delta), n).unwrap();
        for (theorem, s, expected) in cases {
            let report = admissible_p(theorem, &params, &setup, s.map(r)).unwrap();
            let got = display_set(&report.result);
            if got != expected {
                mismatches.push(format!("{theorem} sigma={sigma}: {got} != {expected}"));
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = mismatches.is_empty() && elapsed < 1.0;
    report(
        1,
        pass,
        &format!("10/10 exact golden intervals ({elapsed:.3} s) {mismatches:?}"),
    );
    assert!(pass);
}

// ---------------------------------------------------------------- 2

/// Taylor-series integration of `y'' + |ξ|^{2δ} y' + |ξ|^{2σ} y = 0`:
/// order-30 local expansion, steps with `h·(|b| + √|c|) ≤ 1/4`.
fn taylor_oracle(b: f64, c: f64, t: f64, y0: f64, v0: f64) -> (f64, f64) {
    const ORDER: usize = 30;
    let scale = b + c.sqrt();
    let steps = ((t * scale / 0.25).ceil() as usize).max(1);
    let h = t / steps as f64;
    let (mut y, mut v) = (y0, v0);
    let mut coef = [0.0f64; ORDER + 2];
    for _ in 0..steps {
        // y = Σ coef_k s^k with (k+2)(k+1) coef_{k+2} = -b (k+1) coef_{k+1} - c coef_k
        coef[0] = y;
        coef[1] = v;
        for k in 0..ORDER {
            coef[k + 2] = (-b * (k + 1) as f64 * coef[k + 1] - c * coef[k]) / ((k + 2) * (k + 1)) as f64;
        }
        let (mut ny, mut nv, mut hp) = (0.0, 0.0, 1.0);
        for k in 0..=ORDER + 1 {
            ny += coef[k] * hp;
            if k <= ORDER {
                nv += (k + 1) as f64 * coef[k + 1] * hp;
            }
            hp *= h;
        }
        y = ny;
        v = nv;
    }
    (y, v)
}

#[test]
fn c02_multiplier_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    let mut near_locus = 0;
    for k in 0..200 {
        let sigma: f64 = rng.gen_range(1.0..3.0);
        let delta: f64 = if k % 10 == 0 {
            sigma
        } else {
            rng.gen_range(0.55 * sigma..sigma)
        };
        let params = ModelParams::new(sigma, delta, 1.0, 1).unwrap();
        let xi = if k % 4 == 1 && 4.0 * delta != 2.0 * sigma && delta != sigma {
            near_locus += 1;
            let star = 4f64.powf(1.0 / (4.0 * delta - 2.0 * sigma));
            star * (1.0 + rng.gen_range(-1e-6..1e-6))
        } else {
            rng.gen_range(0.02..3.0)
        };
        let b = xi.powf(2.0 * delta);
        let c = xi.powf(2.0 * sigma);
        // near the locus both roots sit at -b/2; keep e^{-bt/2} out of the subnormal range
        let t: f64 = rng.gen_range(0.01..6.0f64).min(600.0 / b);
        let got = multipliers(&params, t, xi).unwrap();
        let (k0, dk0) = taylor_oracle(b, c, t, 1.0, 0.0);
        let (k1, dk1) = taylor_oracle(b, c, t, 0.0, 1.0);
        // the multipliers can cross zero; errors are measured against the size
        // of the whole (K, ∂ₜK/|ξ|^σ) pair
        let w = c.sqrt().max(1e-300);
        let s0 = k0.abs() + dk0.abs() / w;
        let s1 = k1.abs() + dk1.abs() / w;
        let e0 = (got.k0 - k0).abs().max((got.dt_k0 - dk0).abs() / w) / s0;
        let e1 = (got.k1 - k1).abs().max((got.dt_k1 - dk1).abs() / w) / s1;
        worst = worst.max(e0).max(e1);
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = worst <= 1e-8 && elapsed < 10.0;
    report(
        2,
        pass,
        &format!(
            "200 samples ({near_locus} near the double-root locus), worst relative error {worst:.2e}, {elapsed:.2} s"
        ),
    );
    assert!(pass);
}

// ---------------------------------------------------------------- 3

#[test]
fn c03_exponent_table_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0usize;
    let mut failures = Vec::new();
    let mut inequality_only = 0usize;
    for _ in 0..500 {
        let den = rng.gen_range(1..=8);
        let sigma = Rational::frac(rng.gen_range(den..=5 * den), den);
        let visco = rng.gen_bool(0.2);
        let delta = if visco {
            sigma
        } else {
            // δ ∈ (σ/2, σ)
            let f = Rational::frac(rng.gen_range(1..=19), 20);
            sigma * (Rational::ONE + f) / Rational::int(2)
        };
        let n = rng.gen_range(1..=5u32);
        let a = Rational::frac(rng.gen_range(0..=12), rng.gen_range(1..=4));
        let params = ModelParams::exact(sigma, delta, n).unwrap();
        let mut pairs = vec![(EstimateId::LrLow, EstimateId::L1Low, EstimateId::LinfLow)];
        if !visco {
            pairs.push((EstimateId::LrAll, EstimateId::L1All, EstimateId::LinfAll));
        }
        for (lr, l1, linf) in pairs {
            for kind in [KernelKind::K0, KernelKind::K1] {
                for regime in [TimeRegime::SmallT, TimeRegime::LargeT] {
                    let e = |id, inv_r| {
                        theoretical_exponent_exact(&EstimateSpec::kernel(id, kind, regime), &params, inv_r, a)
                            .unwrap()
                            .power()
                            .unwrap()
                    };
                    let at_one = e(lr, Some(Rational::ONE));
                    let at_inf = e(lr, Some(Rational::ZERO));
                    let (e1, einf) = (e(l1, None), e(linf, None));
                    checked += 2;
                    if at_inf != einf {
                        failures.push(format!("{lr:?} r=inf {kind:?} {regime:?}: {at_inf} vs {einf}"));
                    }
                    let all_k1_small =
                        lr == EstimateId::LrAll && kind == KernelKind::K1 && regime == TimeRegime::SmallT;
                    if all_k1_small {
                        // 1 - a/(2(σ-δ)) against 1 - a/(2δ); σ - δ < δ makes the L^r row the smaller
                        inequality_only += 1;
                        if at_one > e1 {
                            failures.push(format!("{lr:?} r=1 K1 small t above L1 row: {at_one} vs {e1}"));
                        }
                    } else if at_one != e1 {
                        failures.push(format!("{lr:?} r=1 {kind:?} {regime:?}: {at_one} vs {e1}"));
                    }
                }
            }
        }
    }
    let pass = failures.is_empty();
    report(
        3,
        pass,
        &format!(
            "{checked} exact endpoint identities over 500 rational draws; {inequality_only} all-frequency K1 small-t r=1 rows differ in the derivative correction and are compared by <= {:?}",
            failures.iter().take(3).collect::<Vec<_>>()
        ),
    );
    assert!(pass);
}

// ---------------------------------------------------------------- 4

#[test]
fn c04_kernel_norm_bounds() {
    let start = Instant::now();
    let triples = [(1u32, "2", "3/2"), (2, "2", "3/2"), (1, "3/2", "1")];
    let large_times = log_spaced(1.0, 100.0, 12);
    let small_times = log_spaced(1e-3, 1.0, 10);
    let options = FitOptions {
        regressor: Regressor::T,
        ..FitOptions::default()
    };
    let mut lines = Vec::new();
    let mut pass = true;
    for (n, sigma, delta) in triples {
        let params = ModelParams::exact(r(sigma), r(delta), n).unwrap();
        for a in [0.0, params.sigma] {
            for kind in [KernelKind::K0, KernelKind::K1] {
                let exponent = |regime| {
                    theoretical_exponent(&EstimateSpec::kernel(EstimateId::L1Low, kind, regime), &params, None, a)
                        .unwrap()
                        .power()
                        .unwrap()
                };
                let large = kernel_norms(&params, a, kind, Zone::Low, &large_times).unwrap();
                let fit = fit_decay_exponent(
                    &large.times,
                    &large.l1_values,
                    (1.0, 100.0),
                    exponent(TimeRegime::LargeT),
                    &options,
                )
                .unwrap();
                let fit_ok = fit.fitted_exponent <= fit.theoretical_exponent + 0.1;

                // calibrate the small-t constant on [0.1, 1], then require the
                // same constant (up to 1.5) on [1e-3, 0.1]
                let small = kernel_norms(&params, a, kind, Zone::Low, &small_times).unwrap();
                let e_small = exponent(TimeRegime::SmallT);
                let ratios: Vec<f64> = small
                    .times
                    .iter()
                    .zip(&small.l1_values)
                    .map(|(t, v)| v / t.powf(e_small))
                    .collect();
                let calibrated = small
                    .times
                    .iter()
                    .zip(&ratios)
                    .filter(|(t, _)| **t >= 0.1)
                    .map(|(_, r)| *r)
                    .fold(0.0, f64::max);
                let worst = ratios.iter().copied().fold(0.0, f64::max);
                let envelope_ok = worst <= 1.5 * calibrated;

                pass &= fit_ok && envelope_ok;
                lines.push(format!(
                    "n={n} sigma={sigma} delta={delta} a={a} {kind:?}: fit {:.3} vs {:.3}, small-t C={calibrated:.3} worst {worst:.3}",
                    fit.fitted_exponent, fit.theoretical_exponent
                ));
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        4,
        pass,
        &format!("12 low-frequency kernel series within slack 0.1 and small-t envelopes ({elapsed:.1} s)"),
    );
    for l in &lines {
        let _ = writeln!(std::io::stdout().lock(), "    {l}");
    }
    assert!(pass);
}

// ---------------------------------------------------------------- 5

#[test]
fn c05_linear_decay_bounds() {
    let start = Instant::now();
    let mut pass = true;
    let mut lines = Vec::new();
    for (q, m) in [("2", "1"), ("2", "2")] {
        let config = LinearDecayConfig {
            params: ParamsConfig {
                sigma: r("2"),
                delta: r("3/2"),
                n: 1,
                mu: Rational::ONE,
            },
            grid: None,
            data: GaussianData {
                amplitude_u0: 1.0,
                amplitude_u1: 1.0,
                width: 1.0,
            },
            q: r(q),
            m: r(m),
            times: Samples::Range(SampleRange {
                start: 1.0,
                stop: 30.0,
                count: 88,
                spacing: Spacing::Linear,
            }),
            window: None,
            channels: None,
        };
        let (_, result) = cmd_linear_decay(&config).unwrap();
        for c in &result.channels {
            let fit = c.fit.as_ref().expect("window holds enough samples");
            let bound = c.theoretical_exponent.unwrap();
            let ok = fit.fitted_exponent <= bound + 0.1;
            pass &= ok;
            lines.push(format!(
                "(q,m)=({q},{m}) {}: fit {:.3} vs bound {:.3} over [{:.1}, {:.1}]",
                c.channel, fit.fitted_exponent, bound, fit.window.0, fit.window.1
            ));
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    pass &= elapsed < 60.0;
    report(5, pass, &format!("6 channel fits within slack 0.1 ({elapsed:.1} s)"));
    for l in &lines {
        let _ = writeln!(std::io::stdout().lock(), "    {l}");
    }
    assert!(pass);
}

// ---------------------------------------------------------------- 6

fn high_frequency_slope(points: usize) -> (f64, bool) {
    let params = ModelParams::exact(Rational::ONE, Rational::ONE, 1).unwrap();
    let grid = Grid::new(1, points, 80.0).unwrap();
    let g = SpectralField::gaussian(grid, 1.0, 1.0);
    let data = StatePair::new(g.clone(), g, 0.0).unwrap();
    let times: Vec<f64> = (0..=40).map(|k| 1.0 + 0.5 * k as f64).collect();
    let logs: Vec<f64> = times
        .iter()
        .map(|&t| {
            let state = evolve_linear(&params, &data, t).unwrap();
            let (_, high) = split_frequencies(&state.u);
            lq_norm(&high, 2.0).unwrap().ln()
        })
        .collect();
    let tm = times.iter().sum::<f64>() / times.len() as f64;
    let lm = logs.iter().sum::<f64>() / logs.len() as f64;
    let sxy: f64 = times.iter().zip(&logs).map(|(t, l)| (t - tm) * (l - lm)).sum();
    let sxx: f64 = times.iter().map(|t| (t - tm).powi(2)).sum();
    let slope = sxy / sxx;
    // decreasing at least linearly: every later value sits below the line
    // through the first sample with the fitted slope halved
    let linear = times
        .iter()
        .zip(&logs)
        .all(|(t, l)| *l <= logs[0] + 0.5 * slope * (t - times[0]) + 1e-12);
    (slope, linear)
}

#[test]
fn c06_visco_elastic_high_frequency_decay() {
    let (coarse, lin_c) = high_frequency_slope(1 << 13);
    let (fine, lin_f) = high_frequency_slope(1 << 14);
    let stable = (coarse - fine).abs() <= 0.2 * fine.abs();
    let pass = coarse < 0.0 && fine < 0.0 && lin_c && lin_f && stable;
    report(
        6,
        pass,
        &format!("log ||u_high||_2 slopes {coarse:.4} (N=2^13) and {fine:.4} (N=2^14)"),
    );
    assert!(pass);
}

// ---------------------------------------------------------------- 7

#[test]
fn c07_gevrey_smoothing() {
    let params = ModelParams::exact(r("2"), r("3/2"), 1).unwrap();
    let times: Vec<f64> = (1..=10).map(|t| t as f64).collect();
    let fit = gevrey_fit(&params, &times, &[4.0, 8.0, 16.0, 32.0]).unwrap();
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for xi in log_spaced(4.0, 32.0, 25) {
        for t in log_spaced(1.0, 10.0, 19) {
            let k0 = multipliers(&params, t, xi).unwrap().k0.abs();
            let ratio = -k0.ln() / (xi.powf(2.0 * (params.sigma - params.delta)) * t);
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
    }
    let pass = fit.lower_bound > 0.0 && lo >= 0.4 && hi <= 1.2;
    report(
        7,
        pass,
        &format!(
            "c = {:.4} (lower bound {:.4}); ratio range [{lo:.4}, {hi:.4}]",
            fit.c, fit.lower_bound
        ),
    );
    assert!(pass);
}

// ---------------------------------------------------------------- 8

/// Composite Simpson after `1 + τ = e^s` on each half of `[0, t]`.
fn lemma_oracle(alpha: f64, beta: f64, t: f64) -> f64 {
    let half = |p: f64, q: f64| {
        // ∫₀^{t/2} (1+τ)^{-p} (1+t-τ)^{-q} dτ
        let top = (1.0 + 0.5 * t).ln();
        let panels = 4000;
        let h = top / panels as f64;
        let f = |s: f64| {
            let tau = s.exp() - 1.0;
            (1.0 + tau).powf(1.0 - p) * (1.0 + t - tau).powf(-q)
        };
        let mut sum = f(0.0) + f(top);
        for k in 1..panels {
            sum += f(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        sum * h / 3.0
    };
    half(beta, alpha) + half(alpha, beta)
}

#[test]
fn c08_integral_lemma() {
    let times = log_spaced(1.0, 1e4, 25);
    let cases = [
        ((2.0, 0.5), LemmaRegime::MaxAboveOne),
        ((1.0, 1.0), LemmaRegime::MaxEqualsOne),
        ((0.0, 0.0), LemmaRegime::MaxBelowOne),
        ((0.5, 0.25), LemmaRegime::MaxBelowOne),
    ];
    let mut pass = true;
    let mut lines = Vec::new();
    for ((alpha, beta), regime) in cases {
        let rep = integral_lemma_check(alpha, beta, &times);
        let oracle_err = rep
            .samples
            .iter()
            .map(|s| (s.integral - lemma_oracle(alpha, beta, s.t)).abs() / s.integral)
            .fold(0.0, f64::max);
        let ok = rep.regime == regime && rep.bounded && oracle_err < 1e-8;
        pass &= ok;
        lines.push(format!(
            "({alpha}, {beta}) {regime:?}: ratio in [{:.3}, {:.3}], quadrature vs oracle {oracle_err:.1e}",
            rep.min_ratio, rep.max_ratio
        ));
    }
    report(8, pass, "four exponent pairs bounded over t in [1, 1e4]");
    for l in &lines {
        let _ = writeln!(std::io::stdout().lock(), "    {l}");
    }
    assert!(pass);
}

// ---------------------------------------------------------------- 9

struct SmallDataRun {
    stable: bool,
    ratio: f64,
    amplitude: f64,
}

#[test]
fn c09_semilinear_small_data() {
    let start = Instant::now();
    let params = ModelParams::exact(r("2"), r("3/2"), 1).unwrap();
    let setup = NormSetup::new(r("2"), r("1")).unwrap();
    let s = Rational::int(3);
    // every theorem's admissible set is empty for n = 1; p = q/m = 2 is the
    // smallest power the Gagliardo-Nirenberg range allows
    let admissible = admissible_p(TheoremId::T2_1, &params, &setup, Some(s)).unwrap();
    let weights = WeightSet::for_theorem(TheoremId::T2_1, &params, &setup, Some(s)).unwrap();
    let nonlinearity = Nonlinearity::power(Target::U, 2.0).unwrap();
    let grid = Grid::default_for(1).unwrap();
    let times: Vec<f64> = (1..=200).map(|k| k as f64).collect();
    let control = StepControl {
        growth_cap: Some(2.0),
        ..StepControl::default()
    };
    let attempt = |eps: f64| {
        let g = SpectralField::gaussian(grid, eps, 1.0);
        let data = StatePair::new(g.clone(), g, 0.0).unwrap();
        let rep = run(&params, &data, &nonlinearity, &weights, &times, &control).unwrap();
        let x1 = rep.x_norm_at(1.0).unwrap();
        let xe = rep.final_x_norm().unwrap();
        SmallDataRun {
            stable: !rep.blow_up && !rep.capped && rep.final_time == 200.0 && xe <= 2.0 * x1,
            ratio: xe / x1,
            amplitude: rep.records.last().unwrap().max_abs_u,
        }
    };

    // log-bisection between a stable and an unstable amplitude
    let (mut lo, mut hi) = (1e-6f64, 1e-4f64);
    let mut bracket_ok = attempt(lo).stable && !attempt(hi).stable;
    for _ in 0..5 {
        let mid = (lo * hi).sqrt();
        if attempt(mid).stable {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // the X-norm criterion alone admits data whose undamped torus zero mode is
    // already nonlinear at t = 200; step a decade inside the bracket
    let eps = 0.1 * lo;
    let full = attempt(eps);
    let halved = attempt(0.5 * eps);
    bracket_ok &= full.stable && halved.stable;
    let factor = halved.amplitude / full.amplitude;
    let elapsed = start.elapsed().as_secs_f64();
    let pass = bracket_ok && full.ratio <= 2.0 && (0.4..=0.6).contains(&factor) && elapsed < 300.0;
    report(
        9,
        pass,
        &format!(
            "eps = {eps:.3e} (stable up to {lo:.3e}, unstable above {hi:.3e}); X(200)/X(1) = {:.3}; halving eps scales amplitude by {factor:.3}; p = 2 (admissible set for n = 1: {}); {elapsed:.0} s",
            full.ratio, admissible.result_display
        ),
    );
    assert!(pass);
}

// ---------------------------------------------------------------- 10

fn random_field(grid: Grid, rng: &mut ChaCha8Rng) -> SpectralField {
    let values = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    SpectralField::from_values(grid, values).unwrap()
}

#[test]
fn c10_numerics_hygiene() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut parseval, mut semigroup, mut reality, mut partition) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for case in 0..60 {
        let dim = 1 + (case % 3) as u32;
        let pts = [256, 32, 16][dim as usize - 1];
        let grid = Grid::new(dim, pts, rng.gen_range(5.0..40.0)).unwrap();
        let sigma: f64 = rng.gen_range(1.0..3.0);
        let delta = if case % 5 == 0 {
            sigma
        } else {
            rng.gen_range(0.55 * sigma..sigma)
        };
        let params = ModelParams::new(sigma, delta, 1.0, dim).unwrap();
        let f = random_field(grid, &mut rng);

        let l2 = lq_norm(&f, 2.0).unwrap();
        parseval = parseval.max((l2 - f.l2_norm_spectral()).abs() / l2);

        let data = StatePair::new(f.clone(), random_field(grid, &mut rng), 0.0).unwrap();
        let (t1, t2) = (rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0));
        let one = evolve_linear(&params, &data, t1 + t2).unwrap();
        let two = evolve_linear(&params, &evolve_linear(&params, &data, t1).unwrap(), t1 + t2).unwrap();
        let peak = one
            .u
            .values()
            .iter()
            .chain(one.ut.values())
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(1e-300);
        for (a, b) in one
            .u
            .values()
            .iter()
            .zip(two.u.values())
            .chain(one.ut.values().iter().zip(two.ut.values()))
        {
            semigroup = semigroup.max((a - b).abs() / peak);
        }
        let (_, defect) = SpectralField::from_coefficients_with_defect(grid, one.u.coefficients().to_vec()).unwrap();
        reality = reality.max(defect);

        let (low, high) = split_frequencies(&f);
        for ((a, b), c) in low.values().iter().zip(high.values()).zip(f.values()) {
            partition = partition.max((a + b - c).abs());
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = parseval <= 1e-12 && semigroup <= 1e-12 && reality <= 1e-12 && partition <= 1e-14 && elapsed < 30.0;
    report(
        10,
        pass,
        &format!(
            "60 random fields: Parseval {parseval:.1e}, semigroup {semigroup:.1e}, imaginary part {reality:.1e}, partition {partition:.1e} ({elapsed:.2} s)"
        ),
    );
    assert!(pass);
}
