//! Scaled Bessel functions `J̃_μ(s) = J_μ(s) / s^μ` for half-integer orders.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use super::HankelError;

/// Power series below this argument, Hankel asymptotic expansion above.
pub const SERIES_SWITCH: f64 = 12.0;

/// `Γ(μ + 1)` for `μ ∈ {-1/2, 0, 1/2, 1, ...}`.
fn gamma_shifted(mu: f64) -> f64 {
    let twice = (2.0 * mu).round() as i64;
    if twice % 2 == 0 {
        (1..=(twice / 2)).map(|k| k as f64).product()
    } else {
        // Γ(1/2) = √π, then Γ(x+1) = xΓ(x)
        let mut g = PI.sqrt();
        let mut x = 0.5;
        while x < mu + 0.75 {
            g *= x;
            x += 1.0;
        }
        g
    }
}

fn check_order(mu: f64) -> Result<(), HankelError> {
    let twice = 2.0 * mu;
    if !(mu >= -0.5) || (twice - twice.round()).abs() > 1e-12 {
        return Err(HankelError::UnsupportedOrder(mu));
    }
    Ok(())
}

/// `J̃_μ(s)` for half-integer `μ ≥ -1/2` and `s ≥ 0`.
pub fn jtilde(mu: f64, s: f64) -> Result<f64, HankelError> {
    check_order(mu)?;
    if !(s >= 0.0) {
        return Err(HankelError::NegativeArgument(s));
    }
    Ok(jtilde_unchecked(mu, s))
}

pub(crate) fn jtilde_unchecked(mu: f64, s: f64) -> f64 {
    let c = (2.0 / PI).sqrt();
    if mu == -0.5 {
        return c * s.cos();
    }
    if mu == 0.5 {
        return c * crate::symbols::sinc(s);
    }
    if s <= SERIES_SWITCH {
        series(mu, s)
    } else {
        asymptotic(mu, s) / s.powf(mu)
    }
}

fn series(mu: f64, s: f64) -> f64 {
    let q = -0.25 * s * s;
    let mut term = 2f64.powf(-mu) / gamma_shifted(mu);
    let mut sum = term;
    for k in 1..200 {
        let k = k as f64;
        term *= q / (k * (k + mu));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs().max(1e-300) && k > 0.25 * s * s / (1.0 + mu.abs()) {
            break;
        }
    }
    sum
}

/// Unscaled `J_μ(s)` from the Hankel expansion, truncated at its smallest term.
fn asymptotic(mu: f64, s: f64) -> f64 {
    let four_mu2 = 4.0 * mu * mu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0f64;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        term *= (four_mu2 - odd * odd) / (k as f64 * 8.0 * s);
        if term.abs() >= last || term == 0.0 {
            break;
        }
        last = term.abs();
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
    }
    let chi = s - mu * FRAC_PI_2 - FRAC_PI_4;
    (2.0 / (PI * s)).sqrt() * (p * chi.cos() - q * chi.sin())
}
