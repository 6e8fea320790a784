//! Low/high frequency partition of unity.
//!
//! `χ(ρ) = 1` for `ρ ≤ 1/2`, `χ(ρ) = 0` for `ρ ≥ 1`, with a `C^∞` transition
//! built from `e^{-1/s}` in between.

pub const CUTOFF_INNER: f64 = 0.5;
pub const CUTOFF_OUTER: f64 = 1.0;

fn bump_tail(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

/// Smooth step rising from 0 at `s = 0` to 1 at `s = 1`.
pub fn smooth_step(s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if s >= 1.0 {
        return 1.0;
    }
    let a = bump_tail(s);
    let b = bump_tail(1.0 - s);
    a / (a + b)
}

/// `χ(|ξ|)`
pub fn chi(rho: f64) -> f64 {
    1.0 - smooth_step((rho - CUTOFF_INNER) / (CUTOFF_OUTER - CUTOFF_INNER))
}

/// `1 - χ(|ξ|)`, computed directly so that the high part is exact where `χ ≈ 1`.
pub fn chi_complement(rho: f64) -> f64 {
    smooth_step((rho - CUTOFF_INNER) / (CUTOFF_OUTER - CUTOFF_INNER))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateaus() {
        assert_eq!(chi(0.0), 1.0);
        assert_eq!(chi(0.5), 1.0);
        assert_eq!(chi(1.0), 0.0);
        assert_eq!(chi(7.0), 0.0);
        assert!((chi(0.75) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn monotone_and_partition() {
        let mut prev = 1.0;
        for i in 0..=1000 {
            let rho = 0.4 + 0.7 * i as f64 / 1000.0;
            let c = chi(rho);
            assert!(c <= prev + 1e-15);
            assert!((c + chi_complement(rho) - 1.0).abs() < 1e-15);
            prev = c;
        }
    }

    #[test]
    fn flat_at_the_ends() {
        // all derivatives vanish at the transition endpoints
        let h = 1e-3;
        assert!(chi_complement(0.5 + h) < 1e-100);
        assert!(chi(1.0 - h) < 1e-100);
    }
}
