//! Dense 1D oracle for the low-frequency kernel norms: direct cosine
//! transform on a Simpson grid, brute-force `∫|K|` and an analytic `c/x²` tail.

use sigma_evolve::cutoff::chi;
use sigma_evolve::hankel::{kernel_norms, KernelKind, Zone};
use sigma_evolve::symbols::multipliers;
use sigma_evolve::{ModelParams, Rational};

fn simpson(a: f64, b: f64, intervals: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = (b - a) / intervals as f64;
    let mut sum = f(a) + f(b);
    for k in 1..intervals {
        sum += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * h / 3.0
}

struct Symbol {
    xi: Vec<f64>,
    weights: Vec<f64>,
    values: Vec<f64>,
}

impl Symbol {
    fn new(params: &ModelParams, kind: KernelKind, t: f64, intervals: usize) -> Self {
        let h = 1.0 / intervals as f64;
        let mut xi = Vec::new();
        let mut weights = Vec::new();
        let mut values = Vec::new();
        for k in 0..=intervals {
            let x = k as f64 * h;
            let w = if k == 0 || k == intervals {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let m = multipliers(params, t, x).unwrap();
            let m = match kind {
                KernelKind::K0 => m.k0,
                KernelKind::K1 => m.k1,
            };
            xi.push(x);
            weights.push(w * h / 3.0);
            values.push(chi(x) * m);
        }
        Self { xi, weights, values }
    }

    /// `K(x) = (2π)^{-1/2} · 2∫₀¹ cos(xξ) χ(ξ) K̂(t,ξ) dξ` (symmetric normalization)
    fn kernel(&self, x: f64) -> f64 {
        let mut s = 0.0;
        for ((xi, w), v) in self.xi.iter().zip(&self.weights).zip(&self.values) {
            s += w * v * (x * xi).cos();
        }
        2.0 * s / (2.0 * std::f64::consts::PI).sqrt()
    }
}

fn oracle_l1(params: &ModelParams, kind: KernelKind, t: f64) -> f64 {
    let symbol = Symbol::new(params, kind, t, 12_000);
    let far = 2000.0;
    let near = simpson(0.0, 50.0, 2500, |x| symbol.kernel(x).abs());
    let mid = simpson(50.0, far, 7800, |x| symbol.kernel(x).abs());
    // even extension of f(|ξ|) with f = f₀ + f₁|ξ| + …: K(x) ~ -2f₁/(√(2π) x²)
    let eps = 1e-6;
    let f = |x: f64| {
        let m = multipliers(params, t, x).unwrap();
        match kind {
            KernelKind::K0 => m.k0,
            KernelKind::K1 => m.k1,
        }
    };
    let slope = (f(eps) - f(0.0)) / eps;
    let tail = 2.0 * slope.abs() / ((2.0 * std::f64::consts::PI).sqrt() * far);
    2.0 * (near + mid + tail)
}

#[test]
fn low_frequency_l1_matches_dense_oracle() {
    let params = ModelParams::exact(Rational::int(2), Rational::frac(3, 2), 1).unwrap();
    let times = [2.0, 10.0];
    for kind in [KernelKind::K0, KernelKind::K1] {
        let series = kernel_norms(&params, 0.0, kind, Zone::Low, &times).unwrap();
        for (t, got) in times.iter().zip(&series.l1_values) {
            let want = oracle_l1(&params, kind, *t);
            let rel = (got - want).abs() / want;
            assert!(rel < 2e-3, "{kind:?} t={t}: {got} vs {want} ({rel:.2e})");
        }
    }
}
