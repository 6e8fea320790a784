//! Linear evolution on the torus `[0, L)^n` by pointwise multipliers in
//! discrete Fourier space.
//!
//! Coefficients are the unnormalized forward DFT `c_k = Σ_j u_j e^{-2πi j·k/N}`;
//! mode `k` carries the frequency `2πk/L` with `k ∈ [-N/2, N/2)` per axis.

pub(crate) mod fft;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cutoff::chi;
use crate::model::ModelParams;
use crate::parallel::par_map;
use crate::symbols::{multipliers_unchecked, MultiplierValue};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PropagatorError {
    #[error("grid dimension must be 1, 2 or 3 (got {0})")]
    BadDimension(u32),
    #[error("points per axis must be a power of two >= 2 (got {0})")]
    BadPoints(usize),
    #[error("box length must be positive (got {0})")]
    BadLength(f64),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("array length {got} does not match the grid ({expected})")]
    LengthMismatch { got: usize, expected: usize },
    #[error("target time {target} precedes the state time {current}")]
    BackwardTime { target: f64, current: f64 },
    #[error("derivative order must be non-negative (got {0})")]
    NegativeOrder(f64),
    #[error("norm exponent must lie in [1, inf] (got {0})")]
    BadExponent(f64),
    #[error("symbols are normalized to mu = 1")]
    MuNotNormalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub n: u32,
    pub points_per_axis: usize,
    pub box_length: f64,
}

pub const DEFAULT_BOX_LENGTH: f64 = 80.0;

impl Grid {
    pub fn new(n: u32, points_per_axis: usize, box_length: f64) -> Result<Self, PropagatorError> {
        if !(1..=3).contains(&n) {
            return Err(PropagatorError::BadDimension(n));
        }
        if points_per_axis < 2 || !points_per_axis.is_power_of_two() {
            return Err(PropagatorError::BadPoints(points_per_axis));
        }
        if !(box_length > 0.0) || !box_length.is_finite() {
            return Err(PropagatorError::BadLength(box_length));
        }
        Ok(Grid {
            n,
            points_per_axis,
            box_length,
        })
    }

    /// `2^14`, `512²` or `128³` points on `[0, 80)^n`.
    pub fn default_for(n: u32) -> Result<Self, PropagatorError> {
        let points = match n {
            1 => 1 << 14,
            2 => 512,
            3 => 128,
            other => return Err(PropagatorError::BadDimension(other)),
        };
        Grid::new(n, points, DEFAULT_BOX_LENGTH)
    }

    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.n)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.box_length / self.points_per_axis as f64
    }

    /// Volume element `h^n` of the Riemann sums.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.n as i32)
    }

    /// Signed mode number of FFT index `i`.
    pub fn mode(&self, i: usize) -> i64 {
        let n = self.points_per_axis;
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// Per-axis indices of a flat row-major position.
    pub fn unflatten(&self, mut flat: usize) -> [usize; 3] {
        let mut out = [0usize; 3];
        for a in (0..self.n as usize).rev() {
            out[a] = flat % self.points_per_axis;
            flat /= self.points_per_axis;
        }
        out
    }

    /// `|2πk/L|` for every coefficient, in storage order.
    pub fn frequency_magnitudes(&self) -> Vec<f64> {
        let scale = 2.0 * PI / self.box_length;
        (0..self.len())
            .map(|flat| {
                let idx = self.unflatten(flat);
                let sq: f64 = idx[..self.n as usize]
                    .iter()
                    .map(|&i| {
                        let k = self.mode(i) as f64 * scale;
                        k * k
                    })
                    .sum();
                sq.sqrt()
            })
            .collect()
    }

    /// Physical coordinates `x_j = j L / N` of a flat position.
    pub fn coordinates(&self, flat: usize) -> [f64; 3] {
        let idx = self.unflatten(flat);
        let h = self.spacing();
        let mut x = [0.0; 3];
        for a in 0..self.n as usize {
            x[a] = idx[a] as f64 * h;
        }
        x
    }

    /// Largest resolved frequency `π N / L`.
    pub fn nyquist(&self) -> f64 {
        PI * self.points_per_axis as f64 / self.box_length
    }
}

/// Real grid function together with its DFT coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    values: Vec<f64>,
    coefficients: Vec<Complex64>,
}

impl SpectralField {
    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self, PropagatorError> {
        if values.len() != grid.len() {
            return Err(PropagatorError::LengthMismatch {
                got: values.len(),
                expected: grid.len(),
            });
        }
        let mut coefficients: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft::transform(&mut coefficients, grid.points_per_axis, grid.n, true);
        Ok(SpectralField {
            grid,
            values,
            coefficients,
        })
    }

    /// Field from coefficients; the imaginary part of the inverse transform is dropped.
    pub fn from_coefficients(grid: Grid, coefficients: Vec<Complex64>) -> Result<Self, PropagatorError> {
        Self::from_coefficients_with_defect(grid, coefficients).map(|(f, _)| f)
    }

    /// As [`from_coefficients`](Self::from_coefficients), also returning
    /// `max|Im u| / max|Re u|` of the inverse transform.
    pub fn from_coefficients_with_defect(
        grid: Grid,
        coefficients: Vec<Complex64>,
    ) -> Result<(Self, f64), PropagatorError> {
        if coefficients.len() != grid.len() {
            return Err(PropagatorError::LengthMismatch {
                got: coefficients.len(),
                expected: grid.len(),
            });
        }
        let mut work = coefficients.clone();
        fft::transform(&mut work, grid.points_per_axis, grid.n, false);
        let scale = 1.0 / grid.len() as f64;
        let mut max_re = 0.0f64;
        let mut max_im = 0.0f64;
        let values: Vec<f64> = work
            .iter()
            .map(|c| {
                max_re = max_re.max(c.re.abs());
                max_im = max_im.max(c.im.abs());
                c.re * scale
            })
            .collect();
        let defect = if max_re > 0.0 { max_im / max_re } else { max_im };
        Ok((
            SpectralField {
                grid,
                values,
                coefficients,
            },
            defect,
        ))
    }

    pub fn zeros(grid: Grid) -> Self {
        SpectralField {
            grid,
            values: vec![0.0; grid.len()],
            coefficients: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_fn<F: Fn(&[f64]) -> f64>(grid: Grid, f: F) -> Self {
        let values = (0..grid.len())
            .map(|flat| {
                let x = grid.coordinates(flat);
                f(&x[..grid.n as usize])
            })
            .collect();
        Self::from_values(grid, values).expect("length matches grid")
    }

    /// `amplitude · e^{-|x - c|²/(2 width²)}` centred in the box.
    pub fn gaussian(grid: Grid, amplitude: f64, width: f64) -> Self {
        let centre = 0.5 * grid.box_length;
        Self::from_fn(grid, |x| {
            let r2: f64 = x.iter().map(|&xi| (xi - centre).powi(2)).sum();
            amplitude * (-0.5 * r2 / (width * width)).exp()
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Coefficients multiplied by a real symbol of `|k|`.
    pub fn apply_symbol<F: Fn(f64) -> f64 + Sync + Send>(&self, symbol: F) -> Self {
        let freqs = self.grid.frequency_magnitudes();
        let coefficients = self
            .coefficients
            .iter()
            .zip(&freqs)
            .map(|(c, &k)| c * symbol(k))
            .collect();
        Self::from_coefficients(self.grid, coefficients).expect("same grid")
    }

    pub fn scaled(&self, factor: f64) -> Self {
        SpectralField {
            grid: self.grid,
            values: self.values.iter().map(|v| v * factor).collect(),
            coefficients: self.coefficients.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, PropagatorError> {
        if self.grid != other.grid {
            return Err(PropagatorError::GridMismatch);
        }
        Ok(SpectralField {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
            coefficients: self
                .coefficients
                .iter()
                .zip(&other.coefficients)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Max deviation from conjugate symmetry `c_{-k} = conj(c_k)`, relative to `max|c|`.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let n = self.grid.points_per_axis;
        let dim = self.grid.n as usize;
        let mut worst = 0.0f64;
        let mut peak = 0.0f64;
        for flat in 0..self.grid.len() {
            let idx = self.grid.unflatten(flat);
            let mut mirror = 0usize;
            for &i in &idx[..dim] {
                mirror = mirror * n + (n - i) % n;
            }
            worst = worst.max((self.coefficients[flat] - self.coefficients[mirror].conj()).norm());
            peak = peak.max(self.coefficients[flat].norm());
        }
        if peak > 0.0 {
            worst / peak
        } else {
            0.0
        }
    }

    /// `‖u‖_{L²}` from the coefficients (discrete Parseval).
    pub fn l2_norm_spectral(&self) -> f64 {
        let sum: f64 = self.coefficients.iter().map(|c| c.norm_sqr()).sum();
        (self.grid.cell_volume() * sum / self.grid.len() as f64).sqrt()
    }

    /// Fraction of `‖u‖²_{L²}` within `L/8` of the box faces.
    pub fn edge_mass_fraction(&self) -> f64 {
        let l = self.grid.box_length;
        let mut mass = 0.0;
        let mut edge = 0.0;
        for (flat, v) in self.values.iter().enumerate() {
            let x = self.grid.coordinates(flat);
            let near = x[..self.grid.n as usize]
                .iter()
                .any(|&xi| xi < 0.125 * l || xi > 0.875 * l);
            mass += v * v;
            if near {
                edge += v * v;
            }
        }
        if mass > 0.0 {
            edge / mass
        } else {
            0.0
        }
    }

    /// RMS distance from the box centre weighted by `|u|²`.
    pub fn spatial_spread(&self) -> f64 {
        let centre = 0.5 * self.grid.box_length;
        let mut mass = 0.0;
        let mut moment = 0.0;
        for (flat, v) in self.values.iter().enumerate() {
            let x = self.grid.coordinates(flat);
            let r2: f64 = x[..self.grid.n as usize].iter().map(|&xi| (xi - centre).powi(2)).sum();
            mass += v * v;
            moment += v * v * r2;
        }
        if mass > 0.0 {
            (moment / mass).sqrt()
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatePair {
    pub u: SpectralField,
    pub ut: SpectralField,
    pub t: f64,
}

impl StatePair {
    pub fn new(u: SpectralField, ut: SpectralField, t: f64) -> Result<Self, PropagatorError> {
        if u.grid != ut.grid {
            return Err(PropagatorError::GridMismatch);
        }
        if !(t >= 0.0) {
            return Err(PropagatorError::BackwardTime {
                target: t,
                current: 0.0,
            });
        }
        Ok(StatePair { u, ut, t })
    }

    pub fn grid(&self) -> &Grid {
        self.u.grid()
    }
}

/// `K̂₀, K̂₁` and their time derivatives on every lattice frequency for one step.
#[derive(Debug, Clone)]
pub struct MultiplierTable {
    pub dt: f64,
    pub values: Vec<MultiplierValue>,
}

impl MultiplierTable {
    pub fn new(params: &ModelParams, grid: &Grid, dt: f64) -> Result<Self, PropagatorError> {
        if params.mu != 1.0 {
            return Err(PropagatorError::MuNotNormalized);
        }
        let freqs = grid.frequency_magnitudes();
        let values = par_map(&freqs, |&k| multipliers_unchecked(params, dt, k));
        Ok(MultiplierTable { dt, values })
    }

    /// `(v, v_t)` coefficients after one step of the free evolution.
    pub fn propagate(&self, u: &[Complex64], ut: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let mut out_u = Vec::with_capacity(u.len());
        let mut out_ut = Vec::with_capacity(u.len());
        for ((m, a), b) in self.values.iter().zip(u).zip(ut) {
            out_u.push(a * m.k0 + b * m.k1);
            out_ut.push(a * m.dt_k0 + b * m.dt_k1);
        }
        (out_u, out_ut)
    }
}

pub fn evolve_linear(params: &ModelParams, data: &StatePair, t_target: f64) -> Result<StatePair, PropagatorError> {
    if data.u.grid != data.ut.grid {
        return Err(PropagatorError::GridMismatch);
    }
    if !(t_target >= data.t) {
        return Err(PropagatorError::BackwardTime {
            target: t_target,
            current: data.t,
        });
    }
    if params.mu != 1.0 {
        return Err(PropagatorError::MuNotNormalized);
    }
    let dt = t_target - data.t;
    if dt == 0.0 {
        return Ok(data.clone());
    }
    let table = MultiplierTable::new(params, data.grid(), dt)?;
    let (u, ut) = table.propagate(&data.u.coefficients, &data.ut.coefficients);
    let grid = *data.grid();
    Ok(StatePair {
        u: SpectralField::from_coefficients(grid, u)?,
        ut: SpectralField::from_coefficients(grid, ut)?,
        t: t_target,
    })
}

/// `|D|^a`: coefficients times `|2πk/L|^a`, the zero mode sent to 0 for `a > 0`.
pub fn fractional_derivative(field: &SpectralField, a: f64) -> Result<SpectralField, PropagatorError> {
    if !(a >= 0.0) {
        return Err(PropagatorError::NegativeOrder(a));
    }
    if a == 0.0 {
        return Ok(field.clone());
    }
    Ok(field.apply_symbol(|k| if k == 0.0 { 0.0 } else { k.powf(a) }))
}

/// `(u_χ, u_{1-χ})` with the high part formed as the exact complement of the low part.
pub fn split_frequencies(field: &SpectralField) -> (SpectralField, SpectralField) {
    let freqs = field.grid.frequency_magnitudes();
    let low: Vec<Complex64> = field
        .coefficients
        .iter()
        .zip(&freqs)
        .map(|(c, &k)| c * chi(k))
        .collect();
    let high: Vec<Complex64> = field.coefficients.iter().zip(&low).map(|(c, l)| c - l).collect();
    let grid = field.grid;
    (
        SpectralField::from_coefficients(grid, low).expect("same grid"),
        SpectralField::from_coefficients(grid, high).expect("same grid"),
    )
}

/// Riemann-sum `L^q` norm; `q = f64::INFINITY` gives the max norm.
pub fn lq_norm(field: &SpectralField, q: f64) -> Result<f64, PropagatorError> {
    if !(q >= 1.0) {
        return Err(PropagatorError::BadExponent(q));
    }
    let peak = field.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if q.is_infinite() || peak == 0.0 {
        return Ok(peak);
    }
    let sum: f64 = field.values.iter().map(|v| (v.abs() / peak).powf(q)).sum();
    Ok(peak * (field.grid.cell_volume() * sum).powf(1.0 / q))
}

/// Edge-mass fraction above which a state is considered contaminated by wrap-around.
pub const EDGE_MASS_LIMIT: f64 = 1e-3;

/// Latest probe time at which `u` and `u_t` have spread below `L/4` and keep
/// less than [`EDGE_MASS_LIMIT`] of their mass near the box faces.
pub fn validity_horizon(params: &ModelParams, data: &StatePair, times: &[f64]) -> Result<f64, PropagatorError> {
    let limit = 0.25 * data.grid().box_length;
    let mut last = data.t;
    for &t in times {
        let state = evolve_linear(params, data, t)?;
        let spread = state.u.spatial_spread().max(state.ut.spatial_spread());
        let edge = state.u.edge_mass_fraction().max(state.ut.edge_mass_fraction());
        if spread >= limit || edge >= EDGE_MASS_LIMIT {
            break;
        }
        last = t;
    }
    Ok(last)
}
