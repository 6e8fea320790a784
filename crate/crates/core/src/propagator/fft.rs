//! n-dimensional complex FFT on a row-major cube, one axis at a time.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

type PlanCache = HashMap<(usize, bool), Arc<dyn Fft<f64>>>;

thread_local! {
    static PLANS: RefCell<PlanCache> = RefCell::new(HashMap::new());
}

fn plan(len: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|cache| {
        cache
            .borrow_mut()
            .entry((len, forward))
            .or_insert_with(|| {
                let direction = if forward {
                    FftDirection::Forward
                } else {
                    FftDirection::Inverse
                };
                FftPlanner::new().plan_fft(len, direction)
            })
            .clone()
    })
}

/// In-place unnormalized transform of an `side^dim` array stored row-major.
pub(crate) fn transform(data: &mut [Complex64], side: usize, dim: u32, forward: bool) {
    debug_assert_eq!(data.len(), side.pow(dim));
    for axis in 0..dim {
        let stride = side.pow(dim - 1 - axis);
        if stride == 1 {
            process_contiguous(data, side, forward);
        } else {
            process_strided(data, side, stride, forward);
        }
    }
}

#[cfg(feature = "parallel")]
fn process_contiguous(data: &mut [Complex64], side: usize, forward: bool) {
    use rayon::prelude::*;
    let lines = data.len() / side;
    let per_task = (lines / (4 * rayon::current_num_threads()).max(1)).max(1);
    data.par_chunks_mut(side * per_task).for_each(|chunk| {
        plan(side, forward).process(chunk);
    });
}

#[cfg(not(feature = "parallel"))]
fn process_contiguous(data: &mut [Complex64], side: usize, forward: bool) {
    plan(side, forward).process(data);
}

/// Axis with `stride > 1`: lines are gathered into a scratch block, transformed
/// contiguously and scattered back.
fn process_strided(data: &mut [Complex64], side: usize, stride: usize, forward: bool) {
    let block = side * stride;
    let mut scratch = vec![Complex64::new(0.0, 0.0); block];
    for outer in data.chunks_mut(block) {
        // outer[i * stride + j] is element i of line j
        for i in 0..side {
            for j in 0..stride {
                scratch[j * side + i] = outer[i * stride + j];
            }
        }
        process_contiguous(&mut scratch, side, forward);
        for i in 0..side {
            for j in 0..stride {
                outer[i * stride + j] = scratch[j * side + i];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(data: &[Complex64], side: usize, dim: u32) -> Vec<Complex64> {
        let total = data.len();
        let idx = |mut k: usize| {
            let mut out = vec![0usize; dim as usize];
            for a in (0..dim as usize).rev() {
                out[a] = k % side;
                k /= side;
            }
            out
        };
        (0..total)
            .map(|k| {
                let kk = idx(k);
                (0..total)
                    .map(|j| {
                        let jj = idx(j);
                        let phase: f64 = kk.iter().zip(&jj).map(|(&a, &b)| (a * b) as f64).sum::<f64>();
                        data[j] * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * phase / side as f64)
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft() {
        for dim in 1..=3u32 {
            let side: usize = 4;
            let data: Vec<Complex64> = (0..side.pow(dim))
                .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 1.3).cos()))
                .collect();
            let mut fast = data.clone();
            transform(&mut fast, side, dim, true);
            let slow = naive_dft(&data, side, dim);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).norm() < 1e-12);
            }
            transform(&mut fast, side, dim, false);
            let scale = side.pow(dim) as f64;
            for (a, b) in fast.iter().zip(&data) {
                assert!((a / scale - b).norm() < 1e-14);
            }
        }
    }
}
