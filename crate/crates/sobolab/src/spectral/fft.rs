//! Thin n-dimensional FFT layer over `rustfft` with a shared plan cache.
//!
//! Plans are looked up through a globally synchronized planner; the
//! returned plan handles are `Send + Sync` and reused across calls, so
//! concurrent callers never share mutable state.

use std::sync::{Arc, LazyLock, Mutex};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::grid::Grid;

static PLANNER: LazyLock<Mutex<FftPlanner<f64>>> = LazyLock::new(|| Mutex::new(FftPlanner::new()));

fn plan(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    let mut planner = PLANNER.lock().expect("fft planner lock");
    match direction {
        FftDirection::Forward => planner.plan_fft_forward(len),
        FftDirection::Inverse => planner.plan_fft_inverse(len),
    }
}

fn transform_axis(grid: Grid, data: &mut [Complex64], axis: usize, direction: FftDirection) {
    let g = grid.points_per_axis();
    let n = grid.dimension();
    let fft = plan(g, direction);
    let stride = g.pow((n - 1 - axis) as u32);
    let blocks = grid.len() / (g * stride);
    let mut line = vec![Complex64::new(0.0, 0.0); g];
    for block in 0..blocks {
        for inner in 0..stride {
            let base = block * g * stride + inner;
            for (j, slot) in line.iter_mut().enumerate() {
                *slot = data[base + j * stride];
            }
            fft.process(&mut line);
            for (j, value) in line.iter().enumerate() {
                data[base + j * stride] = *value;
            }
        }
    }
}

/// Forward (unnormalized) transform of a real sample vector.
pub(crate) fn forward(grid: Grid, values: &[f64]) -> Vec<Complex64> {
    let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    for axis in 0..grid.dimension() {
        transform_axis(grid, &mut data, axis, FftDirection::Forward);
    }
    data
}

/// Inverse transform scaled by `1/G^n`; returns the real part.
pub(crate) fn inverse_real(grid: Grid, mut coeffs: Vec<Complex64>) -> Vec<f64> {
    for axis in 0..grid.dimension() {
        transform_axis(grid, &mut coeffs, axis, FftDirection::Inverse);
    }
    let scale = 1.0 / grid.len() as f64;
    coeffs.into_iter().map(|c| c.re * scale).collect()
}
