//! Cached FFT plans and in-place multi-axis transforms on flat buffers.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::Grid;

type PlanKey = (usize, bool);

static PLANS: OnceLock<Mutex<HashMap<PlanKey, Arc<dyn Fft<f64>>>>> = OnceLock::new();

fn plan(len: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut cache = cache.lock().unwrap();
    cache
        .entry((len, forward))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if forward {
                planner.plan_fft_forward(len)
            } else {
                planner.plan_fft_inverse(len)
            }
        })
        .clone()
}

/// Spectral coefficients (basis `exp(i xi . x)` on the centered box) from
/// real-space samples.
pub fn spectral_from_real(grid: &Grid, values: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    transform_all_axes(grid, &mut buf, true);
    let scale = 1.0 / grid.len() as f64;
    for (i, c) in buf.iter_mut().enumerate() {
        *c *= scale * grid.parity(i);
    }
    buf
}

/// Real-space samples from spectral coefficients.
pub fn real_from_spectral(grid: &Grid, coeffs: &[Complex64]) -> Vec<f64> {
    let mut buf: Vec<Complex64> = coeffs
        .iter()
        .enumerate()
        .map(|(i, &c)| c * grid.parity(i))
        .collect();
    transform_all_axes(grid, &mut buf, false);
    buf.iter().map(|c| c.re).collect()
}

/// Unnormalized DFT along every axis of the row-major buffer.
pub fn transform_all_axes(grid: &Grid, data: &mut [Complex64], forward: bool) {
    let m = grid.modes_per_dim();
    let fft = plan(m, forward);
    let total = grid.len();
    let mut scratch = vec![Complex64::default(); m];
    for (axis, &stride) in grid.strides().iter().enumerate() {
        if stride == 1 {
            for chunk in data.chunks_exact_mut(m) {
                fft.process(chunk);
            }
        } else {
            // Lines along this axis: iterate over all base offsets whose
            // axis index is zero.
            let _ = axis;
            let block = stride * m;
            for block_start in (0..total).step_by(block) {
                for lane in 0..stride {
                    let base = block_start + lane;
                    for (i, s) in scratch.iter_mut().enumerate() {
                        *s = data[base + i * stride];
                    }
                    fft.process(&mut scratch);
                    for (i, s) in scratch.iter().enumerate() {
                        data[base + i * stride] = *s;
                    }
                }
            }
        }
    }
}
