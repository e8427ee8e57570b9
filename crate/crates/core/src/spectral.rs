//! N-dimensional FFT helpers on a [`TorusGrid`].
//!
//! Wavenumbers are `ξ = π m / L` with `m` in FFT order; the Nyquist index is
//! treated as `|m| = N/2`. Parseval: `h^d Σ|f|² = (h^d / N^d) Σ|F|²`.

use crate::field::{ScalarField, TorusGrid};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

pub struct Transform {
    pub grid: TorusGrid,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Transform {
    pub fn new(grid: TorusGrid) -> Self {
        let mut p = FftPlanner::new();
        Self { grid, fwd: p.plan_fft_forward(grid.n), inv: p.plan_fft_inverse(grid.n) }
    }

    fn along_axes(&self, data: &mut [Complex64], inverse: bool) {
        let g = self.grid;
        let n = g.n;
        let plan = if inverse { &self.inv } else { &self.fwd };
        let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
        // last axis: contiguous rows
        plan.process_with_scratch(data, &mut scratch);
        let total = g.len();
        let mut buf = vec![Complex64::default(); n];
        for axis in 0..g.dim - 1 {
            let stride = n.pow((g.dim - 1 - axis) as u32);
            let block = stride * n;
            for start in (0..total).step_by(block) {
                for off in 0..stride {
                    let base = start + off;
                    for k in 0..n {
                        buf[k] = data[base + k * stride];
                    }
                    plan.process_with_scratch(&mut buf, &mut scratch);
                    for k in 0..n {
                        data[base + k * stride] = buf[k];
                    }
                }
            }
        }
    }

    pub fn forward(&self, f: &[f64]) -> Vec<Complex64> {
        let mut d: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.along_axes(&mut d, false);
        d
    }

    /// Inverse transform, normalized, real part.
    pub fn inverse_real(&self, mut d: Vec<Complex64>) -> Vec<f64> {
        self.along_axes(&mut d, true);
        let s = 1.0 / self.grid.len() as f64;
        d.iter().map(|c| c.re * s).collect()
    }

    /// Inverse transform, normalized, complex.
    pub fn inverse(&self, mut d: Vec<Complex64>) -> Vec<Complex64> {
        self.along_axes(&mut d, true);
        let s = 1.0 / self.grid.len() as f64;
        d.iter().map(|c| c * s).collect()
    }
}

/// Signed integer wavenumber index in FFT order.
pub fn signed_index(m: usize, n: usize) -> i64 {
    if m <= n / 2 {
        m as i64
    } else {
        m as i64 - n as i64
    }
}

/// Wave vector components for every flat spectral index.
pub fn wave_vector(grid: &TorusGrid, idx: usize) -> [f64; 3] {
    let m = grid.multi_index(idx);
    let c = std::f64::consts::PI / grid.l;
    let mut k = [0.0; 3];
    for a in 0..grid.dim {
        k[a] = c * signed_index(m[a], grid.n) as f64;
    }
    k
}

/// |ξ| for every flat spectral index.
pub fn xi_abs(grid: &TorusGrid) -> Vec<f64> {
    (0..grid.len())
        .map(|i| {
            let k = wave_vector(grid, i);
            (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt()
        })
        .collect()
}

/// Whether the spectral index sits on a Nyquist plane (odd multipliers vanish there).
pub fn is_nyquist(grid: &TorusGrid, idx: usize, axis: usize) -> bool {
    grid.multi_index(idx)[axis] == grid.n / 2
}

/// Spectral partial derivative along `axis`.
pub fn derivative(t: &Transform, f: &ScalarField, axis: usize) -> ScalarField {
    let g = f.grid;
    let mut d = t.forward(&f.values);
    for (i, c) in d.iter_mut().enumerate() {
        if is_nyquist(&g, i, axis) {
            *c = Complex64::default();
        } else {
            let k = wave_vector(&g, i)[axis];
            *c *= Complex64::new(0.0, k);
        }
    }
    ScalarField { grid: g, values: t.inverse_real(d), time_stamp: f.time_stamp }
}

/// Spectral Laplacian.
pub fn laplacian(t: &Transform, f: &ScalarField) -> ScalarField {
    let g = f.grid;
    let xi = xi_abs(&g);
    let mut d = t.forward(&f.values);
    for (c, x) in d.iter_mut().zip(&xi) {
        *c *= -x * x;
    }
    ScalarField { grid: g, values: t.inverse_real(d), time_stamp: f.time_stamp }
}
