//! 2D complex FFT on the row-major `N1 x N2` grid.
//!
//! Coefficients follow the normalised convention `f̂ = FFT(f) / (N1 N2)`, so
//! `f(x) = Σ f̂(k) e^{i k̃·x}` and Parseval reads `mean |f|² = Σ |f̂|²`.

use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::spectral::TorusSpec;
use crate::C64;

pub struct Fft2 {
    n1: usize,
    n2: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft2")
            .field("n1", &self.n1)
            .field("n2", &self.n2)
            .finish()
    }
}

impl Fft2 {
    pub fn new(spec: &TorusSpec) -> Self {
        let mut planner = FftPlanner::new();
        let (n1, n2) = (spec.n1(), spec.n2());
        Self {
            n1,
            n2,
            row_fwd: planner.plan_fft_forward(n2),
            row_inv: planner.plan_fft_inverse(n2),
            col_fwd: planner.plan_fft_forward(n1),
            col_inv: planner.plan_fft_inverse(n1),
        }
    }

    /// Unnormalised transform in place.
    fn run(&self, data: &mut [C64], forward: bool) {
        let (rows, cols) = if forward {
            (&self.row_fwd, &self.col_fwd)
        } else {
            (&self.row_inv, &self.col_inv)
        };
        rows.process(data);
        let mut t = transpose(data, self.n1, self.n2);
        cols.process(&mut t);
        let back = transpose(&t, self.n2, self.n1);
        data.copy_from_slice(&back);
    }

    /// Grid values of the real function with coefficients `coeffs`.
    pub fn to_physical(&self, coeffs: &[C64]) -> Vec<f64> {
        let mut buf = coeffs.to_vec();
        self.run(&mut buf, false);
        buf.into_iter().map(|c| c.re).collect()
    }

    /// Normalised coefficients of the real grid function `values`.
    pub fn to_spectral(&self, values: &[f64]) -> Vec<C64> {
        let mut buf: Vec<C64> = values.iter().map(|&x| C64::new(x, 0.0)).collect();
        self.run(&mut buf, true);
        let scale = 1.0 / (self.n1 * self.n2) as f64;
        for c in &mut buf {
            *c *= scale;
        }
        buf
    }
}

fn transpose(data: &[C64], rows: usize, cols: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); data.len()];
    for r in 0..rows {
        for c in 0..cols {
            out[c * rows + r] = data[r * cols + c];
        }
    }
    out
}
