//! Fourier transforms and spectral filters along the periodic direction.

use ndarray::Array2;
use num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Cached FFT plans for rows of length `n1`.
pub struct SpectralY1 {
    pub n1: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for SpectralY1 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralY1").field("n1", &self.n1).finish()
    }
}

impl SpectralY1 {
    pub fn new(n1: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { n1, fwd: planner.plan_fft_forward(n1), inv: planner.plan_fft_inverse(n1) }
    }

    /// Signed integer wavenumber of spectral index `m` (Nyquist mapped to -n1/2).
    pub fn wave(&self, m: usize) -> i64 {
        if m <= self.n1 / 2 {
            m as i64
        } else {
            m as i64 - self.n1 as i64
        }
    }

    pub fn forward_row(&self, row: &[f64], spec: &mut [Complex<f64>]) {
        for (s, v) in spec.iter_mut().zip(row) {
            *s = Complex::new(*v, 0.0);
        }
        self.fwd.process(spec);
    }

    pub fn inverse_row(&self, spec: &mut [Complex<f64>], row: &mut [f64]) {
        self.inv.process(spec);
        let scale = 1.0 / self.n1 as f64;
        for (v, s) in row.iter_mut().zip(spec.iter()) {
            *v = s.re * scale;
        }
    }

    /// Apply `f(spectrum)` to every row of `data` in place.
    pub fn filter_rows<F>(&self, data: &mut Array2<f64>, mut f: F)
    where
        F: FnMut(&mut [Complex<f64>]),
    {
        let mut spec = vec![Complex::new(0.0, 0.0); self.n1];
        for mut row in data.rows_mut() {
            let slice = row.as_slice_mut().expect("row-major layout");
            self.forward_row(slice, &mut spec);
            f(&mut spec);
            self.inverse_row(&mut spec, slice);
        }
    }

    /// Exact spectral `d/dy1` for resolved modes; the Nyquist mode is zeroed.
    pub fn deriv_y1(&self, data: &Array2<f64>, gamma: f64) -> Array2<f64> {
        let mut out = data.clone();
        let base = std::f64::consts::TAU / gamma;
        let nyquist = self.n1 / 2;
        let waves: Vec<f64> = (0..self.n1).map(|m| base * self.wave(m) as f64).collect();
        self.filter_rows(&mut out, |spec| {
            for (m, s) in spec.iter_mut().enumerate() {
                *s = if m == nyquist {
                    Complex::new(0.0, 0.0)
                } else {
                    Complex::new(0.0, waves[m]) * *s
                };
            }
        });
        out
    }

    /// Largest retained integer wavenumber under the 2/3 rule.
    pub fn dealias_cutoff(&self) -> i64 {
        (self.n1 as i64) / 3
    }

    /// Zero all modes above the 2/3 cutoff, in place.
    pub fn dealias(&self, data: &mut Array2<f64>) {
        let cutoff = self.dealias_cutoff();
        let waves: Vec<i64> = (0..self.n1).map(|m| self.wave(m)).collect();
        self.filter_rows(data, |spec| {
            for (m, s) in spec.iter_mut().enumerate() {
                if waves[m].abs() > cutoff {
                    *s = Complex::new(0.0, 0.0);
                }
            }
        });
    }

    /// Spectrum of a single periodic sample row (used for wall data).
    pub fn spectrum(&self, row: &[f64]) -> Vec<Complex<f64>> {
        let mut spec = vec![Complex::new(0.0, 0.0); self.n1];
        self.forward_row(row, &mut spec);
        spec
    }

    /// Spectral derivative of a single periodic sample row.
    pub fn deriv_row(&self, row: &[f64], gamma: f64) -> Vec<f64> {
        let base = std::f64::consts::TAU / gamma;
        let nyquist = self.n1 / 2;
        let mut spec = self.spectrum(row);
        for (m, s) in spec.iter_mut().enumerate() {
            *s = if m == nyquist {
                Complex::new(0.0, 0.0)
            } else {
                Complex::new(0.0, base * self.wave(m) as f64) * *s
            };
        }
        let mut out = vec![0.0; self.n1];
        self.inverse_row(&mut spec, &mut out);
        out
    }
}
