use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{DynError, Result};

/// Periodic uniform grid on `[x_min, x_min + length)` with its momentum lattice.
pub struct Grid {
    n: usize,
    x_min: f64,
    length: f64,
    x: Vec<f64>,
    k: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    backward: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n", &self.n)
            .field("x_min", &self.x_min)
            .field("length", &self.length)
            .finish()
    }
}

impl Grid {
    pub const DEFAULT_N: usize = 2048;
    pub const DEFAULT_X_MIN: f64 = -20.0;
    pub const DEFAULT_LENGTH: f64 = 40.0;

    pub fn new(n: usize, x_min: f64, length: f64) -> Result<Arc<Grid>> {
        if n < 2 || !n.is_power_of_two() {
            return Err(DynError::InvalidInput(format!(
                "grid size must be a power of two >= 2, got {n}"
            )));
        }
        if !(length > 0.0) || !length.is_finite() || !x_min.is_finite() {
            return Err(DynError::InvalidInput(format!(
                "invalid grid domain [{x_min}, {x_min} + {length})"
            )));
        }
        let dx = length / n as f64;
        let x = (0..n).map(|j| x_min + j as f64 * dx).collect();
        let k = (0..n)
            .map(|j| {
                let m = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
                TAU * m / length
            })
            .collect();
        let mut planner = FftPlanner::new();
        Ok(Arc::new(Grid {
            n,
            x_min,
            length,
            x,
            k,
            forward: planner.plan_fft_forward(n),
            backward: planner.plan_fft_inverse(n),
        }))
    }

    /// `n = 2048` points on `[-20, 20)`.
    pub fn standard() -> Arc<Grid> {
        Grid::new(Self::DEFAULT_N, Self::DEFAULT_X_MIN, Self::DEFAULT_LENGTH).expect("default grid")
    }

    pub fn with_points(n: usize) -> Result<Arc<Grid>> {
        Grid::new(n, Self::DEFAULT_X_MIN, Self::DEFAULT_LENGTH)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_min + self.length
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn positions(&self) -> &[f64] {
        &self.x
    }

    pub fn momenta(&self) -> &[f64] {
        &self.k
    }

    /// Multiplies by `m(k_j)` in momentum space. Scratch space is allocated
    /// per call, so concurrent use from several threads is safe.
    pub fn apply_fourier_multiplier(&self, psi: &mut [Complex64], multiplier: &[Complex64]) {
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.forward.get_inplace_scratch_len()];
        self.forward.process_with_scratch(psi, &mut scratch);
        let norm = 1.0 / self.n as f64;
        for (z, m) in psi.iter_mut().zip(multiplier) {
            *z *= m * norm;
        }
        self.backward.process_with_scratch(psi, &mut scratch);
    }

    /// Unitary discrete transform `ψ̂_j = n^{-1/2} Σ ψ_l e^{-2πi jl/n}`.
    pub fn to_momentum(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let mut out = psi.to_vec();
        self.forward.process(&mut out);
        let norm = 1.0 / (self.n as f64).sqrt();
        out.iter_mut().for_each(|z| *z *= norm);
        out
    }

    /// `e^{-i k² t / 2}`.
    pub fn free_multiplier(&self, t: f64) -> Vec<Complex64> {
        self.k
            .iter()
            .map(|k| Complex64::from_polar(1.0, -0.5 * k * k * t))
            .collect()
    }

    /// `e^{i k b}`: translation `ψ(x) ↦ ψ(x + b)`.
    pub fn translation_multiplier(&self, b: f64) -> Vec<Complex64> {
        self.k
            .iter()
            .map(|k| Complex64::from_polar(1.0, k * b))
            .collect()
    }
}
