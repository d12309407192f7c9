use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;

use super::grid::Grid;
use crate::error::{DynError, Result};

/// Position width `σ` (with `⟨x²⟩ = σ²`) of the minimal-uncertainty state.
pub const REFERENCE_WIDTH: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Boundary amplitude allowed for freshly prepared Gaussian states.
pub const PREPARATION_TAIL_TOL: f64 = 1e-14;

/// Boundary amplitude allowed during propagation and Weyl shifts.
pub const EVOLUTION_TAIL_TOL: f64 = 1e-5;

/// A wavefunction sampled on a periodic grid.
#[derive(Debug, Clone)]
pub struct WaveState {
    grid: Arc<Grid>,
    psi: Vec<Complex64>,
}

impl WaveState {
    pub fn new(grid: Arc<Grid>, psi: Vec<Complex64>) -> Result<Self> {
        if psi.len() != grid.len() {
            return Err(DynError::DimensionMismatch {
                expected: grid.len(),
                found: psi.len(),
            });
        }
        Ok(WaveState { grid, psi })
    }

    /// Rescales to unit norm.
    pub fn normalized(grid: Arc<Grid>, psi: Vec<Complex64>) -> Result<Self> {
        let mut s = WaveState::new(grid, psi)?;
        let n = s.norm();
        if !(n > 0.0) {
            return Err(DynError::InvalidInput("cannot normalize a zero state".into()));
        }
        s.psi.iter_mut().for_each(|z| *z /= n);
        Ok(s)
    }

    pub(crate) fn from_parts(grid: Arc<Grid>, psi: Vec<Complex64>) -> Self {
        WaveState { grid, psi }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.psi
    }

    /// Grid-weighted ℓ² norm.
    pub fn norm(&self) -> f64 {
        (self.grid.dx() * self.psi.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// `⟨self, other⟩ = dx Σ conj(self) other`.
    pub fn inner(&self, other: &WaveState) -> Complex64 {
        self.psi
            .iter()
            .zip(&other.psi)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            * self.grid.dx()
    }

    /// `‖self - other‖`.
    pub fn distance(&self, other: &WaveState) -> f64 {
        (self.grid.dx()
            * self
                .psi
                .iter()
                .zip(&other.psi)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>())
        .sqrt()
    }

    pub fn with_phase(&self, theta: f64) -> WaveState {
        let z = Complex64::from_polar(1.0, theta);
        WaveState {
            grid: self.grid.clone(),
            psi: self.psi.iter().map(|a| a * z).collect(),
        }
    }

    pub fn expectation_x(&self) -> f64 {
        self.position_moment(1)
    }

    pub fn expectation_x2(&self) -> f64 {
        self.position_moment(2)
    }

    fn position_moment(&self, power: i32) -> f64 {
        self.grid.dx()
            * self
                .psi
                .iter()
                .zip(self.grid.positions())
                .map(|(z, x)| z.norm_sqr() * x.powi(power))
                .sum::<f64>()
            / self.norm().powi(2)
    }

    /// `⟨P⟩` evaluated in momentum space.
    pub fn expectation_p(&self) -> f64 {
        let hat = self.grid.to_momentum(&self.psi);
        let total: f64 = hat.iter().map(|z| z.norm_sqr()).sum();
        hat.iter()
            .zip(self.grid.momenta())
            .map(|(z, k)| z.norm_sqr() * k)
            .sum::<f64>()
            / total
    }

    /// Largest `|ψ|` in the outer 1/64 of the grid on either side.
    pub fn boundary_amplitude(&self) -> f64 {
        let band = (self.psi.len() / 64).max(1);
        self.psi[..band]
            .iter()
            .chain(&self.psi[self.psi.len() - band..])
            .fold(0.0_f64, |m, z| m.max(z.norm()))
    }

    pub fn check_tails(&self, threshold: f64) -> Result<()> {
        let amplitude = self.boundary_amplitude();
        if amplitude > threshold {
            return Err(DynError::TailOverflow {
                amplitude,
                threshold,
            });
        }
        Ok(())
    }

    /// Writes `x,re,im` rows.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "x,re,im")?;
        for (x, z) in self.grid.positions().iter().zip(&self.psi) {
            writeln!(out, "{x:.12e},{:.17e},{:.17e}", z.re, z.im)?;
        }
        Ok(())
    }
}

/// Normalized Gaussian `exp(-(x - x̄)²/(4σ²) + i p̄ x)`.
pub fn coherent_state(grid: &Arc<Grid>, x_bar: f64, p_bar: f64, width: f64) -> Result<WaveState> {
    if !(width > 0.0) {
        return Err(DynError::InvalidInput(format!("width must be positive, got {width}")));
    }
    let peak = (2.0 * std::f64::consts::PI * width * width).powf(-0.25);
    let edge = (grid.x_min() - x_bar).abs().min((grid.x_max() - x_bar).abs());
    let amplitude = peak * (-(edge * edge) / (4.0 * width * width)).exp();
    if amplitude > PREPARATION_TAIL_TOL || x_bar <= grid.x_min() || x_bar >= grid.x_max() {
        return Err(DynError::TailOverflow {
            amplitude,
            threshold: PREPARATION_TAIL_TOL,
        });
    }
    let psi = grid
        .positions()
        .iter()
        .map(|&x| {
            let d = x - x_bar;
            Complex64::from_polar((-d * d / (4.0 * width * width)).exp(), p_bar * x)
        })
        .collect();
    WaveState::normalized(grid.clone(), psi)
}

/// `e^{-i t H₀} ψ` with `H₀ = P²/2`, exact on the grid.
pub fn free_evolve(psi: &WaveState, t: f64) -> WaveState {
    if t == 0.0 {
        return psi.clone();
    }
    let mut out = psi.psi.clone();
    psi.grid.apply_fourier_multiplier(&mut out, &psi.grid.free_multiplier(t));
    WaveState::from_parts(psi.grid.clone(), out)
}

/// `e^{iθ} exp(i(aQ + bP)) ψ = e^{iθ} e^{iab/2} e^{iaQ} e^{ibP} ψ`.
pub fn weyl_apply(psi: &WaveState, a: f64, b: f64, theta: f64) -> Result<WaveState> {
    let grid = psi.grid.clone();
    let mut out = psi.psi.clone();
    if b != 0.0 {
        grid.apply_fourier_multiplier(&mut out, &grid.translation_multiplier(b));
    }
    let base = theta + 0.5 * a * b;
    for (z, x) in out.iter_mut().zip(grid.positions()) {
        *z *= Complex64::from_polar(1.0, base + a * x);
    }
    let state = WaveState::from_parts(grid, out);
    state.check_tails(EVOLUTION_TAIL_TOL)?;
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coherent_state_moments() {
        let grid = Grid::standard();
        let psi = coherent_state(&grid, 0.7, -1.3, REFERENCE_WIDTH).unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-12);
        assert!((psi.expectation_x() - 0.7).abs() < 1e-10);
        assert!((psi.expectation_p() + 1.3).abs() < 1e-10);
    }

    #[test]
    fn tail_overflow_near_boundary() {
        let grid = Grid::standard();
        assert!(matches!(
            coherent_state(&grid, 18.0, 0.0, 1.0),
            Err(DynError::TailOverflow { .. })
        ));
    }

    #[test]
    fn free_evolution_round_trip() {
        let grid = Grid::standard();
        let psi = coherent_state(&grid, 0.0, 0.5, REFERENCE_WIDTH).unwrap();
        assert_eq!(free_evolve(&psi, 0.0).amplitudes(), psi.amplitudes());
        let back = free_evolve(&free_evolve(&psi, 1.7), -1.7);
        assert!(back.distance(&psi) < 1e-12);
    }

    #[test]
    fn weyl_shift_moves_expectations() {
        let grid = Grid::standard();
        let psi = coherent_state(&grid, 0.0, 0.0, REFERENCE_WIDTH).unwrap();
        // exp(i(aQ + bP)) shifts x by -b and p by +a
        let out = weyl_apply(&psi, 0.8, 1.5, 0.0).unwrap();
        assert!((out.expectation_x() + 1.5).abs() < 1e-10);
        assert!((out.expectation_p() - 0.8).abs() < 1e-10);
        assert!((out.norm() - 1.0).abs() < 1e-12);
    }
}
