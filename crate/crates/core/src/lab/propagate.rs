//! Split-operator realization of `U_F(t_f, t_i)` and `S(F)` for `d = 1`.
//!
//! The Hamiltonian is `H(t) = H₀ ∓ V_t(Q)`, where `F[x] = ∫ V_t(x(t)) dt`
//! collects the linear density (`V_t(x) = f(t) x`) and the potential terms.
//! Time stepping covers the support hull of `F` only, anchored at its start;
//! free evolution outside the support is applied exactly.

use num_complex::Complex64;

use super::state::{WaveState, EVOLUTION_TAIL_TOL};
use crate::error::{DynError, Result};
use crate::functionals::{Functional, Shape};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// Half kick, drift, half kick. Second order.
    #[default]
    Strang,
    /// Kick, then drift. First order; the time-sliced path integral.
    Trotter1,
}

/// Sign with which `F` enters the Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SignConvention {
    /// `H = H₀ - V_t(Q)`, so that `S(F) = T exp(i ∫ F)` and `S(F_h) = e^{ih}`.
    #[default]
    S4,
    /// `H = H₀ + V_t(Q)`, i.e. `S(F) = T exp(-i ∫ F)`.
    S2,
}

impl SignConvention {
    fn factor(self) -> f64 {
        match self {
            SignConvention::S4 => 1.0,
            SignConvention::S2 => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagatorConfig {
    pub dt: f64,
    pub scheme: Scheme,
    pub t_i: f64,
    pub t_f: f64,
    pub sign: SignConvention,
    pub tail_tol: f64,
}

impl PropagatorConfig {
    pub fn new(dt: f64, t_i: f64, t_f: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(DynError::InvalidInput(format!("dt must be positive, got {dt}")));
        }
        if !(t_i <= t_f) {
            return Err(DynError::InvalidInput(format!("t_i = {t_i} exceeds t_f = {t_f}")));
        }
        let steps = (t_f - t_i) / dt;
        if (steps - steps.round()).abs() > 1e-6 * steps.max(1.0) {
            return Err(DynError::InvalidInput(format!(
                "(t_f - t_i)/dt = {steps} is not an integer"
            )));
        }
        Ok(PropagatorConfig {
            dt,
            scheme: Scheme::Strang,
            t_i,
            t_f,
            sign: SignConvention::S4,
            tail_tol: EVOLUTION_TAIL_TOL,
        })
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_sign(mut self, sign: SignConvention) -> Self {
        self.sign = sign;
        self
    }

    /// Same window, new step.
    pub fn with_dt(&self, dt: f64) -> Result<Self> {
        Ok(PropagatorConfig {
            scheme: self.scheme,
            sign: self.sign,
            tail_tol: self.tail_tol,
            ..PropagatorConfig::new(dt, self.t_i, self.t_f)?
        })
    }

    fn check_support(&self, functional: &Functional) -> Result<()> {
        if let Some((lo, hi)) = functional.support() {
            if lo < self.t_i || hi > self.t_f {
                return Err(DynError::SupportNotCovered {
                    t_i: self.t_i,
                    t_f: self.t_f,
                    lo,
                    hi,
                });
            }
        }
        Ok(())
    }
}

/// Precomputed kick data for one functional on one grid.
struct Stepper<'a> {
    functional: &'a Functional,
    x: &'a [f64],
    /// `V_k(x_j)` for unshifted terms, `None` for shifted ones.
    static_values: Vec<Option<Vec<f64>>>,
    sign: f64,
    lo: f64,
    steps: usize,
    dt: f64,
}

impl<'a> Stepper<'a> {
    fn new(functional: &'a Functional, x: &'a [f64], lo: f64, hi: f64, cfg: &PropagatorConfig) -> Self {
        let span = hi - lo;
        let steps = ((span / cfg.dt) - 1e-9).ceil().max(1.0) as usize;
        let static_values = functional
            .potentials()
            .iter()
            .map(|t| match t.shift {
                None => Some(x.iter().map(|&y| t.shape.value_1d(y)).collect()),
                Some(_) => None,
            })
            .collect();
        Stepper {
            functional,
            x,
            static_values,
            sign: cfg.sign.factor(),
            lo,
            steps,
            dt: span / steps as f64,
        }
    }

    fn time(&self, step: usize) -> f64 {
        self.lo + step as f64 * self.dt
    }

    /// Adds `sign · ∫_{t0}^{t1} V_t(x_j) dt` to `phase`.
    fn accumulate(&self, t0: f64, t1: f64, phase: &mut [f64]) {
        let slope = self.functional.density()[0].integral_between(t0, t1);
        if slope != 0.0 {
            for (p, x) in phase.iter_mut().zip(self.x) {
                *p += self.sign * slope * x;
            }
        }
        let mid = 0.5 * (t0 + t1);
        for (term, values) in self.functional.potentials().iter().zip(&self.static_values) {
            let weight = self.sign * term.window.integral_between(t0, t1);
            if weight == 0.0 {
                continue;
            }
            match values {
                Some(v) => {
                    for (p, vj) in phase.iter_mut().zip(v) {
                        *p += weight * vj;
                    }
                }
                None => {
                    let s = term.shift_at(mid, 1)[0];
                    accumulate_shifted(&term.shape, self.x, s, weight, phase);
                }
            }
        }
    }
}

/// Gaussians are evaluated only within `GAUSSIAN_REACH` widths of their
/// center; beyond that they are below `1e-19` of their amplitude.
const GAUSSIAN_REACH: f64 = 9.5;

fn accumulate_shifted(shape: &Shape, x: &[f64], shift: f64, weight: f64, phase: &mut [f64]) {
    let (lo, hi) = match shape {
        Shape::Gaussian { center, width, .. } if x.len() > 1 => {
            let dx = x[1] - x[0];
            let reach = GAUSSIAN_REACH * width;
            let first = ((center[0] - shift - reach - x[0]) / dx).floor().max(0.0) as usize;
            let last = (((center[0] - shift + reach - x[0]) / dx).ceil().max(0.0) as usize).min(x.len());
            (first.min(last), last)
        }
        _ => (0, x.len()),
    };
    for (p, &xj) in phase[lo..hi].iter_mut().zip(&x[lo..hi]) {
        *p += weight * shape.value_1d(xj + shift);
    }
}

fn kick(psi: &mut [Complex64], phase: &[f64], direction: f64) {
    for (z, p) in psi.iter_mut().zip(phase) {
        if *p != 0.0 {
            *z *= Complex64::from_polar(1.0, direction * p);
        }
    }
}

fn check_dim(functional: &Functional) -> Result<()> {
    if functional.dim() != 1 {
        return Err(DynError::InvalidInput(format!(
            "the grid lab is one-dimensional; functional has dim {}",
            functional.dim()
        )));
    }
    Ok(())
}

/// Runs `U(hi, lo)` (forward) or its adjoint (backward) in place.
fn run(
    psi: &mut WaveState,
    functional: &Functional,
    lo: f64,
    hi: f64,
    cfg: &PropagatorConfig,
    forward: bool,
) -> Result<()> {
    let grid = psi.grid().clone();
    let stepper = Stepper::new(functional, grid.positions(), lo, hi, cfg);
    let n = grid.len();
    let direction = if forward { 1.0 } else { -1.0 };
    let drift = grid.free_multiplier(direction * stepper.dt);
    let check_every = (stepper.steps / 8).max(1);
    let mut amps = psi.amplitudes().to_vec();
    let mut phase = vec![0.0; n];
    let steps = stepper.steps;
    let half = 0.5 * stepper.dt;

    match cfg.scheme {
        Scheme::Strang => {
            // Adjacent half kicks commute and are merged into one.
            let first = if forward { 0 } else { steps - 1 };
            let (a0, a1) = edge_half(&stepper, first, forward, half);
            stepper.accumulate(a0, a1, &mut phase);
            for count in 0..steps {
                let step = if forward { count } else { steps - 1 - count };
                kick(&mut amps, &phase, direction);
                grid.apply_fourier_multiplier(&mut amps, &drift);
                phase.iter_mut().for_each(|p| *p = 0.0);
                let t = stepper.time(step);
                if forward {
                    stepper.accumulate(t + half, stepper.time(step + 1), &mut phase);
                    if step + 1 < steps {
                        let t1 = stepper.time(step + 1);
                        stepper.accumulate(t1, t1 + half, &mut phase);
                    }
                } else {
                    stepper.accumulate(t, t + half, &mut phase);
                    if step > 0 {
                        let tp = stepper.time(step - 1);
                        stepper.accumulate(tp + half, t, &mut phase);
                    }
                }
                if (count + 1) % check_every == 0 {
                    tail_check(&amps, cfg.tail_tol)?;
                }
            }
            kick(&mut amps, &phase, direction);
        }
        Scheme::Trotter1 => {
            for count in 0..steps {
                let step = if forward { count } else { steps - 1 - count };
                phase.iter_mut().for_each(|p| *p = 0.0);
                stepper.accumulate(stepper.time(step), stepper.time(step + 1), &mut phase);
                if forward {
                    kick(&mut amps, &phase, direction);
                    grid.apply_fourier_multiplier(&mut amps, &drift);
                } else {
                    grid.apply_fourier_multiplier(&mut amps, &drift);
                    kick(&mut amps, &phase, direction);
                }
                if (count + 1) % check_every == 0 {
                    tail_check(&amps, cfg.tail_tol)?;
                }
            }
        }
    }
    *psi = WaveState::from_parts(grid, amps);
    psi.check_tails(cfg.tail_tol)
}

/// The half interval applied first: the front half of the first step when
/// running forward, the back half of the last step when running backward.
fn edge_half(stepper: &Stepper<'_>, step: usize, forward: bool, half: f64) -> (f64, f64) {
    let t = stepper.time(step);
    if forward {
        (t, t + half)
    } else {
        (t + half, stepper.time(step + 1))
    }
}

fn tail_check(amps: &[Complex64], threshold: f64) -> Result<()> {
    let band = (amps.len() / 64).max(1);
    let amplitude = amps[..band]
        .iter()
        .chain(&amps[amps.len() - band..])
        .fold(0.0_f64, |m, z| m.max(z.norm()));
    if amplitude > threshold {
        return Err(DynError::TailOverflow {
            amplitude,
            threshold,
        });
    }
    Ok(())
}

fn free_in_place(psi: &mut WaveState, t: f64) {
    if t != 0.0 {
        *psi = super::state::free_evolve(psi, t);
    }
}

/// `U_F(t_f, t_i) ψ` for the Hamiltonian `H₀ - V_t(Q)` (or `+` under S2).
pub fn evolve(psi: &WaveState, functional: &Functional, cfg: &PropagatorConfig) -> Result<WaveState> {
    check_dim(functional)?;
    cfg.check_support(functional)?;
    let mut out = psi.clone();
    match functional.support() {
        Some((lo, hi)) => {
            free_in_place(&mut out, lo - cfg.t_i);
            run(&mut out, functional, lo, hi, cfg, true)?;
            free_in_place(&mut out, cfg.t_f - hi);
        }
        None => free_in_place(&mut out, cfg.t_f - cfg.t_i),
    }
    Ok(out.with_phase(cfg.sign.factor() * functional.constant_part()))
}

/// `S(F) ψ = e^{i t_f H₀} U_F(t_f, t_i) e^{-i t_i H₀} ψ`.
pub fn scattering(psi: &WaveState, functional: &Functional, cfg: &PropagatorConfig) -> Result<WaveState> {
    check_dim(functional)?;
    cfg.check_support(functional)?;
    let mut out = psi.clone();
    if let Some((lo, hi)) = functional.support() {
        free_in_place(&mut out, lo);
        run(&mut out, functional, lo, hi, cfg, true)?;
        free_in_place(&mut out, -hi);
    }
    Ok(out.with_phase(cfg.sign.factor() * functional.constant_part()))
}

/// `S(F)⁻¹ ψ`, the adjoint of the discrete scattering operator.
pub fn scattering_inverse(
    psi: &WaveState,
    functional: &Functional,
    cfg: &PropagatorConfig,
) -> Result<WaveState> {
    check_dim(functional)?;
    cfg.check_support(functional)?;
    let mut out = psi.with_phase(-cfg.sign.factor() * functional.constant_part());
    if let Some((lo, hi)) = functional.support() {
        free_in_place(&mut out, hi);
        run(&mut out, functional, lo, hi, cfg, false)?;
        free_in_place(&mut out, -lo);
    }
    Ok(out)
}
