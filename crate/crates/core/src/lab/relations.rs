//! Numerical checks of the dynamical relation and causal factorization.

use super::propagate::{scattering, scattering_inverse, PropagatorConfig};
use super::state::WaveState;
use crate::error::{DynError, Result};
use crate::functionals::{boundary_action, Functional, LoopPath};

/// A realization of the operations `S(F)` together with the boundary action
/// its Lagrangean assigns to a loop.
pub trait ScatteringProvider: Sync {
    fn scatter(&self, psi: &WaveState, f: &Functional, cfg: &PropagatorConfig) -> Result<WaveState>;

    fn scatter_inverse(
        &self,
        psi: &WaveState,
        f: &Functional,
        cfg: &PropagatorConfig,
    ) -> Result<WaveState>;

    /// The functional `δL(x₀)` entering `S(F) = S(F^{x₀} + δL(x₀))`.
    fn boundary_action(&self, x0: &LoopPath) -> Result<Functional>;
}

/// `S(F)` for the free Lagrangean `ẋ²/2`.
#[derive(Debug, Clone, Copy, Default)]
pub struct FreeScattering;

impl ScatteringProvider for FreeScattering {
    fn scatter(&self, psi: &WaveState, f: &Functional, cfg: &PropagatorConfig) -> Result<WaveState> {
        scattering(psi, f, cfg)
    }

    fn scatter_inverse(
        &self,
        psi: &WaveState,
        f: &Functional,
        cfg: &PropagatorConfig,
    ) -> Result<WaveState> {
        scattering_inverse(psi, f, cfg)
    }

    fn boundary_action(&self, x0: &LoopPath) -> Result<Functional> {
        Ok(boundary_action(x0))
    }
}

fn max_over_states(
    states: &[WaveState],
    residual: impl Fn(&WaveState) -> Result<f64>,
) -> Result<f64> {
    states
        .iter()
        .try_fold(0.0_f64, |worst, psi| Ok(worst.max(residual(psi)?)))
}

/// `max_ψ ‖S(F)ψ - S(F^{x₀} + δL(x₀))ψ‖`.
pub fn check_dynamical_relation(
    provider: &dyn ScatteringProvider,
    f: &Functional,
    x0: &LoopPath,
    states: &[WaveState],
    cfg: &PropagatorConfig,
) -> Result<f64> {
    let deformed = f.shift_by_loop(x0)?.add(&provider.boundary_action(x0)?)?;
    max_over_states(states, |psi| {
        let lhs = provider.scatter(psi, f, cfg)?;
        let rhs = provider.scatter(psi, &deformed, cfg)?;
        Ok(lhs.distance(&rhs))
    })
}

/// Fails unless `later` lies in the future of `earlier`.
pub fn check_ordering(later: &Functional, earlier: &Functional) -> Result<()> {
    if let (Some((later_lo, _)), Some((_, earlier_hi))) = (later.support(), earlier.support()) {
        if later_lo < earlier_hi {
            return Err(DynError::OrderingViolation {
                later_lo,
                earlier_hi,
            });
        }
    }
    Ok(())
}

/// `max_ψ ‖S(F₁+F₂+F₃)ψ - S(F₁+F₃) S(F₃)⁻¹ S(F₂+F₃)ψ‖` for `F₁` later than `F₂`.
pub fn check_causal_relation(
    provider: &dyn ScatteringProvider,
    f1: &Functional,
    f2: &Functional,
    f3: &Functional,
    states: &[WaveState],
    cfg: &PropagatorConfig,
) -> Result<f64> {
    check_ordering(f1, f2)?;
    let f13 = f1.add(f3)?;
    let f23 = f2.add(f3)?;
    let all = f13.add(f2)?;
    max_over_states(states, |psi| {
        let lhs = provider.scatter(psi, &all, cfg)?;
        let right = provider.scatter(psi, &f23, cfg)?;
        let middle = provider.scatter_inverse(&right, f3, cfg)?;
        let rhs = provider.scatter(&middle, &f13, cfg)?;
        Ok(lhs.distance(&rhs))
    })
}
