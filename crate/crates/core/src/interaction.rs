//! Relative operations `S_χ(F) = S(-χV)⁻¹ S(F - χV)` for the time-cutoff
//! Lagrangean `L_χ = ẋ²/2 - χ(t) V(x)`.

use serde::Serialize;

use crate::error::{DynError, Result};
use crate::functionals::{boundary_action, Functional, LoopPath, PiecewisePoly, PotentialTerm, Shape};
use crate::lab::{
    check_causal_relation, check_dynamical_relation, scattering, scattering_inverse,
    FreeScattering, PropagatorConfig, ScatteringProvider, WaveState,
};

/// An interaction potential switched on by the window `χ`.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionSpec {
    potential: Shape,
    chi: PiecewisePoly,
    core: Option<(f64, f64)>,
}

impl InteractionSpec {
    /// `χ = 1` on `core`, with smoothstep ramps of width `ramp` outside it.
    pub fn new(potential: Shape, core: (f64, f64), ramp: f64) -> Result<Self> {
        let chi = PiecewisePoly::plateau(core.0, core.1, ramp)?;
        let spec = InteractionSpec {
            potential,
            chi,
            core: Some(core),
        };
        spec.chi_functional_checked()?;
        Ok(spec)
    }

    /// An arbitrary window with no designated core.
    pub fn with_window(potential: Shape, chi: PiecewisePoly) -> Result<Self> {
        let spec = InteractionSpec {
            potential,
            chi,
            core: None,
        };
        spec.chi_functional_checked()?;
        Ok(spec)
    }

    pub fn potential(&self) -> &Shape {
        &self.potential
    }

    pub fn chi(&self) -> &PiecewisePoly {
        &self.chi
    }

    pub fn core(&self) -> Option<(f64, f64)> {
        self.core
    }

    pub fn dim(&self) -> usize {
        match &self.potential {
            Shape::Polynomial { .. } => 1,
            Shape::Gaussian { center, .. } => center.len(),
        }
    }

    fn chi_functional_checked(&self) -> Result<Functional> {
        Functional::potential(
            self.dim(),
            PotentialTerm::new(self.chi.clone(), self.potential.clone()),
        )
    }

    /// `χV[x] = ∫ χ(t) V(x(t)) dt`.
    pub fn chi_functional(&self) -> Functional {
        self.chi_functional_checked()
            .expect("validated at construction")
    }

    fn is_trivial(&self) -> bool {
        self.chi_functional().potentials().is_empty()
    }
}

/// `S_χ(F) ψ`.
pub fn relative_scattering(
    psi: &WaveState,
    f: &Functional,
    spec: &InteractionSpec,
    cfg: &PropagatorConfig,
) -> Result<WaveState> {
    if spec.is_trivial() {
        return scattering(psi, f, cfg);
    }
    let coupling = spec.chi_functional().neg();
    let inner = scattering(psi, &f.add(&coupling)?, cfg)?;
    scattering_inverse(&inner, &coupling, cfg)
}

/// `S_χ(F)⁻¹ ψ = S(F - χV)⁻¹ S(-χV) ψ`.
pub fn relative_scattering_inverse(
    psi: &WaveState,
    f: &Functional,
    spec: &InteractionSpec,
    cfg: &PropagatorConfig,
) -> Result<WaveState> {
    if spec.is_trivial() {
        return scattering_inverse(psi, f, cfg);
    }
    let coupling = spec.chi_functional().neg();
    let inner = scattering(psi, &coupling, cfg)?;
    scattering_inverse(&inner, &f.add(&coupling)?, cfg)
}

/// `δL_χ(x₀) = δL₀(ẋ₀) + χV - (χV)^{x₀}`.
pub fn interacting_boundary_action(x0: &LoopPath, spec: &InteractionSpec) -> Result<Functional> {
    let free = boundary_action(x0);
    if x0.is_zero() || spec.is_trivial() {
        return Ok(free);
    }
    let chi_v = spec.chi_functional();
    free.add(&chi_v)?.add(&chi_v.shift_by_loop(x0)?.neg())
}

/// The operations `S_χ` as a provider for the relation checks.
#[derive(Debug, Clone)]
pub struct RelativeScattering {
    pub spec: InteractionSpec,
}

impl ScatteringProvider for RelativeScattering {
    fn scatter(&self, psi: &WaveState, f: &Functional, cfg: &PropagatorConfig) -> Result<WaveState> {
        relative_scattering(psi, f, &self.spec, cfg)
    }

    fn scatter_inverse(
        &self,
        psi: &WaveState,
        f: &Functional,
        cfg: &PropagatorConfig,
    ) -> Result<WaveState> {
        relative_scattering_inverse(psi, f, &self.spec, cfg)
    }

    fn boundary_action(&self, x0: &LoopPath) -> Result<Functional> {
        interacting_boundary_action(x0, &self.spec)
    }
}

/// Inputs for one run of both relations: `F` with loop `x₀` for the
/// dynamical relation, and `F₁` later than `F₂` with `F₃` for the causal one.
#[derive(Debug, Clone)]
pub struct RelationScenario {
    pub functional: Functional,
    pub loop_path: LoopPath,
    pub later: Functional,
    pub earlier: Functional,
    pub background: Functional,
    pub states: Vec<WaveState>,
}

impl RelationScenario {
    fn support(&self) -> Option<(f64, f64)> {
        let loop_support = self.loop_path.support();
        [
            self.functional.support(),
            loop_support,
            self.later.support(),
            self.earlier.support(),
            self.background.support(),
        ]
        .into_iter()
        .flatten()
        .reduce(|a, b| (a.0.min(b.0), a.1.max(b.1)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InteractionReport {
    pub dynamical: f64,
    pub causal: f64,
}

fn run_relations(
    provider: &dyn ScatteringProvider,
    scenario: &RelationScenario,
    cfg: &PropagatorConfig,
) -> Result<InteractionReport> {
    Ok(InteractionReport {
        dynamical: check_dynamical_relation(
            provider,
            &scenario.functional,
            &scenario.loop_path,
            &scenario.states,
            cfg,
        )?,
        causal: check_causal_relation(
            provider,
            &scenario.later,
            &scenario.earlier,
            &scenario.background,
            &scenario.states,
            cfg,
        )?,
    })
}

/// Residuals of both relations for the operations `S_χ`. The scenario must
/// live where `χ = 1`.
pub fn verify_interacting_relations(
    spec: &InteractionSpec,
    scenario: &RelationScenario,
    cfg: &PropagatorConfig,
) -> Result<InteractionReport> {
    let core = spec
        .core()
        .ok_or_else(|| DynError::InvalidInput("interaction window has no core interval".into()))?;
    if let Some((lo, hi)) = scenario.support() {
        if lo < core.0 || hi > core.1 {
            return Err(DynError::InvalidInput(format!(
                "scenario support [{lo}, {hi}] leaves the core [{}, {}]",
                core.0, core.1
            )));
        }
    }
    let provider = RelativeScattering { spec: spec.clone() };
    run_relations(&provider, scenario, cfg)
}

/// The same residuals for the free operations.
pub fn verify_free_relations(scenario: &RelationScenario, cfg: &PropagatorConfig) -> Result<InteractionReport> {
    run_relations(&FreeScattering, scenario, cfg)
}
