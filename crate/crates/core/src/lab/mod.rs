//! Numerical realization of `S(F)` on a periodic one-dimensional grid.

mod convergence;
mod grid;
mod propagate;
mod relations;
mod state;

pub use convergence::{fitted_order, halving_steps, study, ConvergencePoint, ConvergenceStudy};
pub use grid::Grid;
pub use propagate::{
    evolve, scattering, scattering_inverse, PropagatorConfig, Scheme, SignConvention,
};
pub use relations::{
    check_causal_relation, check_dynamical_relation, check_ordering, FreeScattering,
    ScatteringProvider,
};
pub use state::{
    coherent_state, free_evolve, weyl_apply, WaveState, EVOLUTION_TAIL_TOL, PREPARATION_TAIL_TOL,
    REFERENCE_WIDTH,
};
