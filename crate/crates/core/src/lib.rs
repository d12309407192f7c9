//! Dynamical algebras in the linear and interacting sectors.
//!
//! * [`functionals`]: piecewise-polynomial perturbation functionals, loops,
//!   moments and the `|s - s'|` kernel, all in closed form.
//! * [`weyl`]: words in the scattering symbols `S(F)` reduced to Weyl
//!   canonical form.
//! * [`lab`]: split-operator realization of `S(F)` on a periodic grid and
//!   numerical checks of the defining relations.
//! * [`interaction`]: relative (interaction-picture) operations.
//! * [`scenario`]: seeded random functionals, loops, paths and states.
//! * [`schema`]: JSON documents for functionals, words and interaction specs.

pub mod error;
pub mod functionals;
pub mod interaction;
pub mod lab;
pub mod quadrature;
pub mod scenario;
pub mod schema;
pub mod weyl;

pub use error::{DynError, Result};
