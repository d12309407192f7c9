use std::path::Path;
use std::sync::Arc;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use dynalg::functionals::HConvention;
use dynalg::lab::{Grid, PropagatorConfig, SignConvention};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Weyl,
    Loop,
    Causal,
    Moment,
    #[value(name = "euler_lagrange")]
    EulerLagrange,
    Interaction,
    Convergence,
}

impl Suite {
    /// Default point count. Suites that switch potentials on and off use a
    /// box twice as wide so the high-momentum halo stays off the boundary.
    fn default_points(self) -> usize {
        match self {
            Suite::Weyl | Suite::Moment | Suite::EulerLagrange => 2048,
            Suite::Loop | Suite::Causal | Suite::Interaction | Suite::Convergence => 4096,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HChoice {
    #[default]
    Consistent,
    Printed,
}

impl From<HChoice> for HConvention {
    fn from(h: HChoice) -> Self {
        match h {
            HChoice::Consistent => HConvention::Consistent,
            HChoice::Printed => HConvention::Printed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignChoice {
    #[default]
    S4,
    S2,
}

impl From<SignChoice> for SignConvention {
    fn from(s: SignChoice) -> Self {
        match s {
            SignChoice::S4 => SignConvention::S4,
            SignChoice::S2 => SignConvention::S2,
        }
    }
}

pub const DEFAULT_DT: f64 = 1e-3;

/// Grid spacing shared by every suite; `n` only sets the extent.
pub const SPACING: f64 = 40.0 / 2048.0;

/// Time span holding every randomized support.
pub const WINDOW: (f64, f64) = (-4.0, 4.0);

fn default_dt() -> f64 {
    DEFAULT_DT
}

/// Everything a suite run depends on. The seed fixes every random draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub suite: Suite,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default)]
    pub h_convention: HChoice,
    #[serde(default)]
    pub sign_convention: SignChoice,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let scenario: Scenario = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.dt > 0.0 && self.dt <= 0.1) {
            return Err(CliError::Config(format!("dt must lie in (0, 0.1], got {}", self.dt)));
        }
        if let Some(tol) = self.tol {
            if !(tol > 0.0) || !tol.is_finite() {
                return Err(CliError::Config(format!("tol must be positive, got {tol}")));
            }
        }
        if let Some(n) = self.n {
            if n < 2 || !n.is_power_of_two() {
                return Err(CliError::Config(format!("n must be a power of two >= 2, got {n}")));
            }
        }
        Ok(())
    }

    pub fn points(&self) -> usize {
        self.n.unwrap_or_else(|| self.suite.default_points())
    }

    /// Centered grid of `points()` samples at the standard spacing.
    pub fn grid(&self) -> Result<Arc<Grid>, CliError> {
        let length = self.points() as f64 * SPACING;
        Ok(Grid::new(self.points(), -0.5 * length, length)?)
    }

    pub fn h(&self) -> HConvention {
        self.h_convention.into()
    }

    /// Propagation over `WINDOW`, stretched to a whole number of steps.
    pub fn propagator(&self, dt: f64) -> Result<PropagatorConfig, CliError> {
        let steps = ((WINDOW.1 - WINDOW.0) / dt - 1e-9).ceil();
        Ok(PropagatorConfig::new(dt, WINDOW.0, WINDOW.0 + steps * dt)?.with_sign(self.sign_convention.into()))
    }
}
