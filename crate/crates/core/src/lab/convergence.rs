//! Step-size convergence studies.

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Serialized as the pair `[dt, residual]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergencePoint(pub f64, pub f64);

impl ConvergencePoint {
    pub fn dt(&self) -> f64 {
        self.0
    }

    pub fn residual(&self) -> f64 {
        self.1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub points: Vec<ConvergencePoint>,
    pub order: f64,
}

/// `dt0, dt0/2, …` with `halvings` halvings.
pub fn halving_steps(dt0: f64, halvings: usize) -> Vec<f64> {
    (0..=halvings).map(|k| dt0 / f64::powi(2.0, k as i32)).collect()
}

/// Least-squares slope of `ln residual` against `ln dt`.
pub fn fitted_order(points: &[ConvergencePoint]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.dt().ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.residual().ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Evaluates `residual(dt)` on each step and fits the order.
pub fn study(dts: &[f64], mut residual: impl FnMut(f64) -> Result<f64>) -> Result<ConvergenceStudy> {
    let points = dts
        .iter()
        .map(|&dt| Ok(ConvergencePoint(dt, residual(dt)?)))
        .collect::<Result<Vec<_>>>()?;
    let order = fitted_order(&points);
    Ok(ConvergenceStudy { points, order })
}
