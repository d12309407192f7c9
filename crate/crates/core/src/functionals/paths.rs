//! Loops (compactly supported C¹ deformations) and sampled test paths.

use super::kernel::{moment_gap, moment_tolerance};
use super::poly::PiecewisePoly;
use crate::error::{DynError, Result};

/// Largest jump of `p` across its breakpoints, counting the support ends
/// (where the outside value is zero).
fn max_jump(p: &PiecewisePoly) -> f64 {
    let pieces = p.pieces();
    let mut worst = 0.0_f64;
    let mut prev: Option<(f64, f64)> = None; // (hi, value at hi)
    for piece in pieces {
        let left = match prev {
            Some((hi, v)) if hi == piece.lo => v,
            Some((_, v)) => {
                // gap: the function is zero between pieces
                worst = worst.max(v.abs());
                0.0
            }
            None => 0.0,
        };
        let right = piece.eval(piece.lo);
        worst = worst.max((right - left).abs());
        prev = Some((piece.hi, piece.eval(piece.hi)));
    }
    if let Some((_, v)) = prev {
        worst = worst.max(v.abs());
    }
    worst
}

/// A loop `x₀`: compactly supported, with continuous position and velocity.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopPath {
    position: Vec<PiecewisePoly>,
    velocity: Vec<PiecewisePoly>,
    acceleration: Vec<PiecewisePoly>,
}

impl LoopPath {
    const CONTINUITY_TOL: f64 = 1e-9;

    /// Builds a loop from its position components, checking C¹ continuity.
    pub fn new(position: Vec<PiecewisePoly>) -> Result<Self> {
        if position.is_empty() {
            return Err(DynError::InvalidInput("loop needs dim >= 1".into()));
        }
        let velocity: Vec<_> = position.iter().map(PiecewisePoly::derivative).collect();
        for (k, (x, v)) in position.iter().zip(&velocity).enumerate() {
            let scale = 1.0 + x.coeff_scale();
            let (jx, jv) = (max_jump(x), max_jump(v));
            if jx > Self::CONTINUITY_TOL * scale || jv > Self::CONTINUITY_TOL * scale {
                return Err(DynError::InvalidInput(format!(
                    "loop component {k} is not C¹ (jumps: x {jx:e}, ẋ {jv:e})"
                )));
            }
        }
        let acceleration = velocity.iter().map(PiecewisePoly::derivative).collect();
        Ok(LoopPath {
            position,
            velocity,
            acceleration,
        })
    }

    /// Integrates `ẍ₀` twice from `-∞`. The acceleration must have vanishing
    /// zeroth and first moments, otherwise the loop would not close.
    pub fn from_acceleration(acceleration: Vec<PiecewisePoly>) -> Result<Self> {
        if acceleration.is_empty() {
            return Err(DynError::InvalidInput("loop needs dim >= 1".into()));
        }
        let zeros = vec![PiecewisePoly::zero(); acceleration.len()];
        let (dm0, dm1) = moment_gap(&acceleration, &zeros);
        let tol = moment_tolerance(&acceleration, &zeros);
        if dm0 > tol || dm1 > tol {
            return Err(DynError::MomentMismatch { dm0, dm1 });
        }
        let velocity: Vec<_> = acceleration.iter().map(|a| a.cumulative().0).collect();
        let position = velocity.iter().map(|v| v.cumulative().0).collect();
        Ok(LoopPath {
            position,
            velocity,
            acceleration,
        })
    }

    pub fn zero(dim: usize) -> Self {
        LoopPath {
            position: vec![PiecewisePoly::zero(); dim],
            velocity: vec![PiecewisePoly::zero(); dim],
            acceleration: vec![PiecewisePoly::zero(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.position.len()
    }

    pub fn position(&self) -> &[PiecewisePoly] {
        &self.position
    }

    pub fn velocity(&self) -> &[PiecewisePoly] {
        &self.velocity
    }

    pub fn acceleration(&self) -> &[PiecewisePoly] {
        &self.acceleration
    }

    pub fn is_zero(&self) -> bool {
        self.position.iter().all(PiecewisePoly::is_zero)
            && self.acceleration.iter().all(PiecewisePoly::is_zero)
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        self.position.iter().map(|p| p.eval(t)).collect()
    }

    pub fn support(&self) -> Option<(f64, f64)> {
        hull(self.position.iter().chain(&self.acceleration))
    }

    /// `∫ |ẋ₀|² dt`.
    pub fn kinetic_integral(&self) -> f64 {
        self.velocity.iter().map(|v| v.inner(v)).sum()
    }

    /// Pointwise sum of two loops.
    pub fn compose(&self, other: &LoopPath) -> Result<LoopPath> {
        if self.dim() != other.dim() {
            return Err(DynError::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let zip = |a: &[PiecewisePoly], b: &[PiecewisePoly]| -> Vec<PiecewisePoly> {
            a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
        };
        Ok(LoopPath {
            position: zip(&self.position, &other.position),
            velocity: zip(&self.velocity, &other.velocity),
            acceleration: zip(&self.acceleration, &other.acceleration),
        })
    }

    pub fn translate(&self, tau: f64) -> LoopPath {
        let shift = |v: &[PiecewisePoly]| v.iter().map(|p| p.translate(tau)).collect();
        LoopPath {
            position: shift(&self.position),
            velocity: shift(&self.velocity),
            acceleration: shift(&self.acceleration),
        }
    }

    pub fn scale(&self, factor: f64) -> LoopPath {
        let sc = |v: &[PiecewisePoly]| v.iter().map(|p| p.scale(factor)).collect();
        LoopPath {
            position: sc(&self.position),
            velocity: sc(&self.velocity),
            acceleration: sc(&self.acceleration),
        }
    }
}

pub(crate) fn hull<'a>(polys: impl Iterator<Item = &'a PiecewisePoly>) -> Option<(f64, f64)> {
    polys.filter_map(PiecewisePoly::support).reduce(|(a, b), (c, d)| (a.min(c), b.max(d)))
}

/// The loop `x₀(t) = ∫_{-∞}^t (t - s) (f' - f)(s) ds` of a moment-matched pair.
pub fn loop_from_difference(f: &[PiecewisePoly], f_prime: &[PiecewisePoly]) -> Result<LoopPath> {
    if f.len() != f_prime.len() {
        return Err(DynError::DimensionMismatch {
            expected: f.len(),
            found: f_prime.len(),
        });
    }
    let (dm0, dm1) = moment_gap(f, f_prime);
    let tol = moment_tolerance(f, f_prime);
    if dm0 > tol || dm1 > tol {
        return Err(DynError::MomentMismatch { dm0, dm1 });
    }
    let diff: Vec<PiecewisePoly> = f_prime.iter().zip(f).map(|(a, b)| a.sub(b)).collect();
    LoopPath::from_acceleration(diff)
}

/// A test orbit `x(t)` given on the interval `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPath {
    components: Vec<PiecewisePoly>,
    lo: f64,
    hi: f64,
}

impl SampledPath {
    pub fn new(components: Vec<PiecewisePoly>, lo: f64, hi: f64) -> Result<Self> {
        if components.is_empty() {
            return Err(DynError::InvalidInput("path needs dim >= 1".into()));
        }
        if !(lo <= hi) {
            return Err(DynError::InvalidInput(format!("path interval [{lo}, {hi}] is empty")));
        }
        let components = components
            .into_iter()
            .map(|c| {
                let pieces = c
                    .pieces()
                    .iter()
                    .filter(|p| p.hi > lo && p.lo < hi)
                    .map(|p| p.restrict(p.lo.max(lo), p.hi.min(hi)))
                    .collect();
                PiecewisePoly::new(pieces)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SampledPath { components, lo, hi })
    }

    /// A path given by global polynomial coefficients, one list per component.
    pub fn polynomial(coeffs: &[Vec<f64>], lo: f64, hi: f64) -> Result<Self> {
        let comps = coeffs
            .iter()
            .map(|c| PiecewisePoly::from_global(lo, hi, c))
            .collect::<Result<Vec<_>>>()?;
        SampledPath::new(comps, lo, hi)
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn components(&self) -> &[PiecewisePoly] {
        &self.components
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        self.components.iter().map(|p| p.eval(t)).collect()
    }

    /// `x + x₀` on the same interval.
    pub fn displaced(&self, x0: &LoopPath) -> Result<SampledPath> {
        if x0.dim() != self.dim() {
            return Err(DynError::DimensionMismatch {
                expected: self.dim(),
                found: x0.dim(),
            });
        }
        let comps = self
            .components
            .iter()
            .zip(x0.position())
            .map(|(x, y)| x.add(y))
            .collect();
        SampledPath::new(comps, self.lo, self.hi)
    }
}
