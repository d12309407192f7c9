//! Perturbation functionals `F[x] = ∫ f·x dt + c + Σ_k ∫ g_k(t) V_k(x(t) + s_k(t)) dt`
//! and the exact calculus on their linear parts.

mod kernel;
mod paths;
mod poly;

pub use kernel::{
    delta_pairing, h_constant, kernel_1d, kernel_integral, moment_equivalent, moments, HConvention,
};
pub use paths::{loop_from_difference, LoopPath, SampledPath};
pub use poly::{Piece, PiecewisePoly};

use crate::error::{DynError, Result};
use crate::quadrature;

/// Absolute tolerance for quadrature of Gaussian potential terms.
pub const GAUSSIAN_QUAD_TOL: f64 = 1e-10;

/// Catalog of spatial potential shapes.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// `V(x) = Σ_j c_j x^j` with `j <= 4`; one-dimensional only.
    Polynomial { coeffs: Vec<f64> },
    /// `V(x) = A exp(-|x - c|² / (2 w²))`.
    Gaussian {
        amplitude: f64,
        center: Vec<f64>,
        width: f64,
    },
}

impl Shape {
    pub fn polynomial(coeffs: &[f64]) -> Shape {
        Shape::Polynomial {
            coeffs: coeffs.to_vec(),
        }
    }

    pub fn gaussian(amplitude: f64, center: f64, width: f64) -> Shape {
        Shape::Gaussian {
            amplitude,
            center: vec![center],
            width,
        }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        match self {
            Shape::Polynomial { coeffs } => {
                if coeffs.len() > 5 {
                    return Err(DynError::InvalidInput(format!(
                        "polynomial potential of degree {} exceeds 4",
                        coeffs.len() - 1
                    )));
                }
                if dim != 1 {
                    return Err(DynError::InvalidInput(
                        "polynomial potentials are one-dimensional".into(),
                    ));
                }
                if coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(DynError::InvalidInput("non-finite potential coefficient".into()));
                }
            }
            Shape::Gaussian {
                amplitude,
                center,
                width,
            } => {
                if !(*width > 0.0) || !width.is_finite() {
                    return Err(DynError::InvalidInput(format!(
                        "Gaussian width must be positive, got {width}"
                    )));
                }
                if center.len() != dim {
                    return Err(DynError::DimensionMismatch {
                        expected: dim,
                        found: center.len(),
                    });
                }
                if !amplitude.is_finite() {
                    return Err(DynError::InvalidInput("non-finite amplitude".into()));
                }
            }
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Shape::Polynomial { coeffs } => coeffs.iter().all(|&c| c == 0.0),
            Shape::Gaussian { amplitude, .. } => *amplitude == 0.0,
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            Shape::Polynomial { coeffs } => {
                let y = x[0];
                coeffs.iter().rev().fold(0.0, |acc, c| acc * y + c)
            }
            Shape::Gaussian {
                amplitude,
                center,
                width,
            } => {
                let r2: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
                amplitude * (-r2 / (2.0 * width * width)).exp()
            }
        }
    }

    /// Value for a one-dimensional argument.
    pub fn value_1d(&self, y: f64) -> f64 {
        self.value(std::slice::from_ref(&y))
    }

    pub fn scaled(&self, factor: f64) -> Shape {
        match self {
            Shape::Polynomial { coeffs } => Shape::Polynomial {
                coeffs: coeffs.iter().map(|c| c * factor).collect(),
            },
            Shape::Gaussian {
                amplitude,
                center,
                width,
            } => Shape::Gaussian {
                amplitude: amplitude * factor,
                center: center.clone(),
                width: *width,
            },
        }
    }
}

/// `∫ g_k(t) V_k(x(t) + s_k(t)) dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialTerm {
    pub window: PiecewisePoly,
    pub shape: Shape,
    pub shift: Option<LoopPath>,
}

impl PotentialTerm {
    pub fn new(window: PiecewisePoly, shape: Shape) -> Self {
        PotentialTerm {
            window,
            shape,
            shift: None,
        }
    }

    fn is_trivial(&self) -> bool {
        self.window.is_zero() || self.shape.is_zero()
    }

    /// Spatial argument shift at time `t` (zero when unshifted).
    pub fn shift_at(&self, t: f64, dim: usize) -> Vec<f64> {
        match &self.shift {
            Some(s) => s.eval(t),
            None => vec![0.0; dim],
        }
    }
}

/// A perturbation functional. Values are immutable; every operation returns
/// a new functional.
#[derive(Debug, Clone, PartialEq)]
pub struct Functional {
    dim: usize,
    density: Vec<PiecewisePoly>,
    constant: f64,
    potentials: Vec<PotentialTerm>,
}

/// How the constant of a linear functional is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConstantMode {
    Auto(HConvention),
    Explicit(f64),
}

impl Functional {
    pub fn new(
        dim: usize,
        density: Vec<PiecewisePoly>,
        constant: f64,
        potentials: Vec<PotentialTerm>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(DynError::InvalidInput("dimension must be at least 1".into()));
        }
        if density.len() != dim {
            return Err(DynError::DimensionMismatch {
                expected: dim,
                found: density.len(),
            });
        }
        if !constant.is_finite() {
            return Err(DynError::InvalidInput("non-finite constant".into()));
        }
        let mut kept = Vec::with_capacity(potentials.len());
        for term in potentials {
            term.shape.validate(dim)?;
            if let Some(s) = &term.shift {
                if s.dim() != dim {
                    return Err(DynError::DimensionMismatch {
                        expected: dim,
                        found: s.dim(),
                    });
                }
            }
            if !term.is_trivial() {
                kept.push(term);
            }
        }
        Ok(Functional {
            dim,
            density,
            constant,
            potentials: kept,
        })
    }

    /// The central functional `F_h[x] = h`.
    pub fn constant(dim: usize, value: f64) -> Self {
        Functional {
            dim,
            density: vec![PiecewisePoly::zero(); dim],
            constant: value,
            potentials: Vec::new(),
        }
    }

    pub fn zero(dim: usize) -> Self {
        Functional::constant(dim, 0.0)
    }

    /// `F_f[x] = ∫ f·x dt + c`, with `c = h(f)` or an explicit value.
    pub fn linear(density: Vec<PiecewisePoly>, mode: ConstantMode) -> Result<Self> {
        let constant = match mode {
            ConstantMode::Auto(conv) => h_constant(&density, conv),
            ConstantMode::Explicit(c) => c,
        };
        Functional::new(density.len(), density, constant, Vec::new())
    }

    /// A functional consisting of a single potential term.
    pub fn potential(dim: usize, term: PotentialTerm) -> Result<Self> {
        Functional::new(dim, vec![PiecewisePoly::zero(); dim], 0.0, vec![term])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn density(&self) -> &[PiecewisePoly] {
        &self.density
    }

    pub fn constant_part(&self) -> f64 {
        self.constant
    }

    pub fn potentials(&self) -> &[PotentialTerm] {
        &self.potentials
    }

    pub fn is_linear_sector(&self) -> bool {
        self.potentials.is_empty()
    }

    pub fn is_central(&self) -> bool {
        self.potentials.is_empty() && self.density.iter().all(PiecewisePoly::is_zero)
    }

    /// Hull of the density supports and the potential windows.
    pub fn support(&self) -> Option<(f64, f64)> {
        paths::hull(
            self.density
                .iter()
                .chain(self.potentials.iter().map(|p| &p.window)),
        )
    }

    fn check_dim(&self, other: usize) -> Result<()> {
        if self.dim != other {
            return Err(DynError::DimensionMismatch {
                expected: self.dim,
                found: other,
            });
        }
        Ok(())
    }

    /// Pointwise sum: densities and constants add, potential lists concatenate.
    pub fn add(&self, other: &Functional) -> Result<Functional> {
        self.check_dim(other.dim)?;
        Ok(Functional {
            dim: self.dim,
            density: self
                .density
                .iter()
                .zip(&other.density)
                .map(|(a, b)| a.add(b))
                .collect(),
            constant: self.constant + other.constant,
            potentials: self
                .potentials
                .iter()
                .chain(&other.potentials)
                .cloned()
                .collect(),
        })
    }

    /// `λ F`; potential terms are scaled through their windows.
    pub fn scale(&self, factor: f64) -> Functional {
        Functional {
            dim: self.dim,
            density: self.density.iter().map(|p| p.scale(factor)).collect(),
            constant: self.constant * factor,
            potentials: if factor == 0.0 {
                Vec::new()
            } else {
                self.potentials
                    .iter()
                    .map(|t| PotentialTerm {
                        window: t.window.scale(factor),
                        ..t.clone()
                    })
                    .collect()
            },
        }
    }

    pub fn neg(&self) -> Functional {
        self.scale(-1.0)
    }

    pub fn with_constant(&self, constant: f64) -> Functional {
        Functional {
            constant,
            ..self.clone()
        }
    }

    /// `F^{x₀}[x] = F[x + x₀]`.
    pub fn shift_by_loop(&self, x0: &LoopPath) -> Result<Functional> {
        self.check_dim(x0.dim())?;
        if x0.is_zero() {
            return Ok(self.clone());
        }
        let gained: f64 = self
            .density
            .iter()
            .zip(x0.position())
            .map(|(f, x)| f.inner(x))
            .sum();
        let potentials = self
            .potentials
            .iter()
            .map(|t| {
                let shift = match &t.shift {
                    Some(s) => s.compose(x0)?,
                    None => x0.clone(),
                };
                Ok(PotentialTerm {
                    shift: Some(shift),
                    ..t.clone()
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Functional {
            dim: self.dim,
            density: self.density.clone(),
            constant: self.constant + gained,
            potentials,
        })
    }

    /// Shifts every time profile by `tau`.
    pub fn time_translate(&self, tau: f64) -> Functional {
        Functional {
            dim: self.dim,
            density: self.density.iter().map(|p| p.translate(tau)).collect(),
            constant: self.constant,
            potentials: self
                .potentials
                .iter()
                .map(|t| PotentialTerm {
                    window: t.window.translate(tau),
                    shape: t.shape.clone(),
                    shift: t.shift.as_ref().map(|s| s.translate(tau)),
                })
                .collect(),
        }
    }

    /// `F[x]`: linear and polynomial parts exactly, Gaussian terms by adaptive
    /// quadrature.
    pub fn evaluate(&self, path: &SampledPath) -> Result<f64> {
        self.check_dim(path.dim())?;
        if let Some((lo, hi)) = self.support() {
            let (plo, phi) = path.interval();
            if plo > lo || phi < hi {
                return Err(DynError::DomainTooSmall {
                    path_lo: plo,
                    path_hi: phi,
                    lo,
                    hi,
                });
            }
        }
        let linear: f64 = self
            .density
            .iter()
            .zip(path.components())
            .map(|(f, x)| f.inner(x))
            .sum();
        let mut total = linear + self.constant;
        for term in &self.potentials {
            total += self.evaluate_term(term, path)?;
        }
        Ok(total)
    }

    fn evaluate_term(&self, term: &PotentialTerm, path: &SampledPath) -> Result<f64> {
        let argument: Vec<PiecewisePoly> = match &term.shift {
            Some(s) => path
                .components()
                .iter()
                .zip(s.position())
                .map(|(x, y)| x.add(y))
                .collect(),
            None => path.components().to_vec(),
        };
        match &term.shape {
            Shape::Polynomial { coeffs } => {
                let y = &argument[0];
                let mut power = term.window.clone();
                let mut total = 0.0;
                for (j, c) in coeffs.iter().enumerate() {
                    if j > 0 {
                        power = power.mul(y);
                    }
                    total += c * power.integral();
                }
                Ok(total)
            }
            Shape::Gaussian { .. } => {
                let mut breaks: Vec<f64> = argument.iter().flat_map(|p| p.breakpoints()).collect();
                breaks.sort_by(f64::total_cmp);
                breaks.dedup();
                let segments = term.window.refine(&breaks);
                let tol = GAUSSIAN_QUAD_TOL / (segments.len().max(1) as f64);
                let mut total = 0.0;
                for seg in segments {
                    let integrand = |t: f64| {
                        let x: Vec<f64> = argument.iter().map(|p| p.eval(t)).collect();
                        seg.eval(t) * term.shape.value(&x)
                    };
                    total += quadrature::adaptive(integrand, seg.lo, seg.hi, tol);
                }
                Ok(total)
            }
        }
    }
}

/// The boundary action `δL₀(ẋ₀)`: density `-ẍ₀` and constant `½ ∫ ẋ₀²`.
pub fn boundary_action(x0: &LoopPath) -> Functional {
    Functional {
        dim: x0.dim(),
        density: x0.acceleration().iter().map(|a| a.scale(-1.0)).collect(),
        constant: 0.5 * x0.kinetic_integral(),
        potentials: Vec::new(),
    }
}
