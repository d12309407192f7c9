//! The linear sector of the dynamical group: words in `S(F)^{±1}` reduced to
//! Weyl canonical form `e^{iθ} exp(i(a·Q + b·Q̇))`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{DynError, Result};
use crate::functionals::{h_constant, moments, Functional, HConvention};

/// Tolerance used when comparing canonical forms.
pub const WEYL_EQ_TOL: f64 = 1e-12;

/// Reduces a phase to `(-π, π]`. Phases already in range are returned
/// untouched so tiny phases keep full relative precision.
pub fn reduce_phase(theta: f64) -> f64 {
    if theta > -PI && theta <= PI {
        return theta;
    }
    let r = (theta + PI).rem_euclid(TAU) - PI;
    if r <= -PI {
        r + TAU
    } else {
        r
    }
}

/// Distance between two phases on the circle.
pub fn phase_distance(a: f64, b: f64) -> f64 {
    reduce_phase(a - b).abs()
}

/// `e^{iθ} exp(i(a·Q + b·Q̇))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylElement {
    pub theta: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl WeylElement {
    pub fn new(theta: f64, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(DynError::DimensionMismatch {
                expected: a.len(),
                found: b.len(),
            });
        }
        if a.is_empty() {
            return Err(DynError::InvalidInput("dimension must be at least 1".into()));
        }
        Ok(WeylElement {
            theta: reduce_phase(theta),
            a,
            b,
        })
    }

    pub fn identity(dim: usize) -> Self {
        WeylElement {
            theta: 0.0,
            a: vec![0.0; dim],
            b: vec![0.0; dim],
        }
    }

    /// A central element `e^{iθ}`.
    pub fn phase(dim: usize, theta: f64) -> Self {
        WeylElement {
            theta: reduce_phase(theta),
            ..WeylElement::identity(dim)
        }
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    /// Symplectic cocycle `σ(v₁, v₂) = a₁·b₂ - b₁·a₂`.
    pub fn symplectic(&self, other: &WeylElement) -> f64 {
        dot(&self.a, &other.b) - dot(&self.b, &other.a)
    }

    pub fn multiply(&self, other: &WeylElement) -> Result<WeylElement> {
        if self.dim() != other.dim() {
            return Err(DynError::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(WeylElement {
            theta: reduce_phase(self.theta + other.theta - 0.5 * self.symplectic(other)),
            a: self.a.iter().zip(&other.a).map(|(x, y)| x + y).collect(),
            b: self.b.iter().zip(&other.b).map(|(x, y)| x + y).collect(),
        })
    }

    pub fn inverse(&self) -> WeylElement {
        WeylElement {
            theta: reduce_phase(-self.theta),
            a: self.a.iter().map(|x| -x).collect(),
            b: self.b.iter().map(|x| -x).collect(),
        }
    }

    /// Equality of canonical forms: phase modulo 2π, then `a` and `b`.
    pub fn approx_eq(&self, other: &WeylElement, tol: f64) -> bool {
        self.dim() == other.dim()
            && phase_distance(self.theta, other.theta) <= tol
            && self.a.iter().zip(&other.a).all(|(x, y)| (x - y).abs() <= tol)
            && self.b.iter().zip(&other.b).all(|(x, y)| (x - y).abs() <= tol)
    }

    /// Largest component-wise deviation from `other` (phase taken mod 2π).
    pub fn distance(&self, other: &WeylElement) -> f64 {
        let mut d = phase_distance(self.theta, other.theta);
        for (x, y) in self.a.iter().zip(&other.a).chain(self.b.iter().zip(&other.b)) {
            d = d.max((x - y).abs());
        }
        d
    }
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// The Weyl element represented by `S(F)` for a linear-sector functional:
/// `a = ∫ f`, `b = ∫ t f`, `θ = c - h(f)` with the consistent `h`.
pub fn weyl_of(functional: &Functional) -> Result<WeylElement> {
    if !functional.is_linear_sector() {
        return Err(DynError::NotLinearSector);
    }
    let (a, b) = moments(functional.density());
    let theta = functional.constant_part() - h_constant(functional.density(), HConvention::Consistent);
    Ok(WeylElement {
        theta: reduce_phase(theta),
        a,
        b,
    })
}

/// One factor `S(F)^{exp}` of a word.
#[derive(Debug, Clone, PartialEq)]
pub struct WordFactor {
    pub functional: Functional,
    pub inverse: bool,
}

/// `e^{i·prefactor} Π S(F_j)^{±1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupWord {
    dim: usize,
    prefactor: f64,
    factors: Vec<WordFactor>,
}

impl GroupWord {
    pub fn new(dim: usize, prefactor: f64, factors: Vec<WordFactor>) -> Result<Self> {
        if dim == 0 {
            return Err(DynError::InvalidInput("dimension must be at least 1".into()));
        }
        for f in &factors {
            if f.functional.dim() != dim {
                return Err(DynError::DimensionMismatch {
                    expected: dim,
                    found: f.functional.dim(),
                });
            }
        }
        Ok(GroupWord {
            dim,
            prefactor,
            factors,
        })
    }

    pub fn empty(dim: usize) -> Self {
        GroupWord {
            dim,
            prefactor: 0.0,
            factors: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn prefactor(&self) -> f64 {
        self.prefactor
    }

    pub fn factors(&self) -> &[WordFactor] {
        &self.factors
    }

    /// Appends `S(F)` on the right.
    pub fn then(mut self, functional: Functional) -> Self {
        self.factors.push(WordFactor {
            functional,
            inverse: false,
        });
        self
    }

    /// Appends `S(F)⁻¹` on the right.
    pub fn then_inverse(mut self, functional: Functional) -> Self {
        self.factors.push(WordFactor {
            functional,
            inverse: true,
        });
        self
    }

    /// The word followed by its formal inverse (reversed, exponents flipped).
    pub fn with_formal_inverse(&self) -> GroupWord {
        let mut factors = self.factors.clone();
        factors.extend(self.factors.iter().rev().map(|f| WordFactor {
            functional: f.functional.clone(),
            inverse: !f.inverse,
        }));
        GroupWord {
            dim: self.dim,
            prefactor: 0.0,
            factors,
        }
    }
}

/// Folds a linear-sector word left to right into its canonical form.
pub fn normalize(word: &GroupWord) -> Result<WeylElement> {
    let mut acc = WeylElement::phase(word.dim, word.prefactor);
    for factor in &word.factors {
        let w = weyl_of(&factor.functional)?;
        let w = if factor.inverse { w.inverse() } else { w };
        acc = acc.multiply(&w)?;
    }
    Ok(acc)
}

/// Phase of the group commutator `W₁ W₂ W₁⁻¹ W₂⁻¹`, i.e. `-σ(v₁, v₂)`.
pub fn group_commutator(w1: &WeylElement, w2: &WeylElement) -> Result<f64> {
    let product = w1.multiply(w2)?.multiply(&w1.inverse())?.multiply(&w2.inverse())?;
    Ok(product.theta)
}

/// `[Q_k, Q̇_l]` extracted from group commutators of `exp(iεQ_k)` and
/// `exp(iεQ̇_l)`: the phase is `-ε² [Q_k, Q̇_l]/i`.
pub fn recover_commutators(dim: usize, eps: f64) -> Result<Vec<Vec<Complex64>>> {
    if !(eps > 0.0) {
        return Err(DynError::InvalidInput(format!("ε must be positive, got {eps}")));
    }
    let mut table = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for (k, row) in table.iter_mut().enumerate() {
        for (l, entry) in row.iter_mut().enumerate() {
            let mut q = WeylElement::identity(dim);
            q.a[k] = eps;
            let mut p = WeylElement::identity(dim);
            p.b[l] = eps;
            let phase = group_commutator(&q, &p)?;
            *entry = Complex64::new(0.0, -phase / (eps * eps));
        }
    }
    Ok(table)
}

/// Commutators among the `Q` or among the `Q̇`, extracted the same way.
/// `position = true` probes `[Q_k, Q_l]`, otherwise `[Q̇_k, Q̇_l]`.
pub fn recover_same_type_commutators(
    dim: usize,
    eps: f64,
    position: bool,
) -> Result<Vec<Vec<Complex64>>> {
    let mut table = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for (k, row) in table.iter_mut().enumerate() {
        for (l, entry) in row.iter_mut().enumerate() {
            let mut w1 = WeylElement::identity(dim);
            let mut w2 = WeylElement::identity(dim);
            if position {
                w1.a[k] = eps;
                w2.a[l] = eps;
            } else {
                w1.b[k] = eps;
                w2.b[l] = eps;
            }
            let phase = group_commutator(&w1, &w2)?;
            *entry = Complex64::new(0.0, -phase / (eps * eps));
        }
    }
    Ok(table)
}
