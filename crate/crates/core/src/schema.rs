//! JSON documents for functionals, group words and interaction specs.
//!
//! Densities and windows are lists of pieces `{lo, hi, coeffs}` with
//! coefficients in the local variable `t - lo`.
//!
//! ```json
//! {"dim": 1,
//!  "density": [[{"lo": 0, "hi": 1, "coeffs": [1]}]],
//!  "constant": {"mode": "auto_h"},
//!  "potentials": [{"window": [{"lo": 0, "hi": 1, "coeffs": [1]}],
//!                  "shape": "gaussian",
//!                  "params": {"amplitude": 0.5, "center": 0, "width": 1}}]}
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{DynError, Result};
use crate::functionals::{
    ConstantMode, Functional, HConvention, LoopPath, Piece, PiecewisePoly, PotentialTerm, Shape,
};
use crate::interaction::InteractionSpec;
use crate::weyl::{GroupWord, WordFactor};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Center {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl Center {
    fn to_vec(&self) -> Vec<f64> {
        match self {
            Center::Scalar(c) => vec![*c],
            Center::Vector(c) => c.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", content = "params", rename_all = "lowercase", deny_unknown_fields)]
pub enum ShapeDoc {
    Polynomial { coeffs: Vec<f64> },
    Gaussian { amplitude: f64, center: Center, width: f64 },
}

impl ShapeDoc {
    pub fn to_shape(&self) -> Shape {
        match self {
            ShapeDoc::Polynomial { coeffs } => Shape::polynomial(coeffs),
            ShapeDoc::Gaussian {
                amplitude,
                center,
                width,
            } => Shape::Gaussian {
                amplitude: *amplitude,
                center: center.to_vec(),
                width: *width,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialDoc {
    pub window: Vec<Piece>,
    #[serde(flatten)]
    pub shape: ShapeDoc,
    /// Loop positions `x₀`, one piece list per coordinate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<Vec<Vec<Piece>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantKind {
    AutoH,
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantDoc {
    pub mode: ConstantKind,
    #[serde(default)]
    pub value: f64,
}

impl Default for ConstantDoc {
    fn default() -> Self {
        ConstantDoc {
            mode: ConstantKind::Explicit,
            value: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionalDoc {
    #[serde(default)]
    pub dim: Option<usize>,
    #[serde(default)]
    pub density: Vec<Vec<Piece>>,
    #[serde(default)]
    pub constant: ConstantDoc,
    #[serde(default)]
    pub potentials: Vec<PotentialDoc>,
}

fn poly_list(components: &[Vec<Piece>]) -> Result<Vec<PiecewisePoly>> {
    components.iter().map(|c| PiecewisePoly::new(c.clone())).collect()
}

impl FunctionalDoc {
    /// Dimension: explicit, else the density's, else the first potential's.
    pub fn inferred_dim(&self) -> Option<usize> {
        self.dim
            .or((!self.density.is_empty()).then_some(self.density.len()))
            .or_else(|| {
                self.potentials.first().map(|p| match &p.shape {
                    ShapeDoc::Polynomial { .. } => 1,
                    ShapeDoc::Gaussian { center, .. } => center.to_vec().len(),
                })
            })
    }

    /// Builds the functional; `auto_h` constants use `convention`.
    pub fn to_functional(&self, convention: HConvention) -> Result<Functional> {
        let dim = self.inferred_dim().unwrap_or(1);
        let density = if self.density.is_empty() {
            vec![PiecewisePoly::zero(); dim]
        } else {
            poly_list(&self.density)?
        };
        if density.len() != dim {
            return Err(DynError::DimensionMismatch {
                expected: dim,
                found: density.len(),
            });
        }
        let mode = match self.constant.mode {
            ConstantKind::AutoH => ConstantMode::Auto(convention),
            ConstantKind::Explicit => ConstantMode::Explicit(self.constant.value),
        };
        let linear = Functional::linear(density, mode)?;
        let mut potentials = Vec::with_capacity(self.potentials.len());
        for doc in &self.potentials {
            let mut term = PotentialTerm::new(PiecewisePoly::new(doc.window.clone())?, doc.shape.to_shape());
            if let Some(shift) = &doc.shift {
                term.shift = Some(LoopPath::new(poly_list(shift)?)?);
            }
            potentials.push(term);
        }
        Functional::new(dim, linear.density().to_vec(), linear.constant_part(), potentials)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorDoc {
    pub functional: FunctionalDoc,
    /// A nonzero integer power.
    #[serde(default = "one")]
    pub exp: i32,
}

fn one() -> i32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WordDoc {
    #[serde(default)]
    pub prefactor: f64,
    #[serde(default)]
    pub dim: Option<usize>,
    #[serde(default)]
    pub factors: Vec<FactorDoc>,
}

impl WordDoc {
    pub fn to_word(&self, convention: HConvention) -> Result<GroupWord> {
        let dim = self
            .dim
            .or_else(|| self.factors.iter().find_map(|f| f.functional.inferred_dim()))
            .unwrap_or(1);
        let mut factors = Vec::new();
        for doc in &self.factors {
            if doc.exp == 0 {
                return Err(DynError::InvalidInput("factor exponent must be nonzero".into()));
            }
            let functional = doc.functional.to_functional(convention)?;
            for _ in 0..doc.exp.unsigned_abs() {
                factors.push(WordFactor {
                    functional: functional.clone(),
                    inverse: doc.exp < 0,
                });
            }
        }
        GroupWord::new(dim, self.prefactor, factors)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChiDoc {
    pub core: [f64; 2],
    #[serde(default)]
    pub ramp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteractionDoc {
    #[serde(flatten)]
    pub shape: ShapeDoc,
    pub chi: ChiDoc,
}

impl InteractionDoc {
    pub fn to_spec(&self) -> Result<InteractionSpec> {
        InteractionSpec::new(self.shape.to_shape(), (self.chi.core[0], self.chi.core[1]), self.chi.ramp)
    }
}

pub fn parse_functional(json: &str, convention: HConvention) -> Result<Functional> {
    serde_json::from_str::<FunctionalDoc>(json)?.to_functional(convention)
}

pub fn parse_word(json: &str, convention: HConvention) -> Result<GroupWord> {
    serde_json::from_str::<WordDoc>(json)?.to_word(convention)
}

pub fn parse_interaction(json: &str) -> Result<InteractionSpec> {
    serde_json::from_str::<InteractionDoc>(json)?.to_spec()
}
