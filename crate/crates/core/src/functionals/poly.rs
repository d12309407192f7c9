//! Compactly supported piecewise polynomials in time.
//!
//! Each piece stores its coefficients in the local variable `u = t - lo`, which
//! keeps integrals well conditioned and makes time translation exact (only the
//! breakpoints move).

use serde::{Deserialize, Serialize};

use crate::error::{DynError, Result};

/// One polynomial piece `p(t) = Σ c_k (t - lo)^k` on `[lo, hi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub coeffs: Vec<f64>,
}

impl Piece {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn eval(&self, t: f64) -> f64 {
        horner(&self.coeffs, t - self.lo)
    }

    /// `∫_lo^hi (t - lo)^k p(t) dt` for the local power `k`.
    fn local_moment(&self, k: usize) -> f64 {
        let h = self.width();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| c * h.powi((j + k + 1) as i32) / (j + k + 1) as f64)
            .sum()
    }

    pub fn integral(&self) -> f64 {
        self.local_moment(0)
    }

    /// `∫ t p(t) dt` over the piece.
    pub fn first_moment(&self) -> f64 {
        self.lo * self.local_moment(0) + self.local_moment(1)
    }

    /// Coefficients of the same polynomial expanded around `lo + delta`.
    fn recentered(&self, delta: f64) -> Vec<f64> {
        taylor_shift(&self.coeffs, delta)
    }

    /// Restriction to the sub-interval `[a, b] ⊆ [lo, hi]`.
    pub fn restrict(&self, a: f64, b: f64) -> Piece {
        Piece {
            lo: a,
            hi: b,
            coeffs: self.recentered(a - self.lo),
        }
    }
}

fn horner(coeffs: &[f64], u: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * u + c)
}

/// Re-expands `Σ c_k u^k` as a polynomial in `v = u - delta`.
fn taylor_shift(coeffs: &[f64], delta: f64) -> Vec<f64> {
    let mut out = coeffs.to_vec();
    if delta == 0.0 {
        return out;
    }
    let n = out.len();
    for i in 0..n {
        for j in (i..n.saturating_sub(1)).rev() {
            out[j] += delta * out[j + 1];
        }
    }
    out
}

fn trim(mut coeffs: Vec<f64>) -> Vec<f64> {
    while coeffs.last() == Some(&0.0) {
        coeffs.pop();
    }
    coeffs
}

fn add_coeffs(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| a.get(i).copied().unwrap_or(0.0) + b.get(i).copied().unwrap_or(0.0))
        .collect()
}

fn mul_coeffs(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// A real piecewise polynomial with finitely many pieces; zero off its pieces.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Piece>", into = "Vec<Piece>")]
pub struct PiecewisePoly {
    pieces: Vec<Piece>,
}

impl TryFrom<Vec<Piece>> for PiecewisePoly {
    type Error = DynError;

    fn try_from(pieces: Vec<Piece>) -> Result<Self> {
        PiecewisePoly::new(pieces)
    }
}

impl From<PiecewisePoly> for Vec<Piece> {
    fn from(p: PiecewisePoly) -> Self {
        p.pieces
    }
}

impl PiecewisePoly {
    /// Validates and normalizes a piece list: zero-width and identically zero
    /// pieces are dropped, trailing zero coefficients trimmed.
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        let mut kept: Vec<Piece> = Vec::with_capacity(pieces.len());
        for piece in pieces {
            if !piece.lo.is_finite() || !piece.hi.is_finite() {
                return Err(DynError::InvalidInput(format!(
                    "non-finite breakpoint in piece [{}, {})",
                    piece.lo, piece.hi
                )));
            }
            if piece.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(DynError::InvalidInput("non-finite coefficient".into()));
            }
            if piece.hi < piece.lo {
                return Err(DynError::InvalidInput(format!(
                    "piece [{}, {}) has hi < lo",
                    piece.lo, piece.hi
                )));
            }
            if let Some(prev) = kept.last() {
                if piece.lo < prev.hi {
                    return Err(DynError::InvalidInput(format!(
                        "pieces overlap or are unsorted at t = {}",
                        piece.lo
                    )));
                }
            }
            let coeffs = trim(piece.coeffs);
            if piece.hi > piece.lo && !coeffs.is_empty() {
                kept.push(Piece { coeffs, ..piece });
            }
        }
        Ok(PiecewisePoly { pieces: kept })
    }

    pub fn zero() -> Self {
        PiecewisePoly::default()
    }

    /// The constant `value` on `[lo, hi)`.
    pub fn constant(value: f64, lo: f64, hi: f64) -> Self {
        PiecewisePoly::new(vec![Piece {
            lo,
            hi,
            coeffs: vec![value],
        }])
        .expect("constant piece")
    }

    /// One on `[lo, hi]`, with C¹ cubic smoothstep ramps `3u² - 2u³` of width
    /// `ramp` on either side; a sharp indicator when `ramp == 0`.
    pub fn plateau(lo: f64, hi: f64, ramp: f64) -> Result<Self> {
        if !(lo < hi) || !(ramp >= 0.0) {
            return Err(DynError::InvalidInput(format!(
                "invalid plateau [{lo}, {hi}] with ramp {ramp}"
            )));
        }
        let mut pieces = Vec::with_capacity(3);
        if ramp > 0.0 {
            let r2 = ramp * ramp;
            pieces.push(Piece {
                lo: lo - ramp,
                hi: lo,
                coeffs: vec![0.0, 0.0, 3.0 / r2, -2.0 / (r2 * ramp)],
            });
        }
        pieces.push(Piece {
            lo,
            hi,
            coeffs: vec![1.0],
        });
        if ramp > 0.0 {
            let r2 = ramp * ramp;
            pieces.push(Piece {
                lo: hi,
                hi: hi + ramp,
                coeffs: vec![1.0, 0.0, -3.0 / r2, 2.0 / (r2 * ramp)],
            });
        }
        PiecewisePoly::new(pieces)
    }

    /// Single piece given by monomial coefficients in the global variable `t`.
    pub fn from_global(lo: f64, hi: f64, coeffs: &[f64]) -> Result<Self> {
        PiecewisePoly::new(vec![Piece {
            lo,
            hi,
            coeffs: taylor_shift(coeffs, lo),
        }])
    }

    /// Single piece given by coefficients in the local variable `t - lo`.
    pub fn from_local(lo: f64, hi: f64, coeffs: &[f64]) -> Result<Self> {
        PiecewisePoly::new(vec![Piece {
            lo,
            hi,
            coeffs: coeffs.to_vec(),
        }])
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Convex hull `[first lo, last hi]` of the pieces.
    pub fn support(&self) -> Option<(f64, f64)> {
        Some((self.pieces.first()?.lo, self.pieces.last()?.hi))
    }

    pub fn degree(&self) -> usize {
        self.pieces
            .iter()
            .map(|p| p.coeffs.len().saturating_sub(1))
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let idx = self.pieces.partition_point(|p| p.hi <= t);
        match self.pieces.get(idx) {
            Some(p) if p.lo <= t => p.eval(t),
            _ => 0.0,
        }
    }

    pub fn integral(&self) -> f64 {
        self.pieces.iter().map(Piece::integral).sum()
    }

    /// `(∫ p, ∫ t p)`.
    pub fn moments(&self) -> (f64, f64) {
        self.pieces
            .iter()
            .fold((0.0, 0.0), |(m0, m1), p| (m0 + p.integral(), m1 + p.first_moment()))
    }

    /// `∫_a^b p(t) dt` for arbitrary `a <= b`.
    pub fn integral_between(&self, a: f64, b: f64) -> f64 {
        let mut total = 0.0;
        let start = self.pieces.partition_point(|p| p.hi <= a);
        for piece in &self.pieces[start..] {
            if piece.lo >= b {
                break;
            }
            let lo = piece.lo.max(a);
            let hi = piece.hi.min(b);
            if hi > lo {
                let (u0, u1) = (lo - piece.lo, hi - piece.lo);
                total += piece
                    .coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, c)| {
                        let p = (k + 1) as i32;
                        c * (u1.powi(p) - u0.powi(p)) / (k + 1) as f64
                    })
                    .sum::<f64>();
            }
        }
        total
    }

    pub fn derivative(&self) -> Self {
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece {
                lo: p.lo,
                hi: p.hi,
                coeffs: p
                    .coeffs
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(k, c)| c * k as f64)
                    .collect(),
            })
            .collect();
        PiecewisePoly::new(pieces).expect("derivative of valid poly")
    }

    /// Running integral `t ↦ ∫_{-∞}^t p`, restricted to the support hull.
    ///
    /// Gaps between pieces are filled with the accumulated constant. The value
    /// beyond the hull (the total integral) is returned alongside.
    pub fn cumulative(&self) -> (Self, f64) {
        let mut out = Vec::with_capacity(self.pieces.len() * 2);
        let mut acc = 0.0;
        let mut cursor: Option<f64> = None;
        for piece in &self.pieces {
            if let Some(c) = cursor {
                if piece.lo > c {
                    out.push(Piece {
                        lo: c,
                        hi: piece.lo,
                        coeffs: vec![acc],
                    });
                }
            }
            let mut coeffs = Vec::with_capacity(piece.coeffs.len() + 1);
            coeffs.push(acc);
            coeffs.extend(
                piece
                    .coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c / (k + 1) as f64),
            );
            acc += piece.integral();
            out.push(Piece {
                lo: piece.lo,
                hi: piece.hi,
                coeffs,
            });
            cursor = Some(piece.hi);
        }
        (PiecewisePoly::new(out).expect("cumulative of valid poly"), acc)
    }

    pub fn scale(&self, factor: f64) -> Self {
        if factor == 0.0 {
            return PiecewisePoly::zero();
        }
        PiecewisePoly {
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece {
                    lo: p.lo,
                    hi: p.hi,
                    coeffs: p.coeffs.iter().map(|c| c * factor).collect(),
                })
                .collect(),
        }
    }

    /// `t ↦ p(t - tau)`.
    pub fn translate(&self, tau: f64) -> Self {
        PiecewisePoly {
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece {
                    lo: p.lo + tau,
                    hi: p.hi + tau,
                    coeffs: p.coeffs.clone(),
                })
                .collect(),
        }
    }

    /// Sorted breakpoints of the pieces.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self.pieces.iter().flat_map(|p| [p.lo, p.hi]).collect();
        pts.dedup();
        pts
    }

    /// Splits every piece at the given (sorted) breakpoints.
    pub fn refine(&self, breaks: &[f64]) -> Vec<Piece> {
        let mut out = Vec::new();
        for piece in &self.pieces {
            let mut lo = piece.lo;
            let start = breaks.partition_point(|&b| b <= piece.lo);
            for &b in &breaks[start..] {
                if b >= piece.hi {
                    break;
                }
                out.push(piece.restrict(lo, b));
                lo = b;
            }
            out.push(piece.restrict(lo, piece.hi));
        }
        out
    }

    /// Combines two polynomials on the common refinement of their breakpoints.
    fn zip_with(
        &self,
        other: &Self,
        union_pieces: bool,
        op: impl Fn(&[f64], &[f64]) -> Vec<f64>,
    ) -> Self {
        let breaks = merged_breaks(self, other);
        let left = self.refine(&breaks);
        let right = other.refine(&breaks);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        let empty: Vec<f64> = Vec::new();
        while i < left.len() || j < right.len() {
            let l = left.get(i);
            let r = right.get(j);
            match (l, r) {
                (Some(a), Some(b)) if a.lo == b.lo => {
                    out.push(Piece {
                        lo: a.lo,
                        hi: a.hi,
                        coeffs: op(&a.coeffs, &b.coeffs),
                    });
                    i += 1;
                    j += 1;
                }
                (Some(a), Some(b)) if a.lo < b.lo => {
                    if union_pieces {
                        out.push(Piece {
                            lo: a.lo,
                            hi: a.hi,
                            coeffs: op(&a.coeffs, &empty),
                        });
                    }
                    i += 1;
                }
                (Some(_), Some(b)) => {
                    if union_pieces {
                        out.push(Piece {
                            lo: b.lo,
                            hi: b.hi,
                            coeffs: op(&empty, &b.coeffs),
                        });
                    }
                    j += 1;
                }
                (Some(a), None) => {
                    if union_pieces {
                        out.push(Piece {
                            lo: a.lo,
                            hi: a.hi,
                            coeffs: op(&a.coeffs, &empty),
                        });
                    }
                    i += 1;
                }
                (None, Some(b)) => {
                    if union_pieces {
                        out.push(Piece {
                            lo: b.lo,
                            hi: b.hi,
                            coeffs: op(&empty, &b.coeffs),
                        });
                    }
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        PiecewisePoly::new(out).expect("combination of valid polys")
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        self.zip_with(other, true, add_coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return PiecewisePoly::zero();
        }
        self.zip_with(other, false, mul_coeffs)
    }

    /// `∫ p q dt`.
    pub fn inner(&self, other: &Self) -> f64 {
        self.mul(other).integral()
    }

    /// Largest absolute coefficient, a cheap magnitude scale.
    pub fn coeff_scale(&self) -> f64 {
        self.pieces
            .iter()
            .flat_map(|p| p.coeffs.iter())
            .fold(0.0_f64, |m, c| m.max(c.abs()))
    }
}

fn merged_breaks(a: &PiecewisePoly, b: &PiecewisePoly) -> Vec<f64> {
    let mut pts = a.breakpoints();
    pts.extend(b.breakpoints());
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}
