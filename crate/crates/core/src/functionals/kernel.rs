//! Closed-form moments, the `|s - s'|` kernel and the antisymmetric pairing.

use super::poly::{Piece, PiecewisePoly};

/// Which constant is attached to a linear functional built with `auto_h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HConvention {
    /// `h(f) = -(1/4) K(f, f)`: the constant for which moment-equivalent
    /// densities give the same operation and `S(F_f)` is a pure Weyl element.
    #[default]
    Consistent,
    /// `h(f) = +(1/2) K(f, f)`, kept for side-by-side comparison.
    Printed,
}

impl HConvention {
    pub fn factor(self) -> f64 {
        match self {
            HConvention::Consistent => -0.25,
            HConvention::Printed => 0.5,
        }
    }
}

/// Zeroth and first moments per component: `a = ∫ f`, `b = ∫ t f`.
pub fn moments(density: &[PiecewisePoly]) -> (Vec<f64>, Vec<f64>) {
    density.iter().map(PiecewisePoly::moments).unzip()
}

/// `∬ |u - v| u^i v^j du dv` over `[0, h]²`.
fn same_interval_weight(i: usize, j: usize, h: f64) -> f64 {
    let (fi, fj) = (i as f64, j as f64);
    let n = (i + j + 3) as f64;
    h.powi((i + j + 3) as i32)
        * (2.0 / ((fj + 1.0) * (fj + 2.0) * n) + 1.0 / ((fi + 1.0) * (fj + 2.0))
            - 1.0 / ((fi + 2.0) * (fj + 1.0)))
}

fn refined_on_common_breaks(p: &PiecewisePoly, q: &PiecewisePoly) -> (Vec<Piece>, Vec<Piece>) {
    let mut breaks = p.breakpoints();
    breaks.extend(q.breakpoints());
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    (p.refine(&breaks), q.refine(&breaks))
}

/// `∬ |s - s'| p(s) q(s') ds ds'` for scalar profiles.
pub fn kernel_1d(p: &PiecewisePoly, q: &PiecewisePoly) -> f64 {
    if p.is_zero() || q.is_zero() {
        return 0.0;
    }
    let (left, right) = refined_on_common_breaks(p, q);
    let rmom: Vec<(f64, f64)> = right
        .iter()
        .map(|b| (b.integral(), b.first_moment()))
        .collect();
    let mut total = 0.0;
    for a in &left {
        let (a0, a1) = (a.integral(), a.first_moment());
        for (b, &(b0, b1)) in right.iter().zip(&rmom) {
            total += if a.lo == b.lo {
                let h = a.width();
                let mut acc = 0.0;
                for (i, ci) in a.coeffs.iter().enumerate() {
                    for (j, cj) in b.coeffs.iter().enumerate() {
                        acc += ci * cj * same_interval_weight(i, j, h);
                    }
                }
                acc
            } else if a.lo >= b.hi {
                a1 * b0 - a0 * b1
            } else {
                b1 * a0 - b0 * a1
            };
        }
    }
    total
}

/// `K(f, g) = Σ_k ∬ |s - s'| f_k(s) g_k(s')`.
pub fn kernel_integral(f: &[PiecewisePoly], g: &[PiecewisePoly]) -> f64 {
    assert_eq!(f.len(), g.len(), "kernel_integral: dimension mismatch");
    f.iter().zip(g).map(|(p, q)| kernel_1d(p, q)).sum()
}

/// The constant attached to `F_f` under the chosen convention.
pub fn h_constant(f: &[PiecewisePoly], convention: HConvention) -> f64 {
    convention.factor() * kernel_integral(f, f)
}

/// `⟨f, Δg⟩ = Σ_k ∬ f_k(s) (s' - s) g_k(s') ds ds'`, accumulated piece by piece.
pub fn delta_pairing(f: &[PiecewisePoly], g: &[PiecewisePoly]) -> f64 {
    assert_eq!(f.len(), g.len(), "delta_pairing: dimension mismatch");
    let mut total = 0.0;
    for (p, q) in f.iter().zip(g) {
        let qm: Vec<(f64, f64)> = q
            .pieces()
            .iter()
            .map(|b| (b.integral(), b.first_moment()))
            .collect();
        for a in p.pieces() {
            let (a0, a1) = (a.integral(), a.first_moment());
            for &(b0, b1) in &qm {
                total += a0 * b1 - a1 * b0;
            }
        }
    }
    total
}

/// Bound on the magnitude of the moments, used to scale comparison tolerances.
pub(crate) fn moment_scale(density: &[PiecewisePoly]) -> f64 {
    density
        .iter()
        .flat_map(|p| p.pieces())
        .map(|piece| {
            let h = piece.width();
            let abs_int: f64 = piece
                .coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| c.abs() * h.powi(j as i32 + 1) / (j + 1) as f64)
                .sum();
            abs_int * (1.0 + piece.lo.abs().max(piece.hi.abs()))
        })
        .sum()
}

/// Largest moment discrepancy `(|Δm0|, |Δm1|)` over components.
pub(crate) fn moment_gap(f: &[PiecewisePoly], g: &[PiecewisePoly]) -> (f64, f64) {
    let (a0, b0) = moments(f);
    let (a1, b1) = moments(g);
    let dm0 = a0.iter().zip(&a1).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
    let dm1 = b0.iter().zip(&b1).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
    (dm0, dm1)
}

pub(crate) fn moment_tolerance(f: &[PiecewisePoly], g: &[PiecewisePoly]) -> f64 {
    1e-12 * (1.0 + moment_scale(f) + moment_scale(g))
}

/// Whether `f` and `f'` share zeroth and first moments component-wise.
pub fn moment_equivalent(f: &[PiecewisePoly], g: &[PiecewisePoly]) -> bool {
    if f.len() != g.len() {
        return false;
    }
    let (dm0, dm1) = moment_gap(f, g);
    let tol = moment_tolerance(f, g);
    dm0 <= tol && dm1 <= tol
}
