//! Reference computations that share no code with the library: Gauss–Legendre
//! rules built by Newton iteration, brute-force double integrals with the
//! diagonal split out, and direct Lagrangean quadrature.

#![allow(dead_code)]

use std::f64::consts::PI;

use dynalg::functionals::{Piece, PiecewisePoly};

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm) / (x * x - 1.0);
            let step = p / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// `∫_a^b f` with an `n`-point rule.
pub fn gauss(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let (x, w) = legendre_rule(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    x.iter().zip(&w).map(|(xi, wi)| wi * f(mid + half * xi)).sum::<f64>() * half
}

/// Composite rule on `m` equal panels.
pub fn gauss_composite(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize, m: usize) -> f64 {
    let h = (b - a) / m as f64;
    (0..m)
        .map(|k| gauss(&f, a + k as f64 * h, a + (k + 1) as f64 * h, n))
        .sum()
}

fn eval_piece(p: &Piece, t: f64) -> f64 {
    let u = t - p.lo;
    p.coeffs.iter().rev().fold(0.0, |acc, c| acc * u + c)
}

/// Split `[lo, hi]` at every breakpoint of both profiles.
fn cells(p: &PiecewisePoly, q: &PiecewisePoly) -> Vec<(f64, f64)> {
    let mut pts: Vec<f64> = p
        .pieces()
        .iter()
        .chain(q.pieces())
        .flat_map(|c| [c.lo, c.hi])
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts.windows(2).map(|w| (w[0], w[1])).collect()
}

fn value(p: &PiecewisePoly, t: f64) -> f64 {
    p.pieces()
        .iter()
        .find(|c| t >= c.lo && t < c.hi)
        .map_or(0.0, |c| eval_piece(c, t))
}

/// `∬ |s - s'| p(s) q(s') ds ds'`, splitting diagonal cells into triangles.
pub fn kernel_oracle(p: &PiecewisePoly, q: &PiecewisePoly) -> f64 {
    let grid = cells(p, q);
    let n = 8;
    let mut total = 0.0;
    for &(a, b) in &grid {
        for &(c, d) in &grid {
            if a == c {
                // s' below s, then s' above s
                total += gauss(
                    |s| value(p, s) * gauss(|sp| (s - sp) * value(q, sp), a, s, n),
                    a,
                    b,
                    n,
                );
                total += gauss(
                    |s| value(p, s) * gauss(|sp| (sp - s) * value(q, sp), s, b, n),
                    a,
                    b,
                    n,
                );
            } else {
                total += gauss(
                    |s| value(p, s) * gauss(|sp| (s - sp).abs() * value(q, sp), c, d, n),
                    a,
                    b,
                    n,
                );
            }
        }
    }
    total
}

/// `∬ p(s) (s' - s) q(s') ds ds'` by tensor quadrature on piece pairs.
pub fn pairing_oracle(p: &PiecewisePoly, q: &PiecewisePoly) -> f64 {
    let n = 6;
    let mut total = 0.0;
    for a in p.pieces() {
        for b in q.pieces() {
            total += gauss(
                |s| eval_piece(a, s) * gauss(|sp| (sp - s) * eval_piece(b, sp), b.lo, b.hi, n),
                a.lo,
                a.hi,
                n,
            );
        }
    }
    total
}

/// `∫ p` piece by piece.
pub fn integral_oracle(p: &PiecewisePoly, f: impl Fn(f64) -> f64) -> f64 {
    p.pieces()
        .iter()
        .map(|c| gauss(|t| eval_piece(c, t) * f(t), c.lo, c.hi, 10))
        .sum()
}

/// `∫ p q` over the common refinement.
pub fn product_oracle(p: &PiecewisePoly, q: &PiecewisePoly) -> f64 {
    cells(p, q)
        .into_iter()
        .map(|(a, b)| gauss(|t| value(p, t) * value(q, t), a, b, 10))
        .sum()
}

/// Evaluation of a piecewise polynomial without the library's evaluator.
pub fn eval(p: &PiecewisePoly, t: f64) -> f64 {
    value(p, t)
}

/// Exact derivative of a piecewise polynomial, piece by piece.
pub fn eval_derivative(p: &PiecewisePoly, t: f64) -> f64 {
    p.pieces()
        .iter()
        .find(|c| t >= c.lo && t < c.hi)
        .map_or(0.0, |c| {
            let u = t - c.lo;
            c.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (k, ck)| acc * u + k as f64 * ck)
        })
}

/// All breakpoints of the given profiles inside `[lo, hi]`, plus the ends.
pub fn breakpoints(profiles: &[&PiecewisePoly], lo: f64, hi: f64) -> Vec<f64> {
    let mut pts = vec![lo, hi];
    for p in profiles {
        for c in p.pieces() {
            pts.extend([c.lo, c.hi].into_iter().filter(|&t| t > lo && t < hi));
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Central difference derivative.
pub fn derivative(f: impl Fn(f64) -> f64, t: f64) -> f64 {
    let h = 1e-5;
    (f(t + h) - f(t - h)) / (2.0 * h)
}
