//! Seeded generators for randomized functionals, loops, paths and states.
//!
//! Densities have at most four pieces of degree at most three, supported in
//! `[-3, 3]`. Loops come from zero-moment accelerations, so every
//! moment-matched pair `(f, f + ẍ₀)` closes exactly.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::functionals::{
    ConstantMode, Functional, HConvention, LoopPath, Piece, PiecewisePoly, PotentialTerm,
    SampledPath, Shape,
};
use crate::interaction::RelationScenario;
use crate::lab::{coherent_state, Grid, WaveState};
use crate::weyl::GroupWord;

pub const SUPPORT_LO: f64 = -3.0;
pub const SUPPORT_HI: f64 = 3.0;
pub const MAX_PIECES: usize = 4;

pub type ScenarioRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> ScenarioRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn sorted_points(rng: &mut ScenarioRng, lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let mut pts: Vec<f64> = (0..count).map(|_| rng.gen_range(lo..hi)).collect();
    pts.sort_by(f64::total_cmp);
    pts
}

/// Random interval of length at least `min_len` inside `[lo, hi]`.
pub fn random_interval(rng: &mut ScenarioRng, lo: f64, hi: f64, min_len: f64) -> (f64, f64) {
    let len = rng.gen_range(min_len..(hi - lo));
    let start = rng.gen_range(lo..(hi - len));
    (start, start + len)
}

/// Independent random pieces (possibly discontinuous), degree <= 3.
pub fn random_rough_density(rng: &mut ScenarioRng, amplitude: f64) -> PiecewisePoly {
    let pieces = rng.gen_range(1..=MAX_PIECES);
    let pts = sorted_points(rng, SUPPORT_LO, SUPPORT_HI, pieces * 2);
    let out = pts
        .chunks(2)
        .map(|pair| {
            let degree = rng.gen_range(0..=3usize);
            let h = (pair[1] - pair[0]).max(1e-3);
            Piece {
                lo: pair[0],
                hi: pair[0] + h,
                coeffs: (0..=degree)
                    .map(|k| amplitude * rng.gen_range(-1.0..1.0) / h.powi(k as i32))
                    .collect(),
            }
        })
        .collect::<Vec<_>>();
    let mut cleaned: Vec<Piece> = Vec::with_capacity(out.len());
    for p in out {
        match cleaned.last() {
            Some(prev) if p.lo < prev.hi => {}
            _ => cleaned.push(p),
        }
    }
    PiecewisePoly::new(cleaned).expect("generated pieces are sorted")
}

/// Cubic Hermite piece from end values and slopes.
fn hermite(lo: f64, hi: f64, v0: f64, v1: f64, s0: f64, s1: f64) -> Piece {
    let h = hi - lo;
    let d = (v1 - v0) / h;
    Piece {
        lo,
        hi,
        coeffs: vec![v0, s0, (3.0 * d - 2.0 * s0 - s1) / h, (s0 + s1 - 2.0 * d) / (h * h)],
    }
}

/// A C¹ piecewise cubic on `[lo, hi]` vanishing with zero slope at both ends.
pub fn random_smooth_profile(rng: &mut ScenarioRng, lo: f64, hi: f64, amplitude: f64) -> PiecewisePoly {
    let pieces = rng.gen_range(1..=MAX_PIECES);
    let mut knots = vec![lo];
    knots.extend(sorted_points(rng, lo, hi, pieces - 1));
    knots.push(hi);
    knots.dedup();
    let n = knots.len();
    let mut values = vec![0.0; n];
    let mut slopes = vec![0.0; n];
    let span = hi - lo;
    for i in 1..n - 1 {
        values[i] = amplitude * rng.gen_range(-1.0..1.0);
        slopes[i] = amplitude * rng.gen_range(-1.0..1.0) / span;
    }
    if n == 2 {
        // single piece: the cubic through zero end data vanishes; split it
        let mid = 0.5 * (lo + hi);
        let peak = amplitude * rng.gen_range(-1.0..1.0);
        return PiecewisePoly::new(vec![
            hermite(lo, mid, 0.0, peak, 0.0, 0.0),
            hermite(mid, hi, peak, 0.0, 0.0, 0.0),
        ])
        .expect("bump pieces");
    }
    let out = (0..n - 1)
        .map(|i| hermite(knots[i], knots[i + 1], values[i], values[i + 1], slopes[i], slopes[i + 1]))
        .collect();
    PiecewisePoly::new(out).expect("hermite pieces")
}

/// C¹ cubic bump of unit height on `[lo, hi]`.
pub fn smooth_bump(lo: f64, hi: f64) -> PiecewisePoly {
    let mid = 0.5 * (lo + hi);
    PiecewisePoly::new(vec![hermite(lo, mid, 0.0, 1.0, 0.0, 0.0), hermite(mid, hi, 1.0, 0.0, 0.0, 0.0)])
        .expect("bump pieces")
}

/// A smooth density with a random support inside `[-3, 3]`.
pub fn random_smooth_density(rng: &mut ScenarioRng, amplitude: f64) -> PiecewisePoly {
    let (lo, hi) = random_interval(rng, SUPPORT_LO, SUPPORT_HI, 0.5);
    random_smooth_profile(rng, lo, hi, amplitude)
}

/// Removes the zeroth and first moments of `q` with two bumps on `[lo, hi]`.
fn remove_moments(q: &PiecewisePoly, lo: f64, hi: f64) -> PiecewisePoly {
    let mid = 0.5 * (lo + hi);
    let b0 = smooth_bump(lo, mid);
    let b1 = smooth_bump(mid, hi);
    let (m0q, m1q) = q.moments();
    let (m00, m10) = b0.moments();
    let (m01, m11) = b1.moments();
    let det = m00 * m11 - m01 * m10;
    let alpha = (m0q * m11 - m01 * m1q) / det;
    let beta = (m00 * m1q - m10 * m0q) / det;
    q.sub(&b0.scale(alpha)).sub(&b1.scale(beta))
}

/// A random loop whose acceleration is C¹ and supported in `[lo, hi]`.
pub fn random_loop_in(rng: &mut ScenarioRng, dim: usize, lo: f64, hi: f64, amplitude: f64) -> LoopPath {
    let acc = (0..dim)
        .map(|_| {
            let q = random_smooth_profile(rng, lo, hi, amplitude);
            remove_moments(&q, lo, hi)
        })
        .collect();
    LoopPath::from_acceleration(acc).expect("zero-moment acceleration")
}

pub fn random_loop(rng: &mut ScenarioRng, dim: usize, amplitude: f64) -> LoopPath {
    let (lo, hi) = random_interval(rng, SUPPORT_LO, SUPPORT_HI, 1.0);
    random_loop_in(rng, dim, lo, hi, amplitude)
}

/// `(f, f')` with equal zeroth and first moments: `f' = f + ẍ₀`.
pub fn moment_matched_pair(
    rng: &mut ScenarioRng,
    dim: usize,
    smooth: bool,
) -> (Vec<PiecewisePoly>, Vec<PiecewisePoly>) {
    let f: Vec<PiecewisePoly> = (0..dim)
        .map(|_| {
            if smooth {
                random_smooth_density(rng, 1.0)
            } else {
                random_rough_density(rng, 1.0)
            }
        })
        .collect();
    let x0 = random_loop(rng, dim, 1.0);
    let fp = f.iter().zip(x0.acceleration()).map(|(a, b)| a.add(b)).collect();
    (f, fp)
}

/// A rough random density with zeroth and first moments bounded by `limit`.
pub fn random_linear_density(rng: &mut ScenarioRng, dim: usize, limit: f64) -> Vec<PiecewisePoly> {
    (0..dim)
        .map(|_| {
            let p = random_rough_density(rng, 1.0);
            let (a, b) = p.moments();
            let m = a.abs().max(b.abs());
            if m > limit {
                p.scale(limit / m)
            } else {
                p
            }
        })
        .collect()
}

/// Random piecewise-cubic orbit on `[lo, hi]` (not necessarily continuous).
pub fn random_path(rng: &mut ScenarioRng, dim: usize, lo: f64, hi: f64) -> Result<SampledPath> {
    let comps = (0..dim)
        .map(|_| {
            let pieces = rng.gen_range(1..=MAX_PIECES);
            let mut knots = vec![lo];
            knots.extend(sorted_points(rng, lo, hi, pieces - 1));
            knots.push(hi);
            knots.dedup();
            let out = knots
                .windows(2)
                .map(|w| Piece {
                    lo: w[0],
                    hi: w[1],
                    coeffs: (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect(),
                })
                .collect();
            PiecewisePoly::new(out)
        })
        .collect::<Result<Vec<_>>>()?;
    SampledPath::new(comps, lo, hi)
}

/// Gaussian potential term with a smooth window inside `[lo, hi]`.
pub fn random_gaussian_term(rng: &mut ScenarioRng, lo: f64, hi: f64) -> PotentialTerm {
    let (a, b) = random_interval(rng, lo, hi, 0.6 * (hi - lo));
    let ramp = 0.25 * (b - a);
    let window = PiecewisePoly::plateau(a + ramp, b - ramp, ramp).expect("window");
    let magnitude = rng.gen_range(0.4..0.8);
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let shape = Shape::gaussian(sign * magnitude, rng.gen_range(-1.0..1.0), rng.gen_range(0.7..1.5));
    PotentialTerm::new(window, shape)
}

/// Width of random test states. Wider than the reference state so that free
/// spreading over `|t| <= 3` stays clear of the grid boundary.
pub const STATE_WIDTH: f64 = 1.0;

/// Gaussian with center in `[-1, 1]` and momentum in `[-0.5, 0.5]`.
pub fn random_state(rng: &mut ScenarioRng, grid: &Arc<Grid>) -> Result<WaveState> {
    coherent_state(grid, rng.gen_range(-1.0..1.0), rng.gen_range(-0.5..0.5), STATE_WIDTH)
}

/// Random linear-sector word of `len` factors with exponents `±1`. Half of
/// the factors carry the canonical constant, the rest an explicit one.
pub fn random_word(rng: &mut ScenarioRng, dim: usize, len: usize) -> GroupWord {
    let mut word = GroupWord::new(dim, rng.gen_range(-1.0..1.0), Vec::new()).expect("dim >= 1");
    for _ in 0..len {
        let density = (0..dim).map(|_| random_rough_density(rng, 1.0)).collect();
        let mode = if rng.gen_bool(0.5) {
            ConstantMode::Auto(HConvention::Consistent)
        } else {
            ConstantMode::Explicit(rng.gen_range(-1.0..1.0))
        };
        let f = Functional::linear(density, mode).expect("matching dims");
        word = if rng.gen_bool(0.5) {
            word.then(f)
        } else {
            word.then_inverse(f)
        };
    }
    word
}

/// Smooth linear functional with canonical constant, supported in `[lo, hi]`.
pub fn smooth_linear_functional(rng: &mut ScenarioRng, lo: f64, hi: f64, amplitude: f64) -> Functional {
    let (a, b) = random_interval(rng, lo, hi, 0.5 * (hi - lo));
    Functional::linear(
        vec![random_smooth_profile(rng, a, b, amplitude)],
        ConstantMode::Auto(HConvention::Consistent),
    )
    .expect("one-dimensional density")
}

/// Inputs for the dynamical relation: `F` (linear plus a Gaussian term) and a
/// loop, all inside `[lo, hi]`.
#[derive(Debug, Clone)]
pub struct DynamicalCase {
    pub functional: Functional,
    pub loop_path: LoopPath,
}

pub fn dynamical_case(rng: &mut ScenarioRng, lo: f64, hi: f64, with_potential: bool) -> DynamicalCase {
    let mut functional = smooth_linear_functional(rng, lo, hi, 0.5);
    if with_potential {
        let term = random_gaussian_term(rng, lo, hi);
        functional = functional
            .add(&Functional::potential(1, term).expect("one-dimensional term"))
            .expect("matching dims");
    }
    let (a, b) = random_interval(rng, lo, hi, 0.3 * (hi - lo));
    DynamicalCase {
        functional,
        loop_path: random_loop_in(rng, 1, a, b, 2.0),
    }
}

/// Inputs for causal factorization inside `[lo, hi]`: `later` strictly after
/// `earlier`, and a Gaussian `background` whose window overlaps both.
#[derive(Debug, Clone)]
pub struct CausalCase {
    pub later: Functional,
    pub earlier: Functional,
    pub background: Functional,
}

pub fn causal_case(rng: &mut ScenarioRng, lo: f64, hi: f64, with_background: bool) -> CausalCase {
    let mid = 0.5 * (lo + hi);
    let cut = mid + (hi - lo) * rng.gen_range(-0.08..0.08);
    let earlier = smooth_linear_functional(rng, lo, cut - 0.05, 0.5);
    let later = smooth_linear_functional(rng, cut + 0.05, hi, 0.5);
    let background = if with_background {
        let (e_lo, e_hi) = earlier.support().expect("nonzero density");
        let (l_lo, l_hi) = later.support().expect("nonzero density");
        let lo = rng.gen_range(e_lo..0.5 * (e_lo + e_hi));
        let hi = rng.gen_range(0.5 * (l_lo + l_hi)..l_hi);
        let ramp = 0.2 * (hi - lo);
        let window = PiecewisePoly::plateau(lo + ramp, hi - ramp, ramp).expect("window");
        let shape = Shape::gaussian(
            rng.gen_range(-0.6..0.6),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(0.7..1.5),
        );
        Functional::potential(1, PotentialTerm::new(window, shape)).expect("one-dimensional term")
    } else {
        Functional::zero(1)
    };
    CausalCase {
        later,
        earlier,
        background,
    }
}

/// A linear functional with a loop and a causal triple with Gaussian
/// background, all inside `[lo, hi]`, probed by one random state.
pub fn relation_scenario(rng: &mut ScenarioRng, grid: &Arc<Grid>, lo: f64, hi: f64) -> Result<RelationScenario> {
    let dynamical = dynamical_case(rng, lo, hi, false);
    let causal = causal_case(rng, lo, hi, true);
    Ok(RelationScenario {
        functional: dynamical.functional,
        loop_path: dynamical.loop_path,
        later: causal.later,
        earlier: causal.earlier,
        background: causal.background,
        states: vec![random_state(rng, grid)?],
    })
}
