mod common;

use proptest::prelude::*;
use rand::Rng;

use dynalg::functionals::{
    boundary_action, ConstantMode, Functional, LoopPath, Piece, PiecewisePoly, SampledPath, Shape,
};
use dynalg::interaction::{
    interacting_boundary_action, relative_scattering, relative_scattering_inverse, InteractionSpec,
    RelativeScattering,
};
use dynalg::lab::{
    check_causal_relation, coherent_state, scattering, Grid, PropagatorConfig, REFERENCE_WIDTH,
};
use dynalg::scenario::{random_loop_in, random_state, seeded, ScenarioRng};

const GAUSSIAN: (f64, f64, f64) = (0.6, 0.2, 0.8);
const QUARTIC: [f64; 5] = [0.0, 0.1, 0.3, 0.0, 0.05];

fn gaussian_v(y: f64) -> f64 {
    let (a, c, w) = GAUSSIAN;
    a * (-(y - c) * (y - c) / (2.0 * w * w)).exp()
}

fn quartic_v(y: f64) -> f64 {
    QUARTIC.iter().enumerate().map(|(k, c)| c * y.powi(k as i32)).sum()
}

fn gaussian_spec() -> InteractionSpec {
    let (a, c, w) = GAUSSIAN;
    InteractionSpec::new(Shape::gaussian(a, c, w), (0.0, 2.0), 0.5).unwrap()
}

fn quartic_spec() -> InteractionSpec {
    InteractionSpec::new(Shape::polynomial(&QUARTIC), (0.0, 2.0), 0.5).unwrap()
}

/// A continuous path through random knots, with a random bulge on each cell.
fn random_continuous_path(rng: &mut ScenarioRng, lo: f64, hi: f64) -> PiecewisePoly {
    let cells = rng.gen_range(3..9);
    let mut knots: Vec<f64> = (0..cells - 1).map(|_| rng.gen_range(lo..hi)).collect();
    knots.extend([lo, hi]);
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let values: Vec<f64> = knots.iter().map(|_| rng.gen_range(-1.5..1.5)).collect();
    let pieces = knots
        .windows(2)
        .zip(values.windows(2))
        .filter(|(k, _)| k[1] > k[0])
        .map(|(k, v)| {
            let h = k[1] - k[0];
            let bulge = rng.gen_range(-2.0..2.0);
            // v0 + (v1 - v0) u / h + bulge u (h - u)
            Piece {
                lo: k[0],
                hi: k[1],
                coeffs: vec![v[0], (v[1] - v[0]) / h + bulge * h, -bulge],
            }
        })
        .collect();
    PiecewisePoly::new(pieces).unwrap()
}

/// `∫ (ẋ ẋ₀ + ½ ẋ₀² - χ V(x + x₀) + χ V(x)) dt` by Gauss-Legendre between
/// breakpoints.
fn lagrangean_oracle(x: &PiecewisePoly, x0: &LoopPath, chi: &PiecewisePoly, v: fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let pos = &x0.position()[0];
    let cuts = common::breakpoints(&[x, pos, chi], lo, hi);
    let integrand = |t: f64| {
        let (xt, yt) = (common::eval(x, t), common::eval(pos, t));
        let (vx, vy) = (common::eval_derivative(x, t), common::eval_derivative(pos, t));
        let c = common::eval(chi, t);
        vx * vy + 0.5 * vy * vy - c * v(xt + yt) + c * v(xt)
    };
    cuts.windows(2).map(|w| common::gauss_composite(integrand, w[0], w[1], 16, 4)).sum()
}

#[test]
fn chi_functional_examples() {
    let unit = PiecewisePoly::constant(1.0, 0.0, 1.0);
    let rest = SampledPath::polynomial(&[vec![0.0]], -1.0, 2.0).unwrap();
    let spec = InteractionSpec::with_window(Shape::gaussian(0.7, 0.0, 1.0), unit.clone()).unwrap();
    assert!((spec.chi_functional().evaluate(&rest).unwrap() - 0.7).abs() < 1e-10);

    let line = SampledPath::polynomial(&[vec![0.0, 1.0]], -1.0, 2.0).unwrap();
    let spec = InteractionSpec::with_window(Shape::polynomial(&[0.0, 0.0, 1.0]), unit).unwrap();
    assert!((spec.chi_functional().evaluate(&line).unwrap() - 1.0 / 3.0).abs() < 1e-14);

    let off = InteractionSpec::with_window(Shape::gaussian(1.0, 0.0, 1.0), PiecewisePoly::zero()).unwrap();
    assert!(off.chi_functional().is_central());
    assert_eq!(off.chi_functional().constant_part(), 0.0);

    assert!(InteractionSpec::new(Shape::gaussian(1.0, 0.0, -1.0), (0.0, 1.0), 0.2).is_err());
    assert!(InteractionSpec::new(Shape::polynomial(&[0.0; 6]), (0.0, 1.0), 0.2).is_err());
}

#[test]
fn relative_scattering_reductions() {
    let grid = Grid::standard();
    let psi = coherent_state(&grid, -0.3, 0.4, REFERENCE_WIDTH).unwrap();
    let cfg = PropagatorConfig::new(1e-3, -1.0, 3.0).unwrap();
    for spec in [gaussian_spec(), quartic_spec()] {
        let same = relative_scattering(&psi, &Functional::zero(1), &spec, &cfg).unwrap();
        assert!(same.distance(&psi) < 1e-12);
        let phased = relative_scattering(&psi, &Functional::constant(1, 0.7), &spec, &cfg).unwrap();
        assert!(phased.distance(&psi.with_phase(0.7)) < 1e-10);
    }

    let f = Functional::linear(vec![PiecewisePoly::constant(0.8, 0.3, 1.2)], ConstantMode::Explicit(0.0)).unwrap();
    let off = InteractionSpec::with_window(Shape::gaussian(0.6, 0.2, 0.8), PiecewisePoly::zero()).unwrap();
    let free = scattering(&psi, &f, &cfg).unwrap();
    assert!(relative_scattering(&psi, &f, &off, &cfg).unwrap().distance(&free) < 1e-15);

    let spec = gaussian_spec();
    let there = relative_scattering(&psi, &f, &spec, &cfg).unwrap();
    assert!((there.norm() - 1.0).abs() < 1e-12);
    let back = relative_scattering_inverse(&there, &f, &spec, &cfg).unwrap().distance(&psi);
    // four sweeps of 4000 steps each
    assert!(back < 1e-11, "{back:e}");
}

#[test]
fn boundary_action_reductions() {
    let mut rng = seeded(8);
    let x0 = random_loop_in(&mut rng, 1, 0.3, 1.7, 1.0);
    let spec = gaussian_spec();
    let zero = interacting_boundary_action(&LoopPath::zero(1), &spec).unwrap();
    assert!(zero.is_central() && zero.constant_part() == 0.0);
    let off = InteractionSpec::with_window(Shape::gaussian(0.6, 0.2, 0.8), PiecewisePoly::zero()).unwrap();
    assert_eq!(interacting_boundary_action(&x0, &off).unwrap(), boundary_action(&x0));
}

#[test]
fn boundary_action_matches_lagrangean_difference() {
    let mut rng = seeded(2024);
    let (lo, hi) = (-1.0, 3.0);
    for k in 0..100 {
        let (spec, v): (InteractionSpec, fn(f64) -> f64) =
            if k % 2 == 0 { (gaussian_spec(), gaussian_v) } else { (quartic_spec(), quartic_v) };
        let (a, b) = (rng.gen_range(-0.5..0.8), rng.gen_range(1.2..2.5));
        let x0 = random_loop_in(&mut rng, 1, a, b, 1.5);
        let x = random_continuous_path(&mut rng, lo, hi);
        let path = SampledPath::new(vec![x.clone()], lo, hi).unwrap();
        let action = interacting_boundary_action(&x0, &spec).unwrap().evaluate(&path).unwrap();
        let oracle = lagrangean_oracle(&x, &x0, spec.chi(), v, lo, hi);
        assert!((action - oracle).abs() < 1e-8, "case {k}: {action} vs {oracle}");
    }
}

#[test]
fn central_functionals_satisfy_causality() {
    let grid = Grid::standard();
    let states = vec![coherent_state(&grid, 0.1, -0.2, REFERENCE_WIDTH).unwrap()];
    let cfg = PropagatorConfig::new(1e-3, -1.0, 3.0).unwrap();
    let provider = RelativeScattering { spec: gaussian_spec() };
    let r = check_causal_relation(
        &provider,
        &Functional::constant(1, 0.4),
        &Functional::constant(1, -1.1),
        &Functional::zero(1),
        &states,
        &cfg,
    )
    .unwrap();
    assert!(r < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn central_phase_factors_out(s in any::<u64>(), c in -3.0..3.0f64) {
        let grid = Grid::standard();
        let mut rng = seeded(s);
        let psi = random_state(&mut rng, &grid).unwrap();
        let cfg = PropagatorConfig::new(1e-2, -1.0, 3.0).unwrap();
        let spec = if s % 2 == 0 { gaussian_spec() } else { quartic_spec() };
        let f = Functional::linear(vec![PiecewisePoly::constant(0.5, 0.4, 1.6)], ConstantMode::Explicit(0.0)).unwrap();
        let plain = relative_scattering(&psi, &f, &spec, &cfg).unwrap();
        let shifted = relative_scattering(&psi, &f.add(&Functional::constant(1, c)).unwrap(), &spec, &cfg).unwrap();
        prop_assert!(shifted.distance(&plain.with_phase(c)) < 1e-10);
    }
}
