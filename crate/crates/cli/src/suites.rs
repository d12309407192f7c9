//! The verification suites. Each draws its scenarios from the seed, runs them
//! in parallel and returns records in a fixed order.

use std::sync::Arc;

use rayon::prelude::*;

use dynalg::functionals::{
    boundary_action, delta_pairing, h_constant, loop_from_difference, moment_equivalent, moments,
    ConstantMode, Functional, HConvention, PiecewisePoly, Shape,
};
use dynalg::interaction::{
    relative_scattering, verify_free_relations, verify_interacting_relations, InteractionSpec,
};
use dynalg::lab::{
    check_causal_relation, check_dynamical_relation, fitted_order, scattering, weyl_apply,
    ConvergencePoint, FreeScattering, Grid, Scheme, WaveState,
};
use dynalg::scenario::{
    causal_case, dynamical_case, moment_matched_pair, random_linear_density, random_loop,
    random_path, random_rough_density, random_state, random_word, relation_scenario, seeded,
    ScenarioRng, SUPPORT_HI, SUPPORT_LO,
};
use dynalg::weyl::{normalize, recover_commutators, weyl_of, GroupWord, WeylElement};

use crate::config::{Scenario, Suite};
use crate::report::{Record, Slope};
use crate::CliError;

/// Supports of the propagated functionals.
const LAB: (f64, f64) = (-2.0, 2.0);

type Outcome = (Vec<Record>, Vec<Slope>);

struct Ctx<'a> {
    scenario: &'a Scenario,
    grid: Arc<Grid>,
}

impl Ctx<'_> {
    /// Independent stream for scenario `index`; parallel and serial runs agree.
    fn rng(&self, index: u64) -> ScenarioRng {
        seeded(self.scenario.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(index))
    }

    /// Tolerance of an exact (closed-form) record; `--tol` overrides it.
    fn exact(&self, default: f64) -> f64 {
        self.scenario.tol.unwrap_or(default)
    }

    fn state(&self, rng: &mut ScenarioRng) -> Result<WaveState, CliError> {
        Ok(random_state(rng, &self.grid)?)
    }

    fn linear(&self, density: Vec<PiecewisePoly>) -> Result<Functional, CliError> {
        Ok(Functional::linear(density, ConstantMode::Auto(self.scenario.h()))?)
    }
}

pub fn run(scenario: &Scenario) -> Result<Outcome, CliError> {
    let ctx = Ctx {
        scenario,
        grid: scenario.grid()?,
    };
    match scenario.suite {
        Suite::Weyl => weyl(&ctx),
        Suite::Moment => moment(&ctx),
        Suite::Loop => dynamical(&ctx),
        Suite::Causal => causal(&ctx),
        Suite::EulerLagrange => euler_lagrange(&ctx),
        Suite::Interaction => interaction(&ctx),
        Suite::Convergence => convergence(&ctx),
    }
}

fn max(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |a, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(b) })
}

fn par_max(
    count: u64,
    offset: u64,
    job: impl Fn(u64) -> Result<f64, CliError> + Sync + Send,
) -> Result<f64, CliError> {
    let values = (offset..offset + count).into_par_iter().map(job).collect::<Result<Vec<_>, _>>()?;
    Ok(max(values))
}

/// `θ` of a linear word computed pair by pair from the densities.
fn fold_pairwise(word: &GroupWord) -> Result<WeylElement, CliError> {
    let dim = word.dim();
    let mut theta = word.prefactor();
    let (mut a, mut b) = (vec![0.0; dim], vec![0.0; dim]);
    let signed: Vec<(f64, &Functional)> = word
        .factors()
        .iter()
        .map(|f| (if f.inverse { -1.0 } else { 1.0 }, &f.functional))
        .collect();
    for (i, (e_i, f_i)) in signed.iter().enumerate() {
        theta += e_i * (f_i.constant_part() - h_constant(f_i.density(), HConvention::Consistent));
        for (e_j, f_j) in &signed[i + 1..] {
            theta -= 0.5 * e_i * e_j * delta_pairing(f_i.density(), f_j.density());
        }
        let (ai, bi) = moments(f_i.density());
        for k in 0..dim {
            a[k] += e_i * ai[k];
            b[k] += e_i * bi[k];
        }
    }
    Ok(WeylElement::new(theta, a, b)?)
}

fn weyl(ctx: &Ctx) -> Result<Outcome, CliError> {
    let fold = par_max(50, 0, |i| {
        let mut rng = ctx.rng(i);
        let word = random_word(&mut rng, 1 + (i % 3) as usize, 10);
        Ok(normalize(&word)?.distance(&fold_pairwise(&word)?))
    })?;
    let inverse = par_max(50, 100, |i| {
        let mut rng = ctx.rng(i);
        let word = random_word(&mut rng, 1 + (i % 3) as usize, 1 + (i % 20) as usize);
        Ok(normalize(&word.with_formal_inverse())?.distance(&WeylElement::identity(word.dim())))
    })?;

    let mut table_gap: f64 = 0.0;
    let mut scale_gap: f64 = 0.0;
    for dim in 1..=3 {
        let tables = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&eps| recover_commutators(dim, eps))
            .collect::<Result<Vec<_>, _>>()?;
        for table in &tables {
            for (k, row) in table.iter().enumerate() {
                for (l, z) in row.iter().enumerate() {
                    let expected = if k == l { 1.0 } else { 0.0 };
                    table_gap = table_gap.max(z.re.abs()).max((z.im - expected).abs());
                    scale_gap = scale_gap.max((z - tables[0][k][l]).norm());
                }
            }
        }
    }

    // with the printed h this leaves the phase (3/4) K(f, f)
    let cfg = ctx.scenario.propagator(ctx.scenario.dt)?;
    let numeric = (200..204u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ctx.rng(i);
            let density = random_linear_density(&mut rng, 1, 1.0);
            let psi = ctx.state(&mut rng)?;
            let (a, b) = moments(&density);
            let f = ctx.linear(density)?;
            let oracle = weyl_apply(&psi, a[0], b[0], 0.0)?;
            let out = scattering(&psi, &f, &cfg)?;
            Ok((out.distance(&oracle), (out.norm() - 1.0).abs()))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    Ok((
        vec![
            Record::new("normal_form_vs_pairwise_fold", fold, ctx.exact(1e-12)),
            Record::new("word_times_formal_inverse", inverse, ctx.exact(1e-12)),
            Record::new("commutator_table", table_gap, ctx.exact(1e-12)),
            Record::new("commutator_scale_independence", scale_gap, ctx.exact(1e-10)),
            Record::new("scattering_vs_weyl_phase", max(numeric.iter().map(|r| r.0)), 1e-6),
            Record::new("unitarity", max(numeric.iter().map(|r| r.1)), 1e-12),
        ],
        vec![],
    ))
}

fn moment(ctx: &Ctx) -> Result<Outcome, CliError> {
    let pairing = par_max(200, 0, |i| {
        let mut rng = ctx.rng(i);
        let dim = 1 + (i % 3) as usize;
        let f: Vec<_> = (0..dim).map(|_| random_rough_density(&mut rng, 1.0)).collect();
        let g: Vec<_> = (0..dim).map(|_| random_rough_density(&mut rng, 1.0)).collect();
        let (af, bf) = moments(&f);
        let (ag, bg) = moments(&g);
        let formula: f64 = (0..dim).map(|k| af[k] * bg[k] - bf[k] * ag[k]).sum();
        Ok((delta_pairing(&f, &g) - formula).abs())
    })?;
    let pairs = (1000..1100u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ctx.rng(i);
            let dim = 1 + (i % 2) as usize;
            let (f, fp) = moment_matched_pair(&mut rng, dim, i % 2 == 0);
            let flagged = if moment_equivalent(&f, &fp) { 0.0 } else { 1.0 };
            let x0 = loop_from_difference(&f, &fp)?;
            let ff = ctx.linear(f)?;
            let ffp = ctx.linear(fp)?;
            let weyl_gap = weyl_of(&ff)?.distance(&weyl_of(&ffp)?);
            let deformed = ffp.shift_by_loop(&x0)?.add(&boundary_action(&x0))?;
            let mut path_gap: f64 = 0.0;
            for _ in 0..20 {
                let path = random_path(&mut rng, dim, SUPPORT_LO - 1.0, SUPPORT_HI + 1.0)?;
                path_gap = path_gap.max((ff.evaluate(&path)? - deformed.evaluate(&path)?).abs());
            }
            Ok((flagged, weyl_gap, path_gap))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok((
        vec![
            Record::new("pairing_moment_formula", pairing, ctx.exact(1e-12)),
            Record::new("matched_pairs_flagged_equivalent", max(pairs.iter().map(|p| p.0)), 0.0),
            Record::new("weyl_of_matched_pairs", max(pairs.iter().map(|p| p.1)), ctx.exact(1e-12)),
            Record::new("path_identity", max(pairs.iter().map(|p| p.2)), ctx.exact(1e-10)),
        ],
        vec![],
    ))
}

fn dynamical(ctx: &Ctx) -> Result<Outcome, CliError> {
    let cfg = ctx.scenario.propagator(ctx.scenario.dt)?;
    let run = |i: u64, with_potential: bool, zero_loop: bool| -> Result<f64, CliError> {
        let mut rng = ctx.rng(i);
        let case = dynamical_case(&mut rng, LAB.0, LAB.1, with_potential);
        let states = vec![ctx.state(&mut rng)?];
        let x0 = if zero_loop {
            dynalg::functionals::LoopPath::zero(1)
        } else {
            case.loop_path
        };
        Ok(check_dynamical_relation(&FreeScattering, &case.functional, &x0, &states, &cfg)?)
    };
    let jobs: Vec<(u64, bool, bool)> = vec![(0, true, true), (1, false, false), (2, false, false), (3, true, false), (4, true, false), (5, true, false)];
    let residuals = jobs
        .par_iter()
        .map(|&(i, p, z)| run(i, p, z))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((
        vec![
            Record::new("dynamical_relation_zero_loop", residuals[0], ctx.exact(1e-12)),
            Record::new("dynamical_relation_linear", max(residuals[1..3].iter().copied()), 1e-6),
            Record::new("dynamical_relation_gaussian", max(residuals[3..].iter().copied()), 1e-5),
        ],
        vec![],
    ))
}

fn causal(ctx: &Ctx) -> Result<Outcome, CliError> {
    let cfg = ctx.scenario.propagator(ctx.scenario.dt)?;
    let constants = {
        let mut rng = ctx.rng(0);
        let psi = ctx.state(&mut rng)?;
        check_causal_relation(
            &FreeScattering,
            &Functional::constant(1, 0.4),
            &Functional::constant(1, -1.3),
            &Functional::zero(1),
            &[psi],
            &cfg,
        )?
    };
    let run = |i: u64, with_background: bool| -> Result<f64, CliError> {
        let mut rng = ctx.rng(i);
        let case = causal_case(&mut rng, LAB.0, LAB.1, with_background);
        let states = vec![ctx.state(&mut rng)?];
        Ok(check_causal_relation(&FreeScattering, &case.later, &case.earlier, &case.background, &states, &cfg)?)
    };
    let numeric = [(1u64, false), (2, true), (3, true)]
        .par_iter()
        .map(|&(i, bg)| run(i, bg))
        .collect::<Result<Vec<_>, _>>()?;

    // three routes to S(F_f) S(F_g) for f later than g
    let algebraic = par_max(50, 100, |i| {
        let mut rng = ctx.rng(i);
        let case = causal_case(&mut rng, SUPPORT_LO, SUPPORT_HI, false);
        let f = ctx.linear(case.later.density().to_vec())?;
        let g = ctx.linear(case.earlier.density().to_vec())?;
        let folded = normalize(&GroupWord::empty(1).then(f.clone()).then(g.clone()))?;
        let summed = weyl_of(&f.add(&g)?)?;
        let (af, bf) = moments(f.density());
        let (ag, bg) = moments(g.density());
        let offsets = weyl_of(&f)?.theta + weyl_of(&g)?.theta;
        let cocycle = WeylElement::new(
            offsets - 0.5 * delta_pairing(f.density(), g.density()),
            vec![af[0] + ag[0]],
            vec![bf[0] + bg[0]],
        )?;
        Ok(folded.distance(&summed).max(folded.distance(&cocycle)))
    })?;
    Ok((
        vec![
            Record::new("causal_relation_constants", constants, ctx.exact(1e-12)),
            Record::new("causal_relation_linear", numeric[0], 1e-6),
            Record::new("causal_relation_background", numeric[1].max(numeric[2]), 1e-5),
            Record::new("linear_sector_factorization", algebraic, ctx.exact(1e-12)),
        ],
        vec![],
    ))
}

fn euler_lagrange(ctx: &Ctx) -> Result<Outcome, CliError> {
    let algebraic = par_max(100, 0, |i| {
        let mut rng = ctx.rng(i);
        let x0 = random_loop(&mut rng, 1 + (i % 3) as usize, 1.0);
        let f = Functional::linear(x0.acceleration().to_vec(), ConstantMode::Auto(HConvention::Consistent))?;
        Ok(weyl_of(&f)?.distance(&WeylElement::identity(x0.dim())))
    })?;
    let cfg = ctx.scenario.propagator(ctx.scenario.dt)?;
    let numeric = par_max(5, 1000, |i| {
        let mut rng = ctx.rng(i);
        let x0 = random_loop(&mut rng, 1, 1.0);
        let psi = ctx.state(&mut rng)?;
        let f = ctx.linear(x0.acceleration().to_vec())?;
        Ok(scattering(&psi, &f, &cfg)?.distance(&psi))
    })?;
    Ok((
        vec![
            Record::new("weyl_of_loop_densities", algebraic, ctx.exact(1e-12)),
            Record::new("scattering_of_loop_densities", numeric, 1e-6),
        ],
        vec![],
    ))
}

fn interaction(ctx: &Ctx) -> Result<Outcome, CliError> {
    let cfg = ctx.scenario.propagator(ctx.scenario.dt)?;
    let core = LAB;
    let shapes = [
        ("quartic", Shape::polynomial(&[0.0, 0.0, 0.0, 0.0, 0.1])),
        ("gaussian", Shape::gaussian(0.5, 0.0, 1.0)),
    ];
    let reports = shapes
        .par_iter()
        .enumerate()
        .map(|(s, (_, shape))| {
            let mut rng = ctx.rng(s as u64);
            let scenario = relation_scenario(&mut rng, &ctx.grid, core.0, core.1)?;
            let spec = InteractionSpec::new(shape.clone(), core, 0.5)?;
            Ok(verify_interacting_relations(&spec, &scenario, &cfg)?)
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut rng = ctx.rng(10);
    let scenario = relation_scenario(&mut rng, &ctx.grid, core.0, core.1)?;
    let off = InteractionSpec::new(Shape::polynomial(&[0.0]), core, 0.5)?;
    let relative = verify_interacting_relations(&off, &scenario, &cfg)?;
    let free = verify_free_relations(&scenario, &cfg)?;
    let reduction = (relative.dynamical - free.dynamical).abs().max((relative.causal - free.causal).abs());

    let spec = InteractionSpec::new(shapes[0].1.clone(), core, 0.5)?;
    let psi = &scenario.states[0];
    let central = relative_scattering(psi, &Functional::constant(1, 0.7), &spec, &cfg)?
        .distance(&psi.with_phase(0.7));

    let mut records = vec![
        Record::new("zero_potential_reduction", reduction, ctx.exact(1e-12)),
        Record::new("central_phase", central, 1e-10),
    ];
    for ((name, _), r) in shapes.iter().zip(&reports) {
        records.push(Record::new(&format!("{name}_dynamical"), r.dynamical, 1e-5));
        records.push(Record::new(&format!("{name}_causal"), r.causal, 1e-5));
    }
    Ok((records, vec![]))
}

fn convergence(ctx: &Ctx) -> Result<Outcome, CliError> {
    let dt = ctx.scenario.dt;
    let mut rng = ctx.rng(0);
    let case = dynamical_case(&mut rng, LAB.0, LAB.1, true);
    let psi = ctx.state(&mut rng)?;
    let f = &case.functional;
    let solve = |step: f64, scheme: Scheme| -> Result<WaveState, CliError> {
        Ok(scattering(&psi, f, &ctx.scenario.propagator(step)?.with_scheme(scheme))?)
    };

    let self_study = |name: &str, scheme: Scheme, base: f64| -> Result<Slope, CliError> {
        let steps: Vec<f64> = (0..5).map(|k| base / f64::powi(2.0, k)).collect();
        let states = steps.par_iter().map(|&s| solve(s, scheme)).collect::<Result<Vec<_>, _>>()?;
        let points: Vec<ConvergencePoint> = states
            .windows(2)
            .zip(&steps)
            .map(|(w, &s)| ConvergencePoint(s, w[0].distance(&w[1])))
            .collect();
        Ok(Slope {
            name: name.to_string(),
            order: fitted_order(&points),
            points,
        })
    };
    let strang = self_study("strang_self_convergence", Scheme::Strang, 8.0 * dt)?;
    let trotter = self_study("trotter1_self_convergence", Scheme::Trotter1, 8.0 * dt)?;

    let reference = solve(dt, Scheme::Strang)?;
    let coarse: Vec<f64> = (0..4).map(|k| 10.0 * dt / f64::powi(2.0, k)).collect();
    let limit_points = coarse
        .par_iter()
        .map(|&s| Ok(ConvergencePoint(s, solve(s, Scheme::Trotter1)?.distance(&reference))))
        .collect::<Result<Vec<_>, CliError>>()?;
    let limit = Slope {
        name: "trotter1_vs_strang".to_string(),
        order: fitted_order(&limit_points),
        points: limit_points,
    };

    let records = vec![
        Record::new("strang_self_convergence_order", (strang.order - 2.0).abs(), 0.05),
        Record::new("trotter1_self_convergence_order", (trotter.order - 1.0).abs(), 0.05),
        Record::new("trotter1_vs_strang_order", (limit.order - 1.0).abs(), 0.1),
        Record::new("unitarity", (reference.norm() - 1.0).abs(), 1e-12),
    ];
    Ok((records, vec![strang, trotter, limit]))
}
