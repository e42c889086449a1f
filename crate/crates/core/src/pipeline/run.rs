//! Orchestration: sample → select → solve → assemble → analyze → reconstruct.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::ExperimentConfig;
use super::report::*;
use crate::analysis::{
    bm_density_proxy, density_deviation, eps_hat, growth_check, linear_density, PoleSet, GROWTH_HEIGHTS,
};
use crate::cartwright::{type_estimate, verify_quotient_identity, CanonicalProduct, Quotient};
use crate::error::{Error, Result};
use crate::local_map::LocalChart;
use crate::numeric::{sup_dist, Point};
use crate::reconstruction::{reconstruct_run, twisted_signal, ReconstructionReport, ReconstructionSettings};
use crate::solver::{
    plant_blocks, select_parameters, solve, BlockPartition, CauchyKernelSum, CoefState, Selection, SelectionSettings,
    System,
};
use crate::stochastic::{sample, GaussianDraw, Mode, Weight};

/// Thresholds of the run gates.
pub mod thresholds {
    pub const W_INVERSE_LIPSCHITZ: f64 = 3.0;
    pub const DIRECT_RESIDUAL: f64 = 1e-10;
    pub const INTERPOLATION: f64 = 1e-8;
    pub const SEPARATION: f64 = 0.1;
    pub const GROWTH_FACTOR: f64 = 2.0;
    pub const PRODUCT_CUTOFF: f64 = 1e-4;
    pub const TYPE_V: f64 = 0.1;
    pub const TYPE_U_EXCESS: f64 = 0.05;
    pub const SINE_VALUE: f64 = 1e-6;
    pub const SINE_TYPE: f64 = 0.02;
    pub const QUOTIENT: f64 = 1e-4;
    pub const BRANCH: f64 = 1e-8;
    pub const RECONSTRUCTION: f64 = 1e-2;
    pub const AUXILIARY_MASS: f64 = 1e-2;
}

/// Evaluation points of the quotient identity.
pub const QUOTIENT_POINTS: usize = 50;
/// Fit points of the type estimates.
pub const TYPE_POINTS: usize = 48;
/// Poles sampled for the branch continuity check.
pub const BRANCH_SAMPLES: usize = 64;
/// Sliding-window lengths of the density proxy.
pub const BM_LENGTHS: [i64; 3] = [64, 128, 256];
/// Half-width of the `ℤ∖{0}` sanity product.
pub const SINE_WINDOW: i64 = 2000;

/// A solved system and its interpolant.
#[derive(Debug, Clone)]
pub struct Solved {
    pub draw: GaussianDraw,
    pub weight: Weight,
    pub chart: LocalChart,
    pub planted: Vec<i64>,
    pub selection: Selection,
    pub state: CoefState,
    pub sum: CauchyKernelSum,
}

/// Output of [`run`].
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: ExperimentReport,
    pub saved: SavedRun,
    pub solved: Solved,
}

struct Clock(BTreeMap<String, u64>);

impl Clock {
    fn time<T>(&mut self, stage: &'static str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let out = f().map_err(|e| e.in_stage(stage))?;
        self.0.insert(stage.into(), start.elapsed().as_millis() as u64);
        Ok(out)
    }
}

/// Draw, planting, parameter search, fixed-point solve and assembly.
pub fn solve_stage(cfg: &ExperimentConfig) -> Result<Solved> {
    solve_timed(cfg, &mut Clock(BTreeMap::new()))
}

fn solve_timed(cfg: &ExperimentConfig, clock: &mut Clock) -> Result<Solved> {
    cfg.validate()?;
    let weight = cfg.weight()?;
    let chart = cfg.chart()?;
    let (draw, planted) = clock.time("sample", || {
        let mut draw = if cfg.zero_draw {
            GaussianDraw::zero(cfg.mode, cfg.n, cfg.margin)
        } else {
            sample(cfg.seed, cfg.mode, cfg.n, cfg.margin)
        };
        let planted = match cfg.plant_every {
            Some(e) => plant_blocks(&mut draw, &weight, &chart, cfg.t_spacing, e)?,
            None => Vec::new(),
        };
        Ok((draw, planted))
    })?;
    let settings = SelectionSettings { t0: cfg.t_spacing, tau: cfg.tau, max_doublings: cfg.max_doublings };
    let selection = clock.time("select", || select_parameters(&draw, &weight, &chart, settings))?;
    let state = clock.time("solve", || solve(&selection.system, &selection.target.values, cfg.tol, cfg.max_iter))?;
    let sum = clock.time("assemble", || selection.system.assemble(&state.alpha))?;
    Ok(Solved { draw, weight, chart, planted, selection, state, sum })
}

/// Largest observed `‖W⁻¹x − W⁻¹y‖/‖x − y‖` for perturbations of `η` of size `γ₂/8`.
fn w_inverse_ratio(system: &System, eta: &[Complex64], mode: Mode, pairs: usize, seed: u64) -> (f64, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0001);
    let r = system.chart().gamma2 / 8.0;
    let perturb = |rng: &mut ChaCha8Rng| -> Vec<Complex64> {
        eta.iter()
            .map(|e| {
                let im = if mode == Mode::Complex { rng.random_range(-r..=r) } else { 0.0 };
                e + Complex64::new(rng.random_range(-r..=r), im)
            })
            .collect()
    };
    let (mut best, mut skipped) = (0.0f64, 0);
    for _ in 0..pairs {
        let x = perturb(&mut rng);
        let y = perturb(&mut rng);
        match (system.invert_w(&x), system.invert_w(&y)) {
            (Ok(a), Ok(b)) => best = best.max(sup_dist(&a, &b) / sup_dist(&x, &y)),
            _ => skipped += 1,
        }
    }
    (best, skipped)
}

/// Largest observed `‖Va − Vb‖/‖a − b‖` for perturbations of `α₀` of size `γ₁/8`.
fn v_lipschitz_observed(system: &System, alpha0: &[Complex64], mode: Mode, pairs: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0002);
    let r = system.chart().gamma1 / 8.0;
    let mut best = 0.0f64;
    for _ in 0..pairs {
        let mut pert = || -> Vec<Complex64> {
            alpha0
                .iter()
                .map(|a| {
                    let im = if mode == Mode::Complex { rng.random_range(-r..=r) } else { 0.0 };
                    a + Complex64::new(rng.random_range(-r..=r), im)
                })
                .collect()
        };
        let a = pert();
        let b = pert();
        best = best.max(sup_dist(&system.apply_v(&a), &system.apply_v(&b)) / sup_dist(&a, &b));
    }
    best
}

fn interpolation_section(s: &Solved, cfg: &ExperimentConfig) -> InterpolationSection {
    let m_half = cfg.half_width();
    let buffer = cfg.buffer();
    let interior = cfg.n as i64 - buffer;
    let k = s.selection.k;
    let values = s.sum.eval_integers(-m_half, m_half);
    let mut sec = InterpolationSection {
        buffer,
        interior_max: 0.0,
        interior_max_normalized: 0.0,
        edge_max: 0.0,
        edge_max_normalized: 0.0,
    };
    for (i, f) in values.iter().enumerate() {
        let m = -m_half + i as i64;
        let w = s.weight.at(m);
        let err = (f - s.draw.get(m) * w).norm();
        let norm = err / (k * w * ((m * m) as f64 + 1.0));
        if m.abs() <= interior {
            sec.interior_max = sec.interior_max.max(err);
            sec.interior_max_normalized = sec.interior_max_normalized.max(norm);
        } else {
            sec.edge_max = sec.edge_max.max(err);
            sec.edge_max_normalized = sec.edge_max_normalized.max(norm);
        }
    }
    sec
}

/// Counting, separation, deficit and density statistics of the pole set.
pub fn analyze_poles(sum: &CauchyKernelSum, partition: &BlockPartition, n: i64) -> Result<PoleSection> {
    let q = PoleSet::new(sum.all_poles())?;
    let window_size = partition.len();
    let deficit = window_size as i64 - q.len() as i64;
    let p_hat = partition.p_hat();
    let eps = eps_hat(p_hat, partition.t());
    let range = n as f64;
    Ok(PoleSection {
        count: q.len(),
        dropped: sum.dropped().len(),
        window_size,
        selected_blocks: partition.selected().len(),
        deficit,
        deficit_matches: deficit == partition.selected().len() as i64,
        separation: q.separation(),
        p_hat,
        eps_hat: eps,
        deviation: density_deviation(&q, eps, range),
        linear_density: linear_density(&q, &[range / 4.0, range / 2.0, range]),
        bm_proxy: bm_density_proxy(&q, &BM_LENGTHS, -n, n),
        bm_proxy_bound: 1.0 - eps / 2.0,
    })
}

fn growth_constant(s: &Solved, grid: i64) -> Result<crate::analysis::GrowthReport> {
    let q = PoleSet::new(s.sum.all_poles())?;
    Ok(growth_check(&s.sum, &q, grid, &GROWTH_HEIGHTS))
}

fn cartwright_section(s: &Solved, cfg: &ExperimentConfig, eps: f64) -> Result<CartwrightSection> {
    let m_half = cfg.half_width();
    let u = Quotient::new(s.sum.clone(), m_half)?;
    let v = u.product();
    let y_max = m_half as f64 / 16.0;
    let type_v = type_estimate(|y| v.log_eval(Complex64::new(0.0, y)).re, y_max, TYPE_POINTS);
    let type_u = (!s.sum.terms().is_empty()).then(|| {
        type_estimate(
            |y| {
                let z = Complex64::new(0.0, y);
                v.log_eval(z).re + s.sum.eval(z).map_or(f64::NEG_INFINITY, |f| f.norm().ln())
            },
            y_max,
            TYPE_POINTS,
        )
    });
    let expected = (1.0 - eps) * PI;
    let quotient = verify_quotient_identity(&u, cfg.n as f64 / 4.0, QUOTIENT_POINTS);
    let zeros = v.zeros().len();
    let stride = (zeros / BRANCH_SAMPLES).max(1);
    let branch_mismatch = (0..zeros).step_by(stride).map(|i| u.branch_mismatch(i)).fold(0.0, f64::max);

    let ints: Vec<Point> = (-SINE_WINDOW..=SINE_WINDOW).filter(|&k| k != 0).map(Point::integer).collect();
    let sine = CanonicalProduct::new(ints, Some((-SINE_WINDOW, SINE_WINDOW)), CanonicalProduct::default_schedule(SINE_WINDOW))?;
    let sine_type = type_estimate(|y| sine.log_eval(Complex64::new(0.0, y)).re, SINE_WINDOW as f64 / 16.0, TYPE_POINTS);

    Ok(CartwrightSection {
        regular_radius: u.regular_radius(),
        near_origin_normalized: v.near_origin_normalized,
        product_at_i: v.eval_with_diagnostics(Complex64::new(0.0, 1.0)),
        type_v_relative_error: (type_v.slope - expected).abs() / expected,
        type_u_excess: type_u.as_ref().map(|t| (t.slope - type_v.slope) / PI),
        type_v,
        type_u,
        expected_type_v: expected,
        l2_gate: !quotient.tail.warning,
        quotient,
        branch_mismatch,
        sine: SineSanity { value_at_half: sine.eval(Complex64::new(0.5, 0.0)).re, type_estimate: sine_type.slope },
    })
}

/// Re-solves the reconstruction for a solved or restored interpolant.
pub fn reconstruction_stage(
    sum: &CauchyKernelSum,
    partition: &BlockPartition,
    draw: &GaussianDraw,
    weight: &Weight,
    cfg: &ExperimentConfig,
) -> Result<ReconstructionReport> {
    let signal = twisted_signal(draw, weight, cfg.n as i64);
    let window = twisted_signal(draw, weight, cfg.half_width());
    let settings = ReconstructionSettings::standard(cfg.n as i64, cfg.buffer(), cfg.half_width());
    reconstruct_run(sum, partition, &signal, &window, &settings)
}

fn gates(r: &ExperimentReport) -> Vec<Gate> {
    use thresholds::*;
    let tau = r.parameters.tau;
    let op = &r.operators;
    let mut g = vec![
        Gate::at_most("w_inverse_lipschitz", true, op.w_inverse_max_ratio, W_INVERSE_LIPSCHITZ),
        Gate::at_most("v_of_initial", true, op.v_of_initial, tau),
        Gate::at_most("lipschitz_majorant", true, op.lipschitz_majorant.total, tau),
        Gate::at_most("lipschitz_observed", true, op.lipschitz_observed, tau),
        Gate::flag("steps_dominated", true, r.iteration.steps_dominated),
        Gate::at_most("direct_residual", true, r.iteration.direct_residual, DIRECT_RESIDUAL),
        Gate::at_most("interpolation_interior", true, r.interpolation.interior_max, INTERPOLATION),
        Gate::flag("pole_deficit", true, r.poles.deficit_matches),
        Gate::at_least("eps_hat_positive", false, r.poles.eps_hat, f64::MIN_POSITIVE),
    ];
    let proxy = r.poles.bm_proxy.iter().map(|p| p.max_ratio).fold(0.0, f64::max);
    g.push(Gate::at_most("bm_proxy", false, proxy, r.poles.bm_proxy_bound));
    g.push(Gate::at_least("separation", true, r.poles.separation, SEPARATION));
    if let Some(ratio) = r.growth.ratio {
        let spread = if ratio > 0.0 { ratio.max(1.0 / ratio) } else { f64::INFINITY };
        g.push(Gate::at_most("growth_ratio", false, spread, GROWTH_FACTOR));
    }
    let c = &r.cartwright;
    let cutoff = c.product_at_i.cauchy_diff / c.product_at_i.value.norm().max(f64::MIN_POSITIVE);
    g.push(Gate::at_most("product_cutoff", false, cutoff, PRODUCT_CUTOFF));
    g.push(Gate::at_most("type_v", false, c.type_v_relative_error, TYPE_V));
    if let Some(excess) = c.type_u_excess {
        g.push(Gate::at_most("type_u", false, excess, TYPE_U_EXCESS));
    }
    g.push(Gate::at_most("sine_value", true, (c.sine.value_at_half - 2.0 / PI).abs(), SINE_VALUE));
    g.push(Gate::at_most("sine_type", true, (c.sine.type_estimate - PI).abs() / PI, SINE_TYPE));
    let qv = if c.l2_gate { c.quotient.max_rel } else { 0.0 };
    g.push(Gate::at_most("quotient_identity", true, qv, QUOTIENT));
    g.push(Gate::at_most("branch_continuity", false, c.branch_mismatch, BRANCH));
    if let Some(rec) = &r.reconstruction {
        g.push(Gate::flag("avdonin", true, rec.avdonin.passing_h.is_some()));
        g.push(Gate::at_most("riesz_stability", false, rec.riesz_spread, 0.2));
        g.push(Gate::flag("reconstruction_monotone", true, rec.monotone));
        g.push(Gate::at_most("reconstruction_error", true, rec.final_error, RECONSTRUCTION));
        g.push(Gate::at_most("auxiliary_mass", false, rec.auxiliary_mass, AUXILIARY_MASS));
        g.push(Gate::flag("coefficient_bound", true, rec.coefficient_bound_holds));
    }
    g
}

/// Runs the full pipeline. Gate failures are recorded in the report, not raised.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let mut clock = Clock(BTreeMap::new());
    let s = solve_timed(cfg, &mut clock)?;
    let sel = &s.selection;

    let operators = clock.time("operator_gates", || {
        let (w_ratio, skipped) =
            w_inverse_ratio(&sel.system, &sel.target.values, cfg.mode, cfg.w_inverse_pairs, cfg.seed);
        Ok(OperatorSection {
            w_inverse_pairs: cfg.w_inverse_pairs,
            w_inverse_skipped: skipped,
            w_inverse_max_ratio: w_ratio,
            v_of_initial: sel.v_of_initial,
            lipschitz_majorant: sel.lipschitz,
            lipschitz_observed: v_lipschitz_observed(&sel.system, &sel.initial, cfg.mode, cfg.v_lipschitz_pairs, cfg.seed),
        })
    })?;

    let gamma1 = s.chart.gamma1;
    let step_bounds: Vec<f64> = (1..=s.state.steps.len()).map(|j| gamma1 * 0.5f64.powi(j as i32)).collect();
    let iteration = IterationSection {
        iterations: s.state.iterations,
        steps_dominated: s.state.steps.iter().zip(&step_bounds).all(|(s, b)| s <= b),
        steps: s.state.steps.clone(),
        ratios: s.state.ratios.clone(),
        step_bounds,
        direct_residual: s.state.residual,
        in_coefficient_set: s.state.in_coefficient_set,
    };
    let interpolation = interpolation_section(&s, cfg);
    let poles = clock.time("poles", || analyze_poles(&s.sum, &sel.partition, cfg.n as i64))?;

    let grid = cfg.n as i64 / 2;
    let at_n = clock.time("growth", || growth_constant(&s, grid))?;
    let at_2n = if cfg.growth_compare {
        let double = cfg.with_n(2 * cfg.n);
        Some(clock.time("growth_2n", || growth_constant(&solve_stage(&double)?, grid))?)
    } else {
        None
    };
    let growth = GrowthSection {
        grid_half_width: grid,
        ratio: at_2n.map(|g| if at_n.constant > 0.0 { g.constant / at_n.constant } else { 1.0 }),
        at_n,
        at_2n,
    };

    let cartwright = clock.time("cartwright", || cartwright_section(&s, cfg, poles.eps_hat))?;
    let reconstruction = if cfg.reconstruct {
        Some(clock.time("reconstruct", || reconstruction_stage(&s.sum, &sel.partition, &s.draw, &s.weight, cfg))?)
    } else {
        None
    };

    let parameters = ParametersSection {
        map: s.chart.map().name().to_string(),
        gamma1,
        gamma2: s.chart.gamma2,
        tau: sel.tau,
        k: sel.k,
        t: sel.t,
        c_zeta: s.draw.c_zeta(),
        weight: *s.weight.report(),
        planted: s.planted.clone(),
        trials: sel.trials.clone(),
    };
    let mut report = ExperimentReport {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        parameters,
        operators,
        iteration,
        interpolation,
        poles,
        growth,
        cartwright,
        reconstruction,
        gates: Vec::new(),
        timings_ms: BTreeMap::new(),
    };
    report.gates = gates(&report);
    report.timings_ms = clock.0;

    let saved = SavedRun {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        k: sel.k,
        t: sel.t,
        tau: sel.tau,
        selected: sel.partition.selected().to_vec(),
        planted: s.planted.clone(),
        zeta: s.draw.values().to_vec(),
        terms: s.sum.all_terms(),
    };
    Ok(RunOutput { report, saved, solved: s })
}

/// Maps an error to the process exit code: 2 for configuration, 4 for solver
/// failures, 3 for structural invariants and 1 otherwise.
pub fn exit_code(err: &Error) -> i32 {
    match err.root() {
        Error::Config(_) | Error::InvalidWeight(_) | Error::UnknownStrategy { .. } | Error::TomlDe(_) => 2,
        Error::SolverFailure { .. }
        | Error::NewtonDiverged { .. }
        | Error::ParameterSearchExhausted { .. }
        | Error::RadiusExceeded { .. }
        | Error::MembershipViolation { .. }
        | Error::TargetTooLarge { .. }
        | Error::ExcludedParams(_)
        | Error::EvaluationAtPole { .. } => 4,
        Error::Structural(_) => 3,
        _ => 1,
    }
}
