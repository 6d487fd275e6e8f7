use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{airy_bump, observable, Experiment, ExperimentConfig};
use super::report::{Check, ConvergenceReport, ReportPoint};
use super::{sweep, CAUSTIC_SLOPE_WINDOW, GLUE_TOLERANCE, SLOPE_WINDOW};
use crate::caustic::{airy_md_observable_identity, airy_mollifier_check, assemble_caustic_solution, dual_phase};
use crate::dynamics::{
    microcanonical_average, monodromy_jacobian, time_average_observable, verlet_integrate, HamiltonianSystem1D,
};
use crate::model::{
    build_scalar_hamiltonian, build_two_state_hamiltonian, electronic_surfaces, select_surface, Grid1D, TwoStateModel,
};
use crate::numerics::eigs_near;
use crate::projection::{cluster_eigenvalues_or_nearest, project_best_subset};
use crate::wkb::{
    md_ansatz, md_density, observable_error, observable_ratio_error, wkb_phase, Density, TurningPointDensity,
};
use crate::{Error, Result};

fn expect_kind(cfg: &ExperimentConfig, allowed: &[Experiment]) -> Result<()> {
    if allowed.contains(&cfg.experiment) {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "experiment `{}` cannot run here, expected one of {}",
            cfg.experiment.name(),
            allowed.iter().map(|e| e.name()).collect::<Vec<_>>().join(", ")
        )))
    }
}

/// One mass of the two-state example: eigenpairs near `E`, the MD density
/// on the selected surface, the projected Schrödinger density and the
/// relative errors of both observables.
pub fn example1_point(cfg: &ExperimentConfig, mass: f64, n: usize) -> Result<ReportPoint> {
    let [n1, n2] = cfg.observable_names();
    let (g1, g2) = (observable(&n1)?, observable(&n2)?);
    let grid = Grid1D::new(n, -PI, PI)?;
    let model = TwoStateModel::cosine(cfg.c, mass)?;
    let h = build_two_state_hamiltonian(&model, &grid)?;
    let pairs = eigs_near(&h.matrix, cfg.energy, cfg.eigen_count)?;
    let sel = cluster_eigenvalues_or_nearest(pairs, cfg.energy, mass)?;
    let e0 = sel.e0;
    let surfaces = electronic_surfaces(&model, &grid);
    let (branch, lambda) = select_surface(&surfaces, e0)?;
    let rho = md_density(&lambda, e0, &grid)?;
    let theta = wkb_phase(&lambda, e0, &grid)?;
    let state = md_ansatz(&rho, &theta, surfaces.vectors(branch), mass)?;
    let proj = project_best_subset(&state.flatten(), &sel, &grid, 2)?;
    let rho_h = Density::from_wave(grid, &proj.wave, 2)?;
    Ok(ReportPoint {
        err_g1: Some(observable_error(&g1, &rho, &rho_h)?),
        err_g2: Some(observable_error(&g2, &rho, &rho_h)?),
        e0: Some(e0),
        fallback: sel.fallback,
        ..ReportPoint::new(mass, n)
    })
}

pub fn run_example1(cfg: &ExperimentConfig) -> Result<ConvergenceReport> {
    expect_kind(cfg, &[Experiment::Example1Gap, Experiment::Example1Crossing])?;
    let (points, wall) = sweep(cfg, |m, n| example1_point(cfg, m, n))?;
    let slopes = super::fit_slopes(&points);
    let (lo, hi) = SLOPE_WINDOW;
    let checks = vec![
        Check::within("slope_g1", slopes.g1, lo, hi),
        Check::within("slope_g2", slopes.g2, lo, hi),
    ];
    Ok(ConvergenceReport::assemble(cfg.clone(), points, checks, wall))
}

/// Sup distance between the cumulative distribution of `rho` on its grid and
/// the arcsine law of the harmonic well at energy `e0`.
fn arcsine_cdf_distance(rho: &Density, e0: f64) -> f64 {
    let r = e0.sqrt();
    let mut acc = 0.0;
    let mut worst = 0.0f64;
    for (j, v) in rho.values.iter().enumerate() {
        acc += rho.grid.h * v;
        let x = rho.grid.point(j);
        let f = 0.5 + (x / r).clamp(-1.0, 1.0).asin() / PI;
        worst = worst.max((acc - f).abs());
    }
    worst
}

/// One mass of the caustic example. `err_g1` is the observable-ratio error,
/// `err_g2` the distribution distance between the projected density and the
/// classical one.
pub fn example2_point(cfg: &ExperimentConfig, mass: f64, n: usize) -> Result<ReportPoint> {
    let [n1, n2] = cfg.observable_names();
    let (g1, g2) = (observable(&n1)?, observable(&n2)?);
    if !(cfg.energy > 0.0) {
        return Err(Error::Config(format!(
            "field `E` = {} must be > 0 for the caustic example",
            cfg.energy
        )));
    }
    let half = 2.0 * cfg.energy.sqrt();
    let grid = Grid1D::new(n, -half, half)?;
    let v = |x: f64| x * x;
    let dv = |x: f64| 2.0 * x;
    let h = build_scalar_hamiltonian(v, mass, &grid)?;
    let pairs = eigs_near(&h.matrix, cfg.energy, cfg.eigen_count)?;
    let sel = cluster_eigenvalues_or_nearest(pairs, cfg.energy, mass)?;
    let e0 = sel.e0;
    let dp = dual_phase(e0)?;
    let sol = assemble_caustic_solution(&dp, &v, &dv, mass, &grid, cfg.order)?;
    let proj = project_best_subset(&sol.phi, &sel, &grid, 1)?;
    let rho_h = Density::from_wave(grid, &proj.wave, 1)?;
    let turning = e0.sqrt();
    let md = TurningPointDensity::new(Arc::new(v), e0, -turning, turning)?;
    Ok(ReportPoint {
        err_g1: Some(observable_ratio_error(&g1, &g2, &md, &rho_h)?),
        err_g2: Some(arcsine_cdf_distance(&rho_h, e0)),
        e0: Some(e0),
        fallback: sel.fallback,
        x0: Some(sol.x0),
        glue_jump: Some(sol.glue_jump),
        ..ReportPoint::new(mass, n)
    })
}

pub fn run_example2(cfg: &ExperimentConfig) -> Result<ConvergenceReport> {
    expect_kind(cfg, &[Experiment::Example2Caustic])?;
    let (points, wall) = sweep(cfg, |m, n| example2_point(cfg, m, n))?;
    let slopes = super::fit_slopes(&points);
    let (lo, hi) = CAUSTIC_SLOPE_WINDOW;
    let worst_glue = points
        .iter()
        .map(|p| p.glue_jump)
        .try_fold(0.0f64, |acc, g| g.map(|g| acc.max(g)));
    let dist: Vec<f64> = points.iter().filter_map(|p| p.err_g2).collect();
    let rises = dist.windows(2).filter(|w| w[1] >= w[0]).count() as f64;
    let checks = vec![
        Check::within("slope_ratio_error", slopes.g1, lo, hi),
        Check::within("max_glue_jump", worst_glue, 0.0, GLUE_TOLERANCE),
        Check::within("distribution_distance_rises", Some(rises), 0.0, 1.0).info(),
    ];
    Ok(ConvergenceReport::assemble(cfg.clone(), points, checks, wall))
}

/// Seeded smooth bumps `a exp(−1/(1 − t²))`, `t = (x − c)/w`.
fn bump_battery(seed: u64, count: usize) -> Vec<(f64, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            (
                rng.gen_range(0.5..2.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(1.0..3.0),
            )
        })
        .collect()
}

const BUMPS: usize = 6;

/// Mollifier estimate over a bump battery (`airy_check`) or the observable
/// identity over the mass sweep (`airy_observable`).
pub fn run_airy_suite(cfg: &ExperimentConfig) -> Result<ConvergenceReport> {
    expect_kind(cfg, &[Experiment::AiryCheck, Experiment::AiryObservable])?;
    match cfg.experiment {
        Experiment::AiryCheck => {
            let bumps = bump_battery(cfg.seed, BUMPS);
            let (points, wall) = sweep(cfg, |m, n| {
                let n = n.max(4096);
                let (mut worst_ratio, mut worst_lhs) = (0.0f64, 0.0f64);
                let mut failures = 0usize;
                for &(a, c, w) in &bumps {
                    let g = |x: f64| a * airy_bump(-1.5 + 0.5 * (x - c) / w);
                    let r = airy_mollifier_check(&g, -10.0, 10.0, n, m)?;
                    if r.lhs > r.bound {
                        failures += 1;
                    }
                    worst_ratio = worst_ratio.max(r.lhs / r.bound);
                    worst_lhs = worst_lhs.max(r.lhs);
                }
                if failures > 0 {
                    return Err(Error::InvalidInput(format!(
                        "{failures} bumps break the estimate at M = {m}"
                    )));
                }
                Ok(ReportPoint {
                    err_g1: Some(worst_ratio),
                    err_g2: Some(worst_lhs),
                    ..ReportPoint::new(m, n)
                })
            })?;
            let worst = points
                .iter()
                .map(|p| p.err_g1)
                .try_fold(0.0f64, |acc, v| v.map(|v| acc.max(v)));
            let checks = vec![Check::within("max_lhs_over_bound", worst, 0.0, 1.0)];
            Ok(ConvergenceReport::assemble(cfg.clone(), points, checks, wall))
        }
        _ => {
            let [n1, n2] = cfg.observable_names();
            let (g1, g2) = (observable(&n1)?, observable(&n2)?);
            let (points, wall) = sweep(cfg, |m, n| {
                let r = airy_md_observable_identity(&g1, &g2, -2.0, -1.0, m)?;
                Ok(ReportPoint {
                    err_g1: Some(r.difference),
                    ..ReportPoint::new(m, n)
                })
            })?;
            let slopes = super::fit_slopes(&points);
            let (lo, hi) = SLOPE_WINDOW;
            let checks = vec![Check::within("slope_difference", slopes.g1, lo, hi)];
            Ok(ConvergenceReport::assemble(cfg.clone(), points, checks, wall))
        }
    }
}

/// Raw numbers of the dynamics property runs.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsOutcome {
    pub drift_ratio: f64,
    pub reversal_error: f64,
    pub harmonic_average_error: f64,
    /// `(name, |time average − phase-space average|)`.
    pub ergodic_errors: Vec<(String, f64)>,
    pub caustic_error: f64,
    pub caustic_dt: f64,
}

fn quadratic() -> HamiltonianSystem1D {
    HamiltonianSystem1D::new(Arc::new(|x: f64| x * x))
        .with_derivative(Arc::new(|x: f64| 2.0 * x))
        .with_second_derivative(Arc::new(|_| 2.0))
}

pub(crate) fn dynamics_outcome() -> Result<DynamicsOutcome> {
    let quad = quadratic();
    let drift = |dt: f64| -> Result<f64> {
        let steps = (10.0 / dt).round() as usize;
        Ok(verlet_integrate(&quad, 1.0, 0.0, dt, steps)?.energy_drift(&quad))
    };
    let drift_ratio = drift(0.01)? / drift(0.005)?;

    let (x0, p0) = (0.3, -0.2);
    let fwd = verlet_integrate(&quad, x0, p0, 0.01, 1000)?;
    let (x, p) = fwd.last();
    let back = verlet_integrate(&quad, x, p, -0.01, 1000)?;
    let (xb, pb) = back.last();
    let reversal_error = (xb - x0).abs().max((pb - p0).abs());

    let harmonic = HamiltonianSystem1D::harmonic(1.0);
    let avg = time_average_observable(&harmonic, &|x| x * x, 2f64.sqrt(), 0.0, 1e-3, 100.0 * PI, 10.0)?;
    let harmonic_average_error = (avg - 1.0).abs();

    let wells: Vec<(&str, HamiltonianSystem1D, f64)> = vec![
        ("harmonic", HamiltonianSystem1D::harmonic(1.0), 1.0),
        (
            "quartic",
            HamiltonianSystem1D::new(Arc::new(|x: f64| 0.25 * x.powi(4) + 0.5 * x * x))
                .with_derivative(Arc::new(|x: f64| x.powi(3) + x)),
            1.0,
        ),
        (
            "morse",
            HamiltonianSystem1D::new(Arc::new(|x: f64| (1.0 - (-x).exp()).powi(2)))
                .with_derivative(Arc::new(|x: f64| 2.0 * (1.0 - (-x).exp()) * (-x).exp())),
            0.5,
        ),
    ];
    let g = |x: f64| x * x + 0.5 * x;
    let mut ergodic_errors = Vec::new();
    for (name, sys, e) in wells {
        let p0 = (2.0 * (e - sys.lambda(0.0))).sqrt();
        let ta = time_average_observable(&sys, &g, 0.0, p0, 1e-3, 2000.0, 50.0)?;
        let mc = microcanonical_average(&sys, &g, e, 0.0)?;
        ergodic_errors.push((name.to_string(), (ta - mc).abs()));
    }

    let caustic_dt = 1e-3;
    let t = monodromy_jacobian(&HamiltonianSystem1D::harmonic(1.0), 0.4, 0.0, caustic_dt, 2000)?;
    let first = t.caustics.first().copied().unwrap_or(f64::INFINITY);
    Ok(DynamicsOutcome {
        drift_ratio,
        reversal_error,
        harmonic_average_error,
        ergodic_errors,
        caustic_error: (first - PI / 2.0).abs(),
        caustic_dt,
    })
}

pub fn run_dynamics_suite(cfg: &ExperimentConfig) -> Result<ConvergenceReport> {
    expect_kind(cfg, &[Experiment::DynamicsSuite])?;
    let start = Instant::now();
    let o = dynamics_outcome()?;
    let mut checks = vec![
        Check::within("verlet_drift_ratio", Some(o.drift_ratio), 3.5, 4.5),
        Check::within("time_reversal_error", Some(o.reversal_error), 0.0, 1e-10),
        Check::within("harmonic_x2_average_error", Some(o.harmonic_average_error), 0.0, 1e-3),
    ];
    for (name, err) in &o.ergodic_errors {
        checks.push(Check::within(&format!("ergodic_error_{name}"), Some(*err), 0.0, 1e-2));
    }
    checks.push(Check::within(
        "first_caustic_error",
        Some(o.caustic_error),
        0.0,
        2.0 * o.caustic_dt,
    ));
    Ok(ConvergenceReport::assemble(
        cfg.clone(),
        Vec::new(),
        checks,
        start.elapsed().as_secs_f64(),
    ))
}
