//! Exit criteria of the crate, one line each. Runs without the libtest
//! harness so every line prints even when an earlier one fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::*;
use semiclassical::caustic::{dual_phase, stationary_phase_psis, FourierIntegral};
use semiclassical::harness::{
    example2_point, run, ConvergenceReport, Experiment, ExperimentConfig, CAUSTIC_SLOPE_WINDOW, GLUE_TOLERANCE,
    SLOPE_WINDOW,
};
use semiclassical::numerics::eigs_near;
use semiclassical::projection::project_best_subset;

struct Outcome {
    passed: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn within(v: Option<f64>, (lo, hi): (f64, f64)) -> bool {
    v.is_some_and(|v| v >= lo && v <= hi)
}

fn fmt(v: Option<f64>) -> String {
    v.map_or("none".into(), |x| format!("{x:.4}"))
}

fn point_errors(r: &ConvergenceReport) -> usize {
    r.points.iter().filter(|p| p.error.is_some()).count()
}

fn example1(exp: Experiment) -> Outcome {
    let start = Instant::now();
    let r = match run(&ExperimentConfig::default_for(exp)) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("error: {e}")),
    };
    let wall = start.elapsed().as_secs_f64();
    let ok = within(r.slopes.g1, SLOPE_WINDOW)
        && within(r.slopes.g2, SLOPE_WINDOW)
        && point_errors(&r) == 0
        && wall <= 600.0;
    outcome(
        ok,
        format!(
            "slope_g1 {} slope_g2 {} window {:?}, {} failed masses, {wall:.1} s of 600 s",
            fmt(r.slopes.g1),
            fmt(r.slopes.g2),
            SLOPE_WINDOW,
            point_errors(&r)
        ),
    )
}

fn caustic_sweep() -> Outcome {
    let r = match run(&ExperimentConfig::default_for(Experiment::Example2Caustic)) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("error: {e}")),
    };
    let glue = r.points.iter().filter_map(|p| p.glue_jump).fold(0.0f64, f64::max);
    let ok = within(r.slopes.g1, CAUSTIC_SLOPE_WINDOW) && glue <= GLUE_TOLERANCE && point_errors(&r) == 0;
    outcome(
        ok,
        format!(
            "ratio-error slope {} window {:?}, max glue jump {glue:.2e} <= {GLUE_TOLERANCE:e}",
            fmt(r.slopes.g1),
            CAUSTIC_SLOPE_WINDOW
        ),
    )
}

fn mollifier() -> Outcome {
    let cfg = ExperimentConfig::default_for(Experiment::AiryCheck);
    let r = match run(&cfg) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("error: {e}")),
    };
    let worst = r.points.iter().filter_map(|p| p.err_g1).fold(0.0f64, f64::max);
    let ok = r.passed && r.points.len() == cfg.masses.len();
    outcome(
        ok,
        format!(
            "masses {:?}, worst lhs/bound {worst:.4}, {} masses with a broken bound",
            cfg.masses,
            point_errors(&r)
        ),
    )
}

fn airy_identity() -> Outcome {
    let r = match run(&ExperimentConfig::default_for(Experiment::AiryObservable)) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("error: {e}")),
    };
    let ok = within(r.slopes.g1, SLOPE_WINDOW) && point_errors(&r) == 0;
    outcome(ok, format!("slope {} window {:?}", fmt(r.slopes.g1), SLOPE_WINDOW))
}

fn eigensolver() -> Outcome {
    let len = 2.0 * std::f64::consts::PI;
    let mut worst_circ = 0.0f64;
    for n in [64usize, 256, 1024] {
        let a = periodic_laplacian(n, len, 1.0);
        let count = 9;
        let pairs = match eigs_near(&a, 0.0, count) {
            Ok(p) => p,
            Err(e) => return outcome(false, format!("n={n}: {e}")),
        };
        let mut exact: Vec<f64> = (-4i64..=4).map(|k| circulant_eigenvalue(k, n, len, 1.0)).collect();
        exact.sort_by(f64::total_cmp);
        let mut got: Vec<f64> = pairs.iter().map(|p| p.value).collect();
        got.sort_by(f64::total_cmp);
        for (g, e) in got.iter().zip(&exact) {
            let err = if *e == 0.0 { g.abs() } else { ((g - e) / e).abs() };
            worst_circ = worst_circ.max(err);
        }
    }
    let mut r = rng(11);
    let mut worst_band = 0.0f64;
    for trial in 0..60 {
        let n = 5 + (trial * 53) % 196;
        let bw = (1 + trial % 5).min(n - 1);
        let a = random_band(&mut r, n, bw, trial % 2 == 0);
        let ev = jacobi_eigenvalues(a.to_dense(), n);
        let target = ev[(trial * 7) % n] - 0.031;
        let count = 10.min(n);
        let expect = reference_near(&ev, target, count);
        let pairs = match eigs_near(&a, target, count) {
            Ok(p) => p,
            Err(e) => return outcome(false, format!("band trial {trial}: {e}")),
        };
        for (p, e) in pairs.iter().zip(&expect) {
            worst_band = worst_band.max((p.value - e).abs());
        }
    }
    outcome(
        worst_circ <= 1e-10 && worst_band <= 1e-9,
        format!("circulant rel err {worst_circ:.2e} <= 1e-10, band vs Jacobi {worst_band:.2e} <= 1e-9"),
    )
}

fn projection() -> Outcome {
    let mut mismatches = 0;
    let mut largest = 0;
    for seed in 0..100u64 {
        let (phi, sel, grid, ch) = random_case(seed);
        largest = largest.max(sel.kept.len());
        match project_best_subset(&phi, &sel, &grid, ch) {
            Ok(p) if p.chosen_mask == oracle_mask(&phi, &sel, &grid, ch) => {}
            _ => mismatches += 1,
        }
    }
    outcome(
        mismatches == 0 && largest <= 6,
        format!("{mismatches} mask mismatches in 100 trials, largest kept set {largest}"),
    )
}

fn dynamics() -> Outcome {
    let r = match run(&ExperimentConfig::default_for(Experiment::DynamicsSuite)) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("error: {e}")),
    };
    let parts: Vec<String> = r
        .checks
        .iter()
        .map(|c| {
            format!(
                "{}={}{}",
                c.name,
                c.value.map_or("none".into(), |v| format!("{v:.2e}")),
                if c.passed { "" } else { "!" }
            )
        })
        .collect();
    outcome(r.passed && r.checks.len() == 7, parts.join(" "))
}

fn stationary_orders() -> Outcome {
    let mass = 800.0;
    let cfg = ExperimentConfig::default_for(Experiment::Example2Caustic);
    let point = match example2_point(&cfg, mass, cfg.grid_points(mass)) {
        Ok(p) => p,
        Err(e) => return outcome(false, format!("pipeline: {e}")),
    };
    let (x0, e0) = (point.x0.unwrap_or(f64::NAN), point.e0.unwrap_or(f64::NAN));
    let errs: Result<Vec<f64>, _> = (|| {
        let dp = dual_phase(e0)?;
        let u = FourierIntegral::new(&dp, mass)?.eval(x0);
        (0..=3)
            .map(|k| stationary_phase_psis(x0, &dp, mass, k).map(|s| (s.u_estimate() - u).norm() / u.norm()))
            .collect()
    })();
    let errs: Vec<f64> = match errs {
        Ok(e) => e,
        Err(e) => return outcome(false, format!("{e}")),
    };
    let ok = errs.windows(2).all(|w| w[1] < w[0]);
    let list: Vec<String> = errs.iter().map(|e| format!("{e:.3e}")).collect();
    outcome(ok, format!("X0 {x0:.4} E0 {e0:.4}, rel err k=0..3: {}", list.join(" ")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("gap_sweep_slopes", || example1(Experiment::Example1Gap)),
        ("crossing_sweep_slopes", || example1(Experiment::Example1Crossing)),
        ("caustic_sweep_slope_and_glue", caustic_sweep),
        ("airy_mollifier_bound", mollifier),
        ("airy_observable_identity_slope", airy_identity),
        ("eigensolver_oracles", eigensolver),
        ("projection_exhaustive_oracle", projection),
        ("dynamics_properties", dynamics),
        ("stationary_phase_order_monotone", stationary_orders),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("{} {tag} {name}: {}", i + 1, o.detail);
        if !o.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
