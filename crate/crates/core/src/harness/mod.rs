//! Experiment configuration, the per-mass pipelines, reports and the
//! thresholds each run is judged by.

mod config;
mod report;
mod suites;

use std::time::Instant;

use rayon::prelude::*;

use crate::{Error, Result};

pub use config::{airy_bump, observable, read_config, Experiment, ExperimentConfig, GridScaling, OBSERVABLES};
pub use report::{fit_slopes, read_report, write_report, Check, ConvergenceReport, Format, ReportPoint, Slopes};
pub use suites::{
    example1_point, example2_point, run_airy_suite, run_dynamics_suite, run_example1, run_example2, DynamicsOutcome,
};

/// Slope window for the first example and the Airy observable identity.
pub const SLOPE_WINDOW: (f64, f64) = (-1.3, -0.7);
/// Slope window for the caustic example.
pub const CAUSTIC_SLOPE_WINDOW: (f64, f64) = (-1.4, -0.6);
/// Relative jump allowed at the glue points.
pub const GLUE_TOLERANCE: f64 = 1e-8;

/// Runs whatever experiment `cfg` names.
pub fn run(cfg: &ExperimentConfig) -> Result<ConvergenceReport> {
    cfg.validate()?;
    match cfg.experiment {
        Experiment::Example1Gap | Experiment::Example1Crossing => run_example1(cfg),
        Experiment::Example2Caustic => run_example2(cfg),
        Experiment::AiryCheck | Experiment::AiryObservable => run_airy_suite(cfg),
        Experiment::DynamicsSuite => run_dynamics_suite(cfg),
    }
}

/// Evaluates `point` at every mass on a pool of `cfg.threads` workers. A
/// failing mass is recorded in its point and does not stop the others.
pub(crate) fn sweep<F>(cfg: &ExperimentConfig, point: F) -> Result<(Vec<ReportPoint>, f64)>
where
    F: Fn(f64, usize) -> Result<ReportPoint> + Sync,
{
    let start = Instant::now();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cfg.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let points = pool.install(|| {
        cfg.masses
            .par_iter()
            .map(|&m| {
                let n = cfg.grid_points(m);
                point(m, n).unwrap_or_else(|e| ReportPoint::failed(m, n, &e))
            })
            .collect()
    });
    Ok((points, start.elapsed().as_secs_f64()))
}
