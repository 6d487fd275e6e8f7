use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{Experiment, ExperimentConfig};
use crate::numerics::loglog_slope;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportPoint {
    #[serde(rename = "M")]
    pub mass: f64,
    pub err_g1: Option<f64>,
    pub err_g2: Option<f64>,
    pub grid_n: usize,
    /// Eigenvalue nearest the target.
    pub e0: Option<f64>,
    /// The keep window was empty and the nearest cluster was used.
    pub fallback: bool,
    /// Glue abscissa of the caustic state.
    pub x0: Option<f64>,
    pub glue_jump: Option<f64>,
    /// Message of the stage that failed at this mass.
    pub error: Option<String>,
}

impl ReportPoint {
    pub fn new(mass: f64, grid_n: usize) -> Self {
        Self {
            mass,
            err_g1: None,
            err_g2: None,
            grid_n,
            e0: None,
            fallback: false,
            x0: None,
            glue_jump: None,
            error: None,
        }
    }

    pub fn failed(mass: f64, grid_n: usize, err: &Error) -> Self {
        Self {
            error: Some(err.to_string()),
            ..Self::new(mass, grid_n)
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Slopes {
    pub g1: Option<f64>,
    pub g2: Option<f64>,
}

/// One threshold of the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: Option<f64>,
    pub lo: f64,
    pub hi: f64,
    pub passed: bool,
    /// Whether the check counts towards `passed` of the report.
    pub gate: bool,
}

impl Check {
    pub fn within(name: &str, value: Option<f64>, lo: f64, hi: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            lo,
            hi,
            passed: value.is_some_and(|v| v >= lo && v <= hi),
            gate: true,
        }
    }

    pub fn info(mut self) -> Self {
        self.gate = false;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub experiment: Experiment,
    pub config: ExperimentConfig,
    pub points: Vec<ReportPoint>,
    pub slopes: Slopes,
    pub checks: Vec<Check>,
    pub passed: bool,
    pub wall_time_s: f64,
}

impl ConvergenceReport {
    /// Fits slopes from the points and evaluates `checks`.
    pub fn assemble(config: ExperimentConfig, points: Vec<ReportPoint>, checks: Vec<Check>, wall_time_s: f64) -> Self {
        let slopes = fit_slopes(&points);
        let mut r = Self {
            experiment: config.experiment,
            config,
            points,
            slopes,
            checks,
            passed: false,
            wall_time_s,
        };
        r.passed = r.checks.iter().filter(|c| c.gate).all(|c| c.passed) && r.points.iter().all(|p| p.error.is_none());
        r
    }

    pub fn to_csv(&self) -> String {
        let cell = |v: Option<f64>| v.map(|x| format!("{x:.16e}")).unwrap_or_default();
        let mut out = String::from("M,err_g1,err_g2,slope_g1,slope_g2\n");
        for p in &self.points {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                cell(Some(p.mass)),
                cell(p.err_g1),
                cell(p.err_g2),
                cell(self.slopes.g1),
                cell(self.slopes.g2)
            );
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    /// One line per check plus the slopes, for terminals.
    pub fn summary(&self) -> String {
        let mut s = format!("{} ({:.1} s)\n", self.experiment.name(), self.wall_time_s);
        for p in &self.points {
            let f = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.3e}"));
            let _ = write!(
                s,
                "  M={:<8} n={:<8} g1={:<10} g2={:<10}",
                p.mass,
                p.grid_n,
                f(p.err_g1),
                f(p.err_g2)
            );
            if p.fallback {
                s.push_str(" fallback");
            }
            if let Some(e) = &p.error {
                let _ = write!(s, " error: {e}");
            }
            s.push('\n');
        }
        for c in &self.checks {
            let v = c.value.map_or("-".to_string(), |x| format!("{x:.4e}"));
            let tag = if c.passed { "PASS" } else { "FAIL" };
            let gate = if c.gate { "" } else { " (info)" };
            let _ = writeln!(s, "  {tag} {} = {v} in [{:e}, {:e}]{gate}", c.name, c.lo, c.hi);
        }
        s
    }
}

pub fn fit_slopes(points: &[ReportPoint]) -> Slopes {
    let fit = |sel: fn(&ReportPoint) -> Option<f64>| {
        let pairs: Vec<(f64, f64)> = points
            .iter()
            .filter_map(|p| sel(p).filter(|e| *e > 0.0).map(|e| (p.mass, e)))
            .collect();
        loglog_slope(&pairs).ok()
    };
    Slopes {
        g1: fit(|p| p.err_g1),
        g2: fit(|p| p.err_g2),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

pub fn write_report(report: &ConvergenceReport, path: &Path, format: Format) -> Result<()> {
    let text = match format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json()?,
    };
    std::fs::write(path, text)?;
    Ok(())
}

/// Reads a JSON report.
pub fn read_report(path: &Path) -> Result<ConvergenceReport> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
