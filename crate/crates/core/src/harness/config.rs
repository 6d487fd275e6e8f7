use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Example1Gap,
    Example1Crossing,
    Example2Caustic,
    AiryCheck,
    AiryObservable,
    DynamicsSuite,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Example1Gap => "example1_gap",
            Experiment::Example1Crossing => "example1_crossing",
            Experiment::Example2Caustic => "example2_caustic",
            Experiment::AiryCheck => "airy_check",
            Experiment::AiryObservable => "airy_observable",
            Experiment::DynamicsSuite => "dynamics_suite",
        }
    }
}

/// How the number of grid points grows with the mass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridScaling {
    /// Always `grid_n`.
    Fixed,
    /// `max(grid_n, 16 ⌈√M⌉)`.
    Sqrt,
    /// `max(grid_n, ⌈grid_factor · M⌉)`.
    Linear,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Number {
    Int(i64),
    Float(f64),
}

impl From<Number> for f64 {
    fn from(n: Number) -> f64 {
        match n {
            Number::Int(i) => i as f64,
            Number::Float(f) => f,
        }
    }
}

fn number<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Number::deserialize(d).map(f64::from)
}

fn numbers<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<f64>, D::Error> {
    Vec::<Number>::deserialize(d).map(|v| v.into_iter().map(f64::from).collect())
}

fn default_grid_n() -> usize {
    128
}

fn default_scaling() -> GridScaling {
    GridScaling::Linear
}

fn default_factor() -> f64 {
    128.0
}

fn default_seed() -> u64 {
    20_240_601
}

fn default_order() -> usize {
    3
}

fn default_eigen_count() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// Target energy.
    #[serde(rename = "E", deserialize_with = "number", default)]
    pub energy: f64,
    /// Gap constant of the two-state coupling.
    #[serde(deserialize_with = "number", default)]
    pub c: f64,
    #[serde(deserialize_with = "numbers")]
    pub masses: Vec<f64>,
    #[serde(default = "default_grid_n")]
    pub grid_n: usize,
    #[serde(default = "default_scaling")]
    pub grid_scaling: GridScaling,
    #[serde(deserialize_with = "number", default = "default_factor")]
    pub grid_factor: f64,
    /// Names of the two observables; empty selects the experiment default.
    #[serde(default)]
    pub observables: Vec<String>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    /// Worker threads for the mass sweep; `None` uses all cores.
    #[serde(default)]
    pub threads: Option<usize>,
    /// Stationary-phase order.
    #[serde(default = "default_order")]
    pub order: usize,
    /// Eigenvalues requested near `E`.
    #[serde(default = "default_eigen_count")]
    pub eigen_count: usize,
}

/// Observable names understood by [`observable`].
pub const OBSERVABLES: [&str; 6] = [
    "x_squared",
    "potential",
    "caustic_g1",
    "caustic_g2",
    "airy_moment",
    "airy_bump",
];

impl ExperimentConfig {
    /// Reference parameters of each experiment.
    pub fn default_for(experiment: Experiment) -> Self {
        let ex1 = vec![90.0, 181.0, 362.0, 724.0, 1448.0, 2896.0, 5792.0];
        let (energy, c, masses, scaling, factor) = match experiment {
            Experiment::Example1Gap => (0.0, 5.0, ex1, GridScaling::Linear, 128.0),
            Experiment::Example1Crossing => (1.2, 0.0, ex1, GridScaling::Linear, 128.0),
            Experiment::Example2Caustic => (
                1.0,
                0.0,
                vec![200.0, 400.0, 800.0, 1600.0, 3200.0, 6400.0],
                GridScaling::Linear,
                8.0,
            ),
            Experiment::AiryCheck => (0.0, 0.0, vec![50.0, 100.0, 400.0], GridScaling::Fixed, 1.0),
            Experiment::AiryObservable => (0.0, 0.0, vec![100.0, 200.0, 400.0, 800.0], GridScaling::Fixed, 1.0),
            Experiment::DynamicsSuite => (1.0, 0.0, Vec::new(), GridScaling::Fixed, 1.0),
        };
        Self {
            experiment,
            energy,
            c,
            masses,
            grid_n: default_grid_n(),
            grid_scaling: scaling,
            grid_factor: factor,
            observables: Vec::new(),
            seed: default_seed(),
            output_path: None,
            threads: None,
            order: default_order(),
            eigen_count: default_eigen_count(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.masses.is_empty() && self.experiment != Experiment::DynamicsSuite {
            return Err(Error::Config("field `masses` must list at least one mass".into()));
        }
        if self.masses.iter().any(|m| !(*m > 0.0) || !m.is_finite()) {
            return Err(Error::Config("field `masses` must hold positive numbers".into()));
        }
        if self.masses.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("field `masses` must be strictly increasing".into()));
        }
        if self.grid_n < 128 {
            return Err(Error::Config(format!(
                "field `grid_n` = {} must be >= 128",
                self.grid_n
            )));
        }
        if !(self.grid_factor > 0.0) {
            return Err(Error::Config("field `grid_factor` must be > 0".into()));
        }
        if !self.energy.is_finite() || !(self.c >= 0.0) {
            return Err(Error::Config("fields `E` and `c` must be finite, `c` >= 0".into()));
        }
        if let Some(bad) = self.observables.iter().find(|o| !OBSERVABLES.contains(&o.as_str())) {
            return Err(Error::Config(format!(
                "field `observables`: unknown `{bad}`, expected one of {}",
                OBSERVABLES.join(", ")
            )));
        }
        if !self.observables.is_empty() && self.observables.len() != 2 {
            return Err(Error::Config(
                "field `observables` must name exactly two observables".into(),
            ));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("field `threads` must be >= 1".into()));
        }
        if self.eigen_count == 0 {
            return Err(Error::Config("field `eigen_count` must be >= 1".into()));
        }
        Ok(())
    }

    /// Grid points used at mass `m`.
    pub fn grid_points(&self, m: f64) -> usize {
        match self.grid_scaling {
            GridScaling::Fixed => self.grid_n,
            GridScaling::Sqrt => self.grid_n.max(16 * m.sqrt().ceil() as usize),
            GridScaling::Linear => self.grid_n.max((self.grid_factor * m).ceil() as usize),
        }
    }

    /// The two observable names, falling back to the experiment default.
    pub fn observable_names(&self) -> [String; 2] {
        if self.observables.len() == 2 {
            return [self.observables[0].clone(), self.observables[1].clone()];
        }
        let (a, b) = match self.experiment {
            Experiment::Example2Caustic => ("caustic_g1", "caustic_g2"),
            Experiment::AiryCheck | Experiment::AiryObservable => ("airy_moment", "airy_bump"),
            _ => ("x_squared", "potential"),
        };
        [a.to_string(), b.to_string()]
    }
}

/// Smooth bump supported on `[-2, -1]`.
pub fn airy_bump(x: f64) -> f64 {
    let t = 2.0 * x + 3.0;
    if t.abs() < 1.0 {
        (-1.0 / (1.0 - t * t)).exp()
    } else {
        0.0
    }
}

/// Observable by name; `potential` is the heavy potential of the two-state
/// model.
pub fn observable(name: &str) -> Result<fn(f64) -> f64> {
    fn x_squared(x: f64) -> f64 {
        x * x
    }
    fn potential(x: f64) -> f64 {
        -2.0 * x.cos() + (4.0 * x).cos()
    }
    fn window(x: f64) -> f64 {
        ((1.5 - x) * (1.5 + x)).powi(6) / 1.5f64.powi(12)
    }
    fn caustic_g1(x: f64) -> f64 {
        window(x) * (1.0 + (-x * x).exp())
    }
    fn caustic_g2(x: f64) -> f64 {
        window(x) * (1.0 - x * x + x.powi(4))
    }
    fn airy_moment(x: f64) -> f64 {
        -x * airy_bump(x)
    }
    Ok(match name {
        "x_squared" => x_squared,
        "potential" => potential,
        "caustic_g1" => caustic_g1,
        "caustic_g2" => caustic_g2,
        "airy_moment" => airy_moment,
        "airy_bump" => airy_bump,
        other => {
            return Err(Error::Config(format!(
                "unknown observable `{other}`, expected one of {}",
                OBSERVABLES.join(", ")
            )))
        }
    })
}

pub fn read_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    ExperimentConfig::from_toml(&text)
}
