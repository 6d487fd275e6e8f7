use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("eigensolver did not converge (residual {residual:.3e})")]
    NoConvergence { residual: f64 },
    #[error("least-squares system is rank deficient")]
    RankDeficient,
    #[error("no electronic surface stays below E0 = {e0}")]
    NoClassicallyAllowedSurface { e0: f64 },
    #[error("E0 - lambda is not positive at X = {x}")]
    NonpositiveKineticEnergy { x: f64 },
    #[error("observable denominator {0:.3e} is too small")]
    VanishingObservable(f64),
    #[error("no eigenvalue within {radius:.3e} of E = {target}")]
    EmptySelection { target: f64, radius: f64 },
    #[error("trial state is orthogonal to every kept eigenvector")]
    OrthogonalTrialState,
    #[error("{0} lies outside the admissible domain")]
    OutsideDomain(f64),
    #[error("quadrature needs {needed} nodes, cap is {cap}")]
    BudgetExceeded { needed: usize, cap: usize },
    #[error("second derivative of the dual phase vanishes at P0 = {0}")]
    DegenerateStationaryPoint(f64),
    #[error("no local maximum of |u| in ({lo}, {hi})")]
    GluePointNotFound { lo: f64, hi: f64 },
    #[error("grid too coarse: spectral tail ratio {0:.3e}")]
    Aliasing(f64),
    #[error("trajectory left the box |X| <= {bound} at t = {t}")]
    UnboundedExcursion { bound: f64, t: f64 },
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
