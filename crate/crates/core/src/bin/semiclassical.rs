use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use semiclassical::harness::{self, read_config, write_report, Experiment, ExperimentConfig, Format, GridScaling};
use semiclassical::{Error, Result};

#[derive(Parser)]
#[command(
    name = "semiclassical",
    version,
    about = "Mass-convergence experiments for MD versus Schrödinger observables"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Two-state cosine model; the gap case unless `--crossing`.
    Example1 {
        #[arg(long)]
        crossing: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Harmonic well with a caustic at the turning points.
    Example2 {
        #[command(flatten)]
        common: Common,
    },
    /// Airy mollifier estimate, or the observable identity with `--identity`.
    Airy {
        #[arg(long)]
        identity: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Integrator and ergodicity properties.
    Dynamics {
        #[command(flatten)]
        common: Common,
    },
    /// Any experiment, named by the config file or `--experiment`.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// TOML experiment file; flags below override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report destination; the report goes to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
    format: OutFormat,
    #[arg(long, value_enum)]
    experiment: Option<ExperimentArg>,
    /// Comma-separated masses.
    #[arg(long, value_delimiter = ',')]
    masses: Option<Vec<f64>>,
    #[arg(long = "E")]
    energy: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    grid_n: Option<usize>,
    #[arg(long, value_enum)]
    grid_scaling: Option<ScalingArg>,
    #[arg(long)]
    grid_factor: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExperimentArg {
    Example1Gap,
    Example1Crossing,
    Example2Caustic,
    AiryCheck,
    AiryObservable,
    DynamicsSuite,
}

impl From<ExperimentArg> for Experiment {
    fn from(e: ExperimentArg) -> Self {
        match e {
            ExperimentArg::Example1Gap => Experiment::Example1Gap,
            ExperimentArg::Example1Crossing => Experiment::Example1Crossing,
            ExperimentArg::Example2Caustic => Experiment::Example2Caustic,
            ExperimentArg::AiryCheck => Experiment::AiryCheck,
            ExperimentArg::AiryObservable => Experiment::AiryObservable,
            ExperimentArg::DynamicsSuite => Experiment::DynamicsSuite,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ScalingArg {
    Fixed,
    Sqrt,
    Linear,
}

fn resolve(common: &Common, default: Option<Experiment>, allowed: &[Experiment]) -> Result<ExperimentConfig> {
    let mut cfg = match (&common.config, common.experiment.map(Experiment::from).or(default)) {
        (Some(path), _) => read_config(path)?,
        (None, Some(exp)) => ExperimentConfig::default_for(exp),
        (None, None) => return Err(Error::Config("sweep needs `--config` or `--experiment`".into())),
    };
    if let Some(exp) = common.experiment {
        let exp = Experiment::from(exp);
        if common.config.is_some() && exp != cfg.experiment {
            cfg = ExperimentConfig { experiment: exp, ..cfg };
        }
    }
    if !allowed.is_empty() && !allowed.contains(&cfg.experiment) {
        return Err(Error::Config(format!(
            "experiment `{}` does not belong to this subcommand",
            cfg.experiment.name()
        )));
    }
    if let Some(m) = &common.masses {
        cfg.masses = m.clone();
    }
    if let Some(e) = common.energy {
        cfg.energy = e;
    }
    if let Some(c) = common.c {
        cfg.c = c;
    }
    if let Some(n) = common.grid_n {
        cfg.grid_n = n;
    }
    if let Some(s) = common.grid_scaling {
        cfg.grid_scaling = match s {
            ScalingArg::Fixed => GridScaling::Fixed,
            ScalingArg::Sqrt => GridScaling::Sqrt,
            ScalingArg::Linear => GridScaling::Linear,
        };
    }
    if let Some(f) = common.grid_factor {
        cfg.grid_factor = f;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if common.threads.is_some() {
        cfg.threads = common.threads;
    }
    if let Some(out) = &common.out {
        cfg.output_path = Some(out.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: Cli) -> Result<bool> {
    use Experiment::*;
    let (common, cfg) = match &cli.command {
        Command::Example1 { crossing, common } => {
            let default = if *crossing { Example1Crossing } else { Example1Gap };
            (
                common,
                resolve(common, Some(default), &[Example1Gap, Example1Crossing])?,
            )
        }
        Command::Example2 { common } => (common, resolve(common, Some(Example2Caustic), &[Example2Caustic])?),
        Command::Airy { identity, common } => {
            let default = if *identity { AiryObservable } else { AiryCheck };
            (common, resolve(common, Some(default), &[AiryCheck, AiryObservable])?)
        }
        Command::Dynamics { common } => (common, resolve(common, Some(DynamicsSuite), &[DynamicsSuite])?),
        Command::Sweep { common } => (common, resolve(common, None, &[])?),
    };
    let report = harness::run(&cfg)?;
    let format = match common.format {
        OutFormat::Csv => Format::Csv,
        OutFormat::Json => Format::Json,
    };
    match &cfg.output_path {
        Some(path) => {
            write_report(&report, path, format)?;
            print!("{}", report.summary());
        }
        None => {
            match format {
                Format::Csv => print!("{}", report.to_csv()),
                Format::Json => println!("{}", report.to_json()?),
            }
            eprint!("{}", report.summary());
        }
    }
    Ok(report.passed)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
