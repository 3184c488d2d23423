use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use optomech_cli::commands;
use optomech_cli::config::ScenarioConfig;
use optomech_cli::presets::{preset, PRESET_NAMES};
use optomech_cli::CliError;

#[derive(Parser)]
#[command(
    name = "optomech",
    version,
    about = "Driven optomechanical resonator: potential landscapes, trajectories, \
             Poincaré sections, spectra, Lyapunov exponents, regime maps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Built-in scenario preset (fig1a..fig6-neg)
    #[arg(
        long,
        value_name = "NAME",
        conflicts_with = "config",
        required_unless_present = "config"
    )]
    preset: Option<String>,
    /// Scenario configuration file (JSON)
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory (overrides the configuration's output.dir)
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

impl ScenarioArgs {
    fn load(&self) -> Result<ScenarioConfig, CliError> {
        let mut config = if let Some(name) = &self.preset {
            preset(name).ok_or_else(|| {
                CliError::Config(format!(
                    "unknown preset `{name}`; available: {}",
                    PRESET_NAMES.join(", ")
                ))
            })?
        } else if let Some(path) = &self.config {
            ScenarioConfig::from_file(path)?
        } else {
            return Err(CliError::Config(
                "either --preset or --config is required".into(),
            ));
        };
        if let Some(out) = &self.out {
            config.output.dir = out.display().to_string();
        }
        config.validate()?;
        Ok(config)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the effective potential and classify its wells
    Potential {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Lower end of the tabulated range
        #[arg(long, default_value_t = -100.0, allow_hyphen_values = true)]
        x_min: f64,
        /// Upper end of the tabulated range
        #[arg(long, default_value_t = 100.0, allow_hyphen_values = true)]
        x_max: f64,
        /// Number of profile rows
        #[arg(long, default_value_t = 2001)]
        n_points: usize,
        /// Override the drive amplitude as eps-ratio * kappa
        #[arg(long, allow_hyphen_values = true)]
        eps_ratio: Option<f64>,
    },
    /// Integrate and write a uniformly sampled trajectory
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Duration in drive periods
        #[arg(long, default_value_t = 200.0)]
        periods: f64,
        /// Sampling interval (defaults to period / samples_per_period)
        #[arg(long)]
        dt_sample: Option<f64>,
    },
    /// Record the stroboscopic Poincaré section
    Poincare {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Compute the displacement power spectrum
    Spectrum {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Estimate the largest Lyapunov exponent
    Lyapunov {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Tangent-direction seed
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Produce the full regime report
    Classify {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Tangent-direction seed
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Evaluate a metric over a parameter grid
    Sweep {
        /// Sweep specification file (JSON)
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
        /// Output directory (overrides the specification's output.dir)
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        /// Low-confidence profile: 30 transient periods, 400-point runs
        #[arg(long)]
        fast: bool,
    },
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Potential {
            scenario,
            x_min,
            x_max,
            n_points,
            eps_ratio,
        } => {
            let config = scenario.load()?;
            commands::run_potential(&config, x_min, x_max, n_points, eps_ratio)
        }
        Command::Simulate {
            scenario,
            periods,
            dt_sample,
        } => {
            let config = scenario.load()?;
            commands::run_simulate(&config, periods, dt_sample)
        }
        Command::Poincare { scenario } => {
            let config = scenario.load()?;
            commands::run_poincare(&config)
        }
        Command::Spectrum { scenario } => {
            let config = scenario.load()?;
            commands::run_spectrum(&config)
        }
        Command::Lyapunov { scenario, seed } => {
            let config = scenario.load()?;
            commands::run_lyapunov(&config, seed)
        }
        Command::Classify { scenario, seed } => {
            let config = scenario.load()?;
            commands::run_classify(&config, seed)
        }
        Command::Sweep { config, out, fast } => {
            commands::run_sweep_file(&config, out.as_deref(), fast)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = dispatch(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
