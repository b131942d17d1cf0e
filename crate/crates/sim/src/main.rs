use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use clelc::analysis::finite_time_bound;
use clelc::harness::{compare_controllers, run_scenario, ControllerKind, ScenarioConfig};
use clelc::Error;

#[derive(Parser)]
#[command(name = "sim", version, about = "Run FLC and CLELC scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Controller {
    Flc,
    Clelc,
}

impl From<Controller> for ControllerKind {
    fn from(c: Controller) -> Self {
        match c {
            Controller::Flc => ControllerKind::Flc,
            Controller::Clelc => ControllerKind::Clelc,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and print its metrics.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the controller named in the config.
        #[arg(long, value_enum)]
        controller: Option<Controller>,
        /// CSV log path; defaults to the config's `output`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the metrics as JSON here.
        #[arg(long)]
        metrics_out: Option<PathBuf>,
        /// Print metrics as JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Run both controllers and write flc.csv, clelc.csv and comparison.json.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Print the reaching-time bound |s0|/(alpha - b).
    Bound {
        #[arg(long, allow_hyphen_values = true)]
        s0: f64,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
    },
    /// Check a config file without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn exit_code(err: &Error) -> u8 {
    if err.is_config() || matches!(err, Error::StabilityAssumption { .. }) {
        2
    } else {
        3
    }
}

fn write(path: &Path, contents: &str) -> clelc::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, contents)?;
    Ok(())
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn execute(command: Command) -> clelc::Result<()> {
    match command {
        Command::Run {
            config,
            controller,
            out,
            metrics_out,
            json,
        } => {
            let mut cfg = ScenarioConfig::load(&config)?;
            if let Some(c) = controller {
                cfg.controller = c.into();
            }
            let run = run_scenario(&cfg)?;
            if let Some(path) = out.or(cfg.output) {
                write(&path, &run.log.to_csv())?;
            }
            if let Some(path) = metrics_out {
                write(&path, &to_json(&run.metrics))?;
            }
            if json {
                print!("{}", to_json(&run.metrics));
            } else {
                print!("{}", run.metrics);
            }
            let ev = run.log.events();
            if ev != Default::default() {
                eprintln!(
                    "events: {} firing fallbacks, {} speed singularities, {} yaw-rate saturations",
                    ev.firing_fallbacks, ev.speed_singularities, ev.omega_saturations
                );
            }
        }
        Command::Compare { config, out_dir } => {
            let cfg = ScenarioConfig::load(&config)?;
            let (flc, clelc, report) = compare_controllers(&cfg)?;
            std::fs::create_dir_all(&out_dir)?;
            write(&out_dir.join("flc.csv"), &flc.log.to_csv())?;
            write(&out_dir.join("clelc.csv"), &clelc.log.to_csv())?;
            write(&out_dir.join("comparison.json"), &to_json(&report))?;
            print!("{report}");
        }
        Command::Bound { s0, alpha, b } => {
            println!("{}", finite_time_bound(s0, alpha, b)?);
        }
        Command::Validate { config } => {
            let cfg = ScenarioConfig::load(&config)?;
            println!("ok: {:?} scenario, {} steps", cfg.scenario, cfg.steps());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
