#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use phstring::config::{builtin, load_config, BUILTIN_SCENARIOS};
use phstring::integrator::Scheme;
use phstring::output::run;
use phstring::Error;

const EXIT_VALIDATION: u8 = 1;
const EXIT_SOLVER: u8 = 2;

#[derive(Parser)]
#[command(name = "phstring", version, about = "Energy-consistent string dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its result files.
    Run(RunArgs),
    /// Print a built-in scenario as a configuration file.
    Scenario {
        /// One of: pendulum, free-fall, static-hang.
        name: String,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    /// Configuration file (TOML).
    #[arg(long, conflicts_with = "scenario", required_unless_present = "scenario")]
    config: Option<PathBuf>,
    /// Built-in scenario name.
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Time integrator: dg or midpoint.
    #[arg(long)]
    scheme: Option<Scheme>,
    #[arg(long)]
    newton_tol: Option<f64>,
    /// Run exactly N steps of size h.
    #[arg(long, value_name = "N")]
    steps_override: Option<usize>,
    /// Validate the configuration and build the model without integrating.
    #[arg(long)]
    dry_run: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Scenario { name } => match builtin(&name) {
            Ok(cfg) => {
                print!("{}", cfg.to_toml_string());
                ExitCode::SUCCESS
            }
            Err(err) => {
                eprintln!("error: {err}");
                ExitCode::from(EXIT_VALIDATION)
            }
        },
        Command::Run(args) => run_command(args),
    }
}

fn run_command(args: RunArgs) -> ExitCode {
    let loaded = match (&args.config, &args.scenario) {
        (Some(path), _) => load_config(path),
        (None, Some(name)) => builtin(name),
        (None, None) => Err(Error::Config(format!(
            "pass --config or --scenario ({})",
            BUILTIN_SCENARIOS.join(", ")
        ))),
    };
    let mut cfg = match loaded {
        Ok(cfg) => cfg,
        Err(err) => return validation_failure(&err),
    };
    if let Some(dir) = args.output_dir {
        cfg.output.directory = dir;
    }
    if let Some(scheme) = args.scheme {
        cfg.solver.scheme = scheme;
    }
    if let Some(tol) = args.newton_tol {
        if !(tol > 0.0) {
            return validation_failure(&Error::Validation(vec![format!(
                "solver.newton_tol: must be positive, got {tol}"
            )]));
        }
        cfg.solver.newton_tol = tol;
    }
    if let Some(steps) = args.steps_override {
        cfg.set_steps(steps);
    }

    if args.dry_run {
        return match cfg.build() {
            Ok(scenario) => {
                println!(
                    "configuration valid: {} elements, {} unknowns, {} steps",
                    scenario.model.mesh.n_elements(),
                    scenario.model.n_state(),
                    phstring::integrator::n_steps(scenario.duration, scenario.settings.h)
                );
                ExitCode::SUCCESS
            }
            Err(err) => validation_failure(&err),
        };
    }

    match run(&cfg) {
        Ok(summary) if summary.succeeded() => {
            println!(
                "completed {} steps in {:.3} s; results in {}",
                summary.manifest.steps_completed,
                summary.manifest.wall_time_seconds,
                summary.directory.display()
            );
            ExitCode::SUCCESS
        }
        Ok(summary) => {
            eprintln!(
                "error: solver failed at step {}: {}",
                summary.manifest.failure_step.unwrap_or(0),
                summary.manifest.failure_message.as_deref().unwrap_or("unknown")
            );
            ExitCode::from(EXIT_SOLVER)
        }
        Err(err @ (Error::Validation(_) | Error::Config(_) | Error::Parse(_) | Error::Domain { .. })) => {
            validation_failure(&err)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(EXIT_SOLVER)
        }
    }
}

fn validation_failure(err: &Error) -> ExitCode {
    match err {
        Error::Validation(list) => {
            eprintln!("error: invalid configuration");
            for item in list {
                eprintln!("  {item}");
            }
        }
        other => eprintln!("error: {other}"),
    }
    ExitCode::from(EXIT_VALIDATION)
}
