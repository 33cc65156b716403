use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ecoepi_cli::{cmd_check, cmd_reproduce, cmd_simulate, cmd_thresholds, CliResult, EXIT_NUMERICAL, EXIT_USAGE};

/// Discrete eco-epidemiological predator-prey model.
///
/// SCENARIO is a scenario file or the name of a built-in preset.
#[derive(Parser)]
#[command(name = "ecoepi", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate and write `n,S,I,P` rows plus a JSON summary next to them
    Simulate {
        scenario: String,
        /// Defaults to run.n_steps of the scenario
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute the threshold table and classify
    Thresholds {
        scenario: String,
        #[arg(long)]
        lambda_max: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rerun a worked example: trajectories, thresholds and verdicts
    Reproduce {
        preset: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the hypothesis table H1-H9
    Check { scenario: String },
    /// Print the scenario file of a preset
    Preset { name: String },
}

fn run(cli: Cli) -> CliResult {
    let mut stdout = std::io::stdout().lock();
    match cli.command {
        Command::Simulate { scenario, steps, out } => cmd_simulate(&scenario, steps, &out, &mut stdout, &mut std::io::stderr()),
        Command::Thresholds {
            scenario,
            lambda_max,
            out,
        } => cmd_thresholds(&scenario, lambda_max, &out, &mut stdout),
        Command::Reproduce { preset, out } => {
            let result = cmd_reproduce(&preset, &out, &mut stdout)?;
            if result.pass {
                Ok(())
            } else {
                Err(ecoepi_cli::CliError {
                    code: EXIT_NUMERICAL,
                    message: format!("{preset}: reproduction does not match the expected classification"),
                })
            }
        }
        Command::Check { scenario } => cmd_check(&scenario, &mut stdout),
        Command::Preset { name } => match ecoepi_core::presets::preset(&name) {
            Some(p) => {
                print!("{}", p.toml());
                Ok(())
            }
            None => Err(ecoepi_cli::CliError {
                code: EXIT_USAGE,
                message: format!("unknown preset {name:?}"),
            }),
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
