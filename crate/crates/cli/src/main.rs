//! Command-line front end: paired simulations, stability reports and
//! parameter sensitivity studies.

use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod anova;
mod error;
mod simulate;
mod stability;

#[derive(Debug, Parser)]
#[command(name = "bgkpml", version, about = "Absorbing layers for the 2D BGK moment system")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario with its reference and report the error functionals.
    Simulate(simulate::SimulateArgs),
    /// Frequency-domain stability report for a set of layer parameters.
    Stability(stability::StabilityArgs),
    /// Sensitivity study of an error functional over layer parameters.
    Anova(anova::AnovaArgs),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate(args) => simulate::run(&args),
        Command::Stability(args) => stability::run(&args),
        Command::Anova(args) => anova::run(&args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            e.exit_code()
        }
    }
}
