//! `smalldev`: predictions, numerical estimates and self-checks for small
//! deviation probabilities of exponentially weighted series.

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

mod commands;
mod config;
mod verify;

use commands::{CliError, EXIT_CONFIG};
use config::{EstimateArgs, SeriesArgs};

#[derive(Debug, Parser)]
#[command(name = "smalldev", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the asymptotic rate of −log P(· ≤ ε) for the configured series.
    Predict(SeriesArgs),
    /// Run an estimator over an ε grid and report the convergence table.
    Estimate(EstimateArgs),
    /// Run the built-in invariant suite.
    Verify {
        #[command(flatten)]
        series: SeriesArgs,
        /// Evaluate the functional equation with this ratio instead of q.
        #[arg(long, hide = true)]
        perturb_q: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_CONFIG,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result: Result<(), CliError> = match &cli.command {
        Command::Predict(args) => commands::predict_cmd(args),
        Command::Estimate(args) => commands::estimate_cmd(args),
        Command::Verify { series, perturb_q } => commands::verify_cmd(series, *perturb_q),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
