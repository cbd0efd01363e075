//! `scalehodge`: Betti numbers, sweeps, Hodge decompositions and worked
//! experiments for finite metric measure spaces.
//!
//! Exit codes: 0 success, 1 input error, 2 success with warnings,
//! 3 simplex cap exceeded.

mod commands;
mod input;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{BettiArgs, DecomposeArgs, Lab, Status, SweepArgs};

#[derive(Parser, Debug)]
#[command(name = "scalehodge", version, about = "Hodge cohomology of finite metric measure spaces at a scale")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Betti numbers and spectral report at one scale.
    Betti(BettiArgs),
    /// Betti numbers over a list or range of scales, as CSV.
    Sweep(SweepArgs),
    /// Exact, coexact and harmonic parts of a cochain.
    Decompose(DecomposeArgs),
    /// Worked experiments with fixed defaults.
    #[command(subcommand)]
    Paperlab(Lab),
}

fn is_cap_error(e: &anyhow::Error) -> bool {
    e.chain().any(|c| matches!(c.downcast_ref(), Some(scale_hodge::Error::SimplexCapExceeded { .. })))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Betti(a) => commands::betti(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Decompose(a) => commands::decompose(a),
        Command::Paperlab(lab) => commands::paperlab(lab),
    };
    match result {
        Ok(Status::Clean) => ExitCode::SUCCESS,
        Ok(Status::Warnings) => ExitCode::from(2),
        Ok(Status::Capped) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_cap_error(&e) { 3 } else { 1 })
        }
    }
}
