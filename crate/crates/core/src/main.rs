mod cli;

use std::process::ExitCode;

use clap::Parser;

use cli::args::Cli;
use cli::{Outcome, EXIT_VERIFICATION_FAILED};
use qfs::QfsError;

const EXIT_FAILURE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_UNREACHABLE_K: u8 = 3;
const EXIT_NON_MONOTONE: u8 = 4;

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<QfsError>() {
        Some(QfsError::UnreachableK { .. }) => EXIT_UNREACHABLE_K,
        Some(QfsError::NonMonotone { .. }) => EXIT_NON_MONOTONE,
        Some(QfsError::NotPositiveDefinite(_)) => EXIT_FAILURE,
        Some(_) => EXIT_INPUT,
        None => EXIT_FAILURE,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli::run(cli) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::VerificationFailed) => ExitCode::from(EXIT_VERIFICATION_FAILED),
        Err(err) => {
            eprintln!("error: {err:#}");
            if let Some(QfsError::NonMonotone { .. }) = err.downcast_ref::<QfsError>() {
                eprintln!("hint: rerun with --solver exhaustive or more --shots");
            }
            ExitCode::from(exit_code(&err))
        }
    }
}
