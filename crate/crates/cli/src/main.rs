//! `pryce`: evaluate operators, run verification suites and wave-packet
//! experiments.
//!
//! Exit codes: 0 ok, 1 verification failure, 2 usage, 3 domain or chart
//! error, 4 quadrature non-convergence.

/// `println!` that ignores a closed stdout.
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout().lock(), $($t)*);
    }};
}

mod args;
mod commands;
mod render;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

pub const EXIT_VERIFY_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_DOMAIN: u8 = 3;
pub const EXIT_NON_CONVERGENCE: u8 = 4;

/// A command failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<pryce_core::Error> for Failure {
    fn from(e: pryce_core::Error) -> Self {
        use pryce_core::Error::*;
        let code = match &e {
            QuadratureNonConvergence { .. } => EXIT_NON_CONVERGENCE,
            UnknownSuite { .. } | InvalidArgument(_) | NonPositiveMass(_) | NonFinite(_) | IndexOutOfRange { .. } => {
                EXIT_USAGE
            }
            _ => EXIT_DOMAIN,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::usage(format!("cannot write output: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Ops(a) => commands::ops(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Wavepacket(a) => commands::wavepacket(&a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
